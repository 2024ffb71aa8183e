#include <doctest.h>

#include <random>

#include "fuchs/amplitudes.hpp"
#include "fuchs/samples.hpp"

using namespace fuchs;

namespace {
double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
}  // namespace

TEST_CASE("degree-2 normal ordering adds one trace term") {
  const auto r = random_system(2, 3, 11);
  const auto c2 = casimir_tensor(r.algebra(), 2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  int done = 0;
  while (done < 10) {
    const cplx x(u(rng), u(rng));
    if (r.distance_to_punctures(x) < 0.1) continue;
    const Path route = straight(r.basepoint(), x);
    const cplx diff = normal_ordered_casimir_amplitude(r, c2, route) - casimir_amplitude(r, c2, route);
    CHECK(rel(diff, normal_order_correction_W2C2(r, x)) < 1e-8);
    ++done;
  }
  const Path route = straight(r.basepoint(), cplx(0.2, 0.1));
  const auto pts = std::vector<BundlePoint>{point_at(r, cplx(-0.3, 0.2), random_traceless(2, 5))};
  CHECK(rel(normal_ordered_quadrature(r, c2, route, pts), normal_ordered_casimir_amplitude(r, c2, route, pts)) < 1e-6);
  CHECK_THROWS_AS(casimir_tensor(r.algebra(), 3), Error);
}

TEST_CASE("degree-3 normal ordering") {
  const auto r = random_system(3, 3, 4);
  const auto c3 = casimir_tensor(r.algebra(), 3);
  const Path route = straight(r.basepoint(), cplx(0.1, 0.1));
  CHECK(rel(normal_ordered_quadrature(r, c3, route, {}, 0.0, 16), normal_ordered_casimir_amplitude(r, c3, route)) <
        1e-6);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  std::vector<cplx> xs, vals;
  while (xs.size() < 24) {
    const cplx x(u(rng), u(rng));
    if (r.distance_to_punctures(x) < 0.1) continue;
    xs.push_back(x);
    vals.push_back(normal_ordered_casimir_amplitude(r, c3, straight(r.basepoint(), x)));
  }
  CHECK(fit_rational(r, xs, vals, 3).residual < 1e-6);
}

TEST_CASE("charges") {
  const auto s = two_pole_sl2(0.3);
  for (int j = 0; j < 2; ++j) CHECK(rel(extract_charge(s, 2, j).value, charge_oracle_degree2(s, j)) < 1e-6);
  const auto r = random_system(2, 3, 11);
  std::vector<Mat> scaled;
  for (const auto& a : r.residues()) scaled.push_back(1.3 * a);
  const auto r2 = r.with_residues(scaled);
  for (int j = 0; j < 3; ++j) {
    const cplx q = extract_charge(r, 2, j).value;
    CHECK(rel(q, charge_oracle_degree2(r, j)) < 1e-6);
    CHECK(rel(extract_charge(r2, 2, j).value, 1.69 * q) < 1e-6);
  }
  CHECK_THROWS_AS(extract_charge(r, 3, 0), Error);
}
