#include <doctest.h>

#include "fuchs/malgrange.hpp"
#include "fuchs/samples.hpp"

using namespace fuchs;

namespace {

ResidueFamily random_family(int n, int np, std::uint64_t seed) {
  SystemOptions o;
  o.transport_tol = 1e-12;
  ResidueFamily fam{random_system(n, np, seed, 0.4, o), {}};
  for (int i = 0; i < 2; ++i) {
    std::vector<Mat> d;
    Mat sum = Mat::Zero(n, n);
    for (int j = 0; j + 1 < np; ++j) {
      d.push_back(random_traceless(n, 50 + 10 * i + j, 0.3));
      sum += d.back();
    }
    d.push_back(-sum);
    fam.directions.push_back(d);
  }
  return fam;
}

}  // namespace

TEST_CASE("constant family gives the zero cycle") {
  SystemOptions o;
  o.transport_tol = 1e-12;
  const auto s = random_system(2, 3, 7, 0.4, o);
  ResidueFamily fam{s, {std::vector<Mat>(3, Mat::Zero(2, 2))}};
  const auto c = malgrange_cycle(fam, {0.0}, 0);
  for (const auto& t : c.terms) CHECK(t.y.norm() < 1e-6);
  CHECK(std::abs(c.omega) < 1e-6);
  CHECK_THROWS_AS(malgrange_cycle(fam, {0.0}, 1), Error);
}

TEST_CASE("B_delta is a generalized cycle") {
  for (auto [n, np] : {std::pair{2, 3}, std::pair{2, 4}, std::pair{3, 3}}) {
    const auto fam = random_family(n, np, 7);
    for (int dir = 0; dir < 2; ++dir) {
      const auto c = malgrange_cycle(fam, {0.0, 0.0}, dir);
      CHECK(c.boundary_defect < 1e-5);
      CHECK(c.puncture_defect < 1e-5);
      CHECK(c.fd_noise < 1e-3);
      // The edge terms do not vanish individually; only their sum does.
      double largest = 0.0;
      for (const auto& t : c.terms) largest = std::max(largest, t.y.norm());
      CHECK(largest > 1e-2);
    }
  }
}

TEST_CASE("exterior derivative by finite differences") {
  const auto fam = random_family(2, 3, 7);
  const auto r = malgrange_check(fam);
  CHECK(r.d_omega_swapped == -r.d_omega);
  const auto coarse = malgrange_check(fam, 0, 1, 3e-3);
  CHECK(std::abs(coarse.d_omega - r.d_omega) < 1e-4 * std::abs(r.d_omega));
  CHECK(std::abs(coarse.intersection - r.intersection) < 1e-8 * std::abs(r.intersection));
  MESSAGE("d omega " << r.d_omega << " vs (B1, B2) " << r.intersection << ", relative gap "
                     << r.relative_error);
}

TEST_CASE("conjugation directions pair trivially") {
  // For sl_2 with three punctures every loop cycle is an A-cycle, so cycles
  // generated by a global conjugation have zero mutual intersection.
  SystemOptions o;
  o.transport_tol = 1e-12;
  const auto s = random_system(2, 3, 7, 0.4, o);
  ResidueFamily fam{s, {}};
  for (int i = 0; i < 2; ++i) {
    const Mat x = random_traceless(2, 1 + i);
    std::vector<Mat> d;
    for (const auto& a : s.residues()) d.push_back(LieAlgebra::bracket(x, a));
    fam.directions.push_back(d);
  }
  const auto r = malgrange_check(fam);
  CHECK(std::abs(r.intersection) < 1e-6);
  MESSAGE("d omega on conjugation directions " << r.d_omega);
}
