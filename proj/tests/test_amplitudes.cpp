#include <doctest.h>

#include <numbers>
#include <random>

#include "fuchs/amplitudes.hpp"
#include "fuchs/combinatorics.hpp"
#include "fuchs/samples.hpp"

using namespace fuchs;

namespace {

std::vector<BundlePoint> sample_points(const FuchsianSystem& s, int n, std::uint64_t seed) {
  const cplx xs[] = {{0.1, 0.2}, {-0.3, 0.05}, {0.2, -0.3}, {0.4, 0.4}, {-0.1, -0.45}, {0.05, 0.6}, {-0.5, 0.3}, {0.3, 0.0}, {-0.2, -0.2}};
  std::vector<BundlePoint> pts;
  for (int i = 0; i < n; ++i) pts.push_back(point_at(s, xs[i], random_traceless(s.n(), seed + i)));
  return pts;
}

cplx rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("kernel") {
  const auto s = two_pole_sl2(0.3);
  const cplx x(0.3, -0.4), y(0.7, -0.2);
  const auto px = point_at(s, x, Mat()), py = point_at(s, y, Mat());
  const PointFrame fx = frame_of(s, px);
  CHECK((kernel(s, fx, fx) - fx.psi_inv * s.connection_at(x) * fx.psi).norm() < 1e-14);
  // closed form: Psi is diagonal exp(A_1 (L(x) - L(x0)))
  const cplx x0 = s.basepoint();
  auto psi = [&](cplx p) {
    const cplx l = std::log(p / (p - 1.0)) - std::log(x0 / (x0 - 1.0));
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = std::exp(0.3 * l);
    m(1, 1) = std::exp(-0.3 * l);
    return m;
  };
  const Mat want = psi(x).inverse() * psi(y) / (y - x);
  CHECK((kernel(s, px, py) - want).norm() < 1e-8 * want.norm());

  // the regularized value is the limit of K(x, y') minus its pole
  const auto r = random_system(2, 3, 11);
  const PointFrame f = frame_of(r, point_at(r, x, Mat()));
  const Extrapolation lim = richardson(
      [&](double h) {
        PointFrame g = f;
        g.x = x + h;
        g.psi = transport_from(r, straight(x, x + h), f.psi).matrix;
        g.psi_inv = g.psi.inverse();
        return cplx((kernel(r, f, g) - f.psi_inv * f.psi / h)(0, 1));
      },
      1e-2, 5);
  CHECK(std::abs(lim.value - kernel(r, f, f)(0, 1)) < 1e-7);
}

TEST_CASE("connected and disconnected amplitudes") {
  const auto s = two_pole_sl2(0.3);
  const Mat e = cplx(0.7, -0.2) * s.residues()[0];
  const cplx x(0.4, -0.6);
  const auto p = point_at(s, x, e);
  CHECK(std::abs(w_connected(s, {p}) - s.algebra().killing(s.connection_at(x), e)) <
        1e-8 * std::abs(w_connected(s, {p})));
  CHECK(w_disconnected(s, {p}) == w_connected(s, {p}));

  const auto r = random_system(2, 3, 11);
  auto pts = sample_points(r, 4, 100);
  const auto fr = frames_of(r, pts);
  const cplx w2 = w_connected(r, {fr[0], fr[1]});
  CHECK(std::abs(w2 - w_connected(r, {fr[1], fr[0]})) < 1e-12 * std::abs(w2));
  const cplx hat2 = w_disconnected(r, {fr[0], fr[1]});
  CHECK(std::abs(hat2 - (w2 + w_connected(r, {fr[0]}) * w_connected(r, {fr[1]}))) < 1e-10 * std::abs(hat2));
  for (int n = 2; n <= 4; ++n) {
    const std::vector<PointFrame> sub(fr.begin(), fr.begin() + n);
    CHECK(std::abs(rel(w_disconnected(r, sub), w_from_partitions(r, sub))) < 1e-10);
  }
  CHECK(set_partitions(3).size() == 5);
  CHECK(set_partitions(4).size() == 15);

  auto zeroed = fr;
  zeroed[1].e.setZero();
  CHECK(w_connected(r, std::vector<PointFrame>(zeroed.begin(), zeroed.begin() + 3)) == cplx(0.0));

  // multilinearity in one argument
  auto mixed = fr;
  const Mat f = random_traceless(2, 55);
  mixed[2].e = cplx(0.3, 0.4) * fr[2].e + cplx(-1.1, 0.2) * f;
  auto with_f = fr;
  with_f[2].e = f;
  const cplx lhs = w_disconnected(r, mixed);
  const cplx rhs = cplx(0.3, 0.4) * w_disconnected(r, fr) + cplx(-1.1, 0.2) * w_disconnected(r, with_f);
  CHECK(std::abs(rel(lhs, rhs)) < 1e-10);

  // gauge independence: Psi -> Psi C, E -> C^{-1} E C
  Mat c = Mat::Identity(2, 2) + random_traceless(2, 77, 0.5);
  c /= std::sqrt(c.determinant());
  auto gauged = fr;
  for (auto& g : gauged) {
    g.psi = g.psi * c;
    g.psi_inv = g.psi.inverse();
    g.e = c.inverse() * g.e * c;
  }
  CHECK(std::abs(rel(w_disconnected(r, gauged), w_disconnected(r, fr))) < 1e-9);

  std::vector<PointFrame> nine(9, fr[0]);
  CHECK_THROWS_AS(w_disconnected(r, nine), Error);
}

TEST_CASE("conjugation covariance") {
  const auto r = random_system(3, 3, 4);
  Mat g = Mat::Identity(3, 3) + random_traceless(3, 5, 0.4);
  g /= std::pow(g.determinant(), 1.0 / 3.0);
  std::vector<Mat> res;
  for (const auto& a : r.residues()) res.push_back(g * a * g.inverse());
  SystemOptions opt;
  opt.basepoint = r.basepoint();
  const FuchsianSystem rg(r.algebra(), r.punctures(), res, opt);
  auto pts = sample_points(r, 3, 200);
  auto ptsg = pts;
  for (auto& p : ptsg) p.e = g * p.e * g.inverse();
  CHECK(std::abs(rel(w_disconnected(rg, ptsg), w_disconnected(r, pts))) < 1e-9);
}

TEST_CASE("short-distance behaviour") {
  const auto r = random_system(2, 3, 11);
  auto pts = sample_points(r, 3, 300);
  const auto rep = short_distance_check(r, random_traceless(2, 9), pts[0], cplx(1.0, 0.5), {pts[1], pts[2]});
  CHECK(rep.pass);
  // identical E: no simple pole term
  const auto same = short_distance_check(r, pts[0].e, pts[0], cplx(0.0, 1.0), {pts[1]});
  CHECK(same.pass);
}

TEST_CASE("asymptotics at a puncture") {
  const auto r = random_system(2, 3, 11);
  auto pts = sample_points(r, 2, 400);
  for (int j = 0; j < 3; ++j) {
    const LocalFrame lf = local_frame(r, j);
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = -1.0;
    const Mat e = lf.psi_j.inverse() * lf.p * d * lf.p_inv * lf.psi_j;
    const auto rep = puncture_asymptotics_check(r, j, e, {pts[1]});
    CHECK(rep.residue_error < 1e-4);
    CHECK(rep.exponent_error < 1e-3);
    const auto rep1 = puncture_asymptotics_check(r, j, e, {});
    CHECK(rep1.residue_error < 1e-4);
  }
}

TEST_CASE("Casimir amplitudes are rational") {
  for (auto [n, seed] : {std::pair{2, 11}, std::pair{3, 4}}) {
    const auto r = random_system(n, 3, seed);
    const auto c2 = casimir_tensor(r.algebra(), 2);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    std::vector<cplx> xs, vals;
    while (xs.size() < 20) {
      const cplx x(u(rng), u(rng));
      if (r.distance_to_punctures(x) < 0.1) continue;
      const cplx v = casimir_amplitude(r, c2, straight(r.basepoint(), x));
      CHECK(std::abs(rel(v, direct_rational_W2C2(r, x))) < 1e-7);
      xs.push_back(x);
      vals.push_back(v);
    }
    CHECK(fit_rational(r, xs, vals, 2).residual < 1e-6);
  }
  const auto r = random_system(2, 3, 11);
  const auto c2 = casimir_tensor(r.algebra(), 2);
  const cplx x(0.15, -0.25);
  const Path route = straight(r.basepoint(), x);
  // conjugated basis
  Mat g = Mat::Identity(2, 2) + random_traceless(2, 8, 0.6);
  g /= std::sqrt(g.determinant());
  std::vector<Mat> basis;
  for (const auto& e : r.algebra().basis()) basis.push_back(g * e * g.inverse());
  CHECK(std::abs(rel(casimir_amplitude(r, c2, route, {}, &basis), casimir_amplitude(r, c2, route))) < 1e-9);
  // another lift of the same x
  GeneratorLayout layout(r);
  const Path lift = layout.loop(1).then(route);
  CHECK(std::abs(rel(casimir_amplitude(r, c2, lift), casimir_amplitude(r, c2, route))) < 1e-9);
  // decay at infinity
  const cplx v3 = direct_rational_W2C2(r, cplx(1e3, 2e3)), v4 = direct_rational_W2C2(r, cplx(1e4, 2e4));
  CHECK(std::abs(v3 / v4) == doctest::Approx(1e4).epsilon(1e-2));
  // double pole at a puncture
  const cplx z = r.punctures()[0];
  const Extrapolation lim = richardson([&](double h) { return h * h * direct_rational_W2C2(r, z + h); }, 0.05, 5);
  CHECK(std::abs(rel(lim.value, direct_rational_W2C2(r.algebra(), r.residues()[0]))) < 1e-8);
}
