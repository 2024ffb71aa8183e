#include <doctest.h>

#include <numbers>

#include "fuchs/samples.hpp"
#include "fuchs/transport.hpp"

using namespace fuchs;

namespace {

Mat closed_form(const FuchsianSystem& s, cplx x0, cplx x) {
  const cplx z1 = s.punctures()[0], z2 = s.punctures()[1];
  const cplx l = std::log((x - z1) / (x - z2)) - std::log((x0 - z1) / (x0 - z2));
  const Mat& a = s.residues()[0];
  Mat t = Mat::Zero(2, 2);
  t(0, 0) = std::exp(a(0, 0) * l);
  t(1, 1) = std::exp(a(1, 1) * l);
  return t;
}

}  // namespace

TEST_CASE("two-pole closed form") {
  const auto s = two_pole_sl2(0.3);
  const cplx x0 = s.basepoint();
  for (cplx x : {cplx(0.5, -0.4), cplx(-0.7, -0.2), cplx(1.3, 0.01), cplx(0.2, -0.05)}) {
    const auto r = transport(s, straight(x0, x));
    const Mat want = closed_form(s, x0, x);
    CHECK((r.matrix - want).norm() / want.norm() < 1e-8);
    CHECK(r.det_defect < 1e-9);
  }
  const auto id = transport(s, Path({x0}));
  CHECK((id.matrix - Mat::Identity(2, 2)).norm() == 0.0);

  const Path p({x0, cplx(0.4, 0.5), cplx(1.5, -0.3)});
  const Mat fwd = transport(s, p).matrix;
  const Mat back = transport(s, p.reversed()).matrix;
  CHECK((back * fwd - Mat::Identity(2, 2)).norm() < 1e-9);

  const Mat s1 = monodromy(s, LoopWord::parse("g1"));
  Eigen::ComplexEigenSolver<Mat> es(s1);
  const cplx e1 = std::exp(cplx(0, 2 * std::numbers::pi * 0.3));
  for (int k = 0; k < 2; ++k) {
    const cplx v = es.eigenvalues()(k);
    CHECK(std::min(std::abs(v - e1), std::abs(v - 1.0 / e1)) < 1e-8);
  }
  CHECK((monodromy(s, LoopWord::parse("g1 g1^-1")) - Mat::Identity(2, 2)).norm() < 1e-10);
}

TEST_CASE("loop words") {
  const auto w = LoopWord::parse("g1 g2^-1 g3^2");
  CHECK(w.letters.size() == 4);
  CHECK(w.str() == "g1 g2^-1 g3 g3");
  CHECK(w.inverse().str() == "g3^-1 g3^-1 g2 g1^-1");
  CHECK_THROWS_AS(LoopWord::parse("h1"), Error);
  CHECK_THROWS_AS(LoopWord::parse("g0"), Error);
}

TEST_CASE("monodromy relations on a random system") {
  const auto s = random_system(2, 3, 11);
  const Mat id = Mat::Identity(2, 2);
  const Mat rel = monodromy(s, relation_word(s));
  CHECK((rel - id).norm() < 1e-8);

  GeneratorLayout layout(s);
  const Mat direct = transport(s, relation_word(s).realize(layout)).matrix;
  CHECK((direct - id).norm() < 1e-8);

  // decorated words
  const Mat s1 = monodromy(s, LoopWord::parse("g1"));
  const Mat dec = monodromy(s, LoopWord::parse("g1 g2 g3 g3^-1 g2^-1"));
  CHECK((dec - s1).norm() < 1e-9);

  // basepoint moved along the loop
  for (int j = 0; j < 3; ++j) {
    const Mat sj = generator_monodromy(s, j);
    const Path to_spoke = layout.spoke(j);
    const Mat t01 = transport(s, to_spoke).matrix;
    const Mat around = transport_from(s, layout.circle(j), t01).matrix;
    const Mat rebased = t01.inverse() * around;
    CHECK((rebased - sj).norm() < 1e-8);
    CHECK(std::abs(sj.determinant() - 1.0) < 1e-9);
  }

  // homotopic perturbation of interior vertices
  const Path p({s.basepoint(), cplx(0.1, 0.05), cplx(-0.2, 0.3), cplx(0.05, -0.1)});
  Path q = p;
  q.vertices[1] += cplx(0.3, -0.2) * s.clearance();
  q.vertices[2] += cplx(-0.4, 0.1) * s.clearance();
  const Mat tp = transport(s, p).matrix, tq = transport(s, q).matrix;
  CHECK((tp - tq).norm() <= 10 * s.transport_tol());
}

TEST_CASE("clearance and bundle points") {
  const auto s = two_pole_sl2(0.3);
  const Path close = Path({s.basepoint(), cplx(0.5, 1.0), cplx(0.0, s.clearance() / 3)});
  CHECK_THROWS_AS(transport(s, close), Error);
  const Mat e = s.residues()[0] * 2.0;
  const BundlePoint p = point_at(s, cplx(0.3, 0.7), e);
  CHECK((evaluate_M(s, p) - e).norm() < 1e-10);
  CHECK(evaluate_M(s, point_at(s, cplx(0.3, 0.7), Mat::Zero(2, 2))).norm() == 0.0);

  const auto r = random_system(3, 3, 5);
  const Mat f = random_traceless(3, 17);
  const cplx x(0.2, 0.1);
  const BundlePoint px = point_at(r, x, f);
  const Mat m = evaluate_M(r, px);
  // M' = [A, M]
  const double h = 1e-5;
  const Mat mp = evaluate_M(r, BundlePoint{px.route.then(straight(x, x + h)), f});
  const Mat mm = evaluate_M(r, BundlePoint{Path({r.basepoint(), x - h}), f});
  const Mat deriv = (mp - mm) / (2 * h);
  CHECK((deriv - LieAlgebra::bracket(r.connection_at(x), m)).norm() < 1e-6);

  // equivariance under going around a loop
  GeneratorLayout layout(r);
  const Mat s1 = generator_monodromy(r, 0);
  const Path around = layout.loop(0).then(straight(r.basepoint(), x));
  const Mat m2 = evaluate_M(r, BundlePoint{around, Mat(s1.inverse() * f * s1)});
  CHECK((m2 - m).norm() < 1e-8);
}

TEST_CASE("W1 integral along a path") {
  const auto s = two_pole_sl2(0.3);
  const Mat e = s.residues()[0] * cplx(0.4, 1.1);
  const cplx x0 = s.basepoint(), x = cplx(0.6, -0.3);
  const Mat id = Mat::Identity(2, 2);
  const auto [val, end] = integrate_w1(s, straight(x0, x), id, e);
  const cplx z1 = 0.0, z2 = 1.0;
  const cplx want = s.algebra().killing(s.residues()[0], e) *
                    (std::log((x - z1) / (x - z2)) - std::log((x0 - z1) / (x0 - z2)));
  CHECK(std::abs(val - want) < 1e-8 * std::abs(want));
  CHECK((end - closed_form(s, x0, x)).norm() < 1e-9);
}
