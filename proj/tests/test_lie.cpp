#include <doctest.h>

#include <random>

#include "fuchs/lie.hpp"
#include "fuchs/samples.hpp"

using namespace fuchs;

TEST_CASE("sl_N dimensions and dual basis") {
  CHECK(LieAlgebra::sl(2).dim() == 3);
  CHECK(LieAlgebra::sl(3).dim() == 8);
  CHECK_THROWS_AS(LieAlgebra::sl(1), Error);
  CHECK_THROWS_AS(LieAlgebra::sl(6), Error);
  for (int n = 2; n <= 4; ++n) {
    const auto g = LieAlgebra::sl(n);
    for (int a = 0; a < g.dim(); ++a) {
      CHECK(std::abs(g.basis()[a].trace()) < 1e-12);
      for (int b = 0; b < g.dim(); ++b) {
        const double want = a == b ? 1.0 : 0.0;
        CHECK(std::abs(g.killing(g.basis()[a], g.dual()[b]) - want) < 1e-10);
      }
      // sum_b <e_a, e^b> e_b reconstructs e_a
      Mat r = Mat::Zero(n, n);
      for (int b = 0; b < g.dim(); ++b) r += g.killing(g.basis()[a], g.dual()[b]) * g.basis()[b];
      CHECK((r - g.basis()[a]).norm() < 1e-10);
    }
  }
}

TEST_CASE("Killing form matches the adjoint trace") {
  const auto g = LieAlgebra::sl(2);
  Mat h = Mat::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = -1.0;
  CHECK(std::abs(g.killing(h, h) - 8.0) < 1e-12);
  CHECK(std::abs(g.killing_adjoint(h, h) - 8.0) < 1e-12);
  CHECK(std::abs(g.killing(Mat::Zero(2, 2), h)) == 0.0);
  CHECK_THROWS_AS(g.killing(Mat::Identity(2, 2), h), Error);

  for (int n = 2; n <= 4; ++n) {
    const auto gn = LieAlgebra::sl(n);
    const Mat e = random_traceless(n, 1), f = random_traceless(n, 2), k = random_traceless(n, 3);
    CHECK(std::abs(gn.killing(e, f) - gn.killing_adjoint(e, f)) < 1e-10);
    const cplx lhs = gn.killing_adjoint(LieAlgebra::bracket(e, f), k);
    const cplx rhs = -gn.killing_adjoint(f, LieAlgebra::bracket(e, k));
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("Jacobi identity on structure constants") {
  const auto g = LieAlgebra::sl(3);
  const int d = g.dim();
  double worst = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          cplx s = 0.0;
          for (int m = 0; m < d; ++m)
            s += g.structure(a, b, m) * g.structure(m, c, e) + g.structure(b, c, m) * g.structure(m, a, e) +
                 g.structure(c, a, m) * g.structure(m, b, e);
          worst = std::max(worst, std::abs(s));
        }
  CHECK(worst < 1e-12);
}

TEST_CASE("root decomposition") {
  const auto g = LieAlgebra::sl(2);
  Mat e = Mat::Zero(2, 2);
  e(0, 0) = 0.7;
  e(1, 1) = -0.7;
  const CartanData cd = root_decomposition(g, e);
  REQUIRE(cd.roots().size() == 2);
  std::vector<double> vals;
  for (const auto& r : cd.roots()) vals.push_back(r.value.real());
  std::sort(vals.begin(), vals.end());
  CHECK(vals[0] == doctest::Approx(-1.4).epsilon(1e-12));
  CHECK(vals[1] == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(cd.cartan_basis().size() == 1);

  const Mat f = 2.5 * e;
  const Decomposition df = cd.decompose(f);
  CHECK((df.cartan - f).norm() < 1e-12);
  for (const auto& c : df.root_coeffs) CHECK(std::abs(c) < 1e-12);

  Mat nil = Mat::Zero(2, 2);
  nil(0, 1) = 1.0;
  CHECK_THROWS_AS(root_decomposition(g, nil), Error);

  for (int n = 2; n <= 5; ++n) {
    const auto gn = LieAlgebra::sl(n);
    const Mat p = random_traceless(n, 10 + n), x = random_traceless(n, 20 + n);
    const CartanData c(gn, p);
    CHECK(static_cast<int>(c.roots().size()) + gn.rank() == gn.dim());
    for (const auto& r : c.roots()) {
      CHECK((LieAlgebra::bracket(p, r.vector) - r.value * r.vector).norm() < 1e-9 * (1.0 + r.vector.norm()));
      bool has_opposite = false;
      for (const auto& s : c.roots()) has_opposite |= std::abs(s.value + r.value) < 1e-9;
      CHECK(has_opposite);
    }
    const Decomposition dx = c.decompose(x);
    CHECK((c.reconstruct(dx) - x).norm() < 1e-9);
    const Decomposition dd = c.decompose(c.reconstruct(dx));
    CHECK((dd.cartan - dx.cartan).norm() < 1e-10);
    CHECK(LieAlgebra::bracket(dx.cartan, p).norm() < 1e-9);
  }
}

TEST_CASE("Casimir tensors") {
  const auto g2 = LieAlgebra::sl(2);
  const auto c2 = casimir_tensor(g2, 2);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) CHECK(std::abs(c2.at({a, b}) - g2.gram_inverse()(a, b)) < 1e-15);
  CHECK(c2.invariance_defect(g2) < 1e-10);
  CHECK_THROWS_AS(casimir_tensor(g2, 3), Error);
  CHECK_THROWS_AS(casimir_tensor(g2, 4), Error);

  const auto g3 = LieAlgebra::sl(3);
  CHECK(casimir_tensor(g3, 2).invariance_defect(g3) < 1e-10);
  const auto c3 = casimir_tensor(g3, 3);
  CHECK(c3.invariance_defect(g3) < 1e-10);
  double norm = 0.0;
  for (const auto& v : c3.coeffs) norm += std::norm(v);
  CHECK(norm > 1e-6);
}
