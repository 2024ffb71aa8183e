#include <doctest.h>

#include "fuchs/local_frame.hpp"
#include "fuchs/samples.hpp"
#include "fuchs/transport.hpp"

using namespace fuchs;

TEST_CASE("two-pole local frame against the closed form") {
  const auto s = two_pole_sl2(0.3, 0.0, 1.0);
  const LocalFrame f = local_frame(s, 0);
  const cplx x0 = s.basepoint(), z1 = 0.0, z2 = 1.0;
  const cplx u = f.match_point - z1;
  // Psi(x) = exp(A_1 [L(x) - L(x0)]) with L = log((x - z1)/(x - z2)); the
  // spoke stays off the cut [z1, z2].
  const cplx c = std::log((f.match_point - z1) / (f.match_point - z2)) - std::log((x0 - z1) / (x0 - z2)) -
                 std::log(u) + std::log(1.0 - u / (z2 - z1));
  const Mat& a1 = s.residues()[0];
  Mat want = Mat::Zero(2, 2);
  want(0, 0) = std::exp(a1(0, 0) * c);
  want(1, 1) = std::exp(a1(1, 1) * c);
  CHECK((f.psi_j - want).norm() < 1e-8);
  CHECK(f.convergence_residual < 1e-8);
}

TEST_CASE("local monodromy reconstruction") {
  for (auto [n, np, seed] : {std::tuple{2, 3, 11}, std::tuple{3, 3, 4}, std::tuple{2, 4, 9}}) {
    const auto s = random_system(n, np, seed);
    for (int j = 0; j < np; ++j) {
      const LocalFrame f = local_frame(s, j);
      CHECK((f.monodromy() - generator_monodromy(s, j)).norm() < 1e-6);
      // Psi near z_j from the frame agrees with transport off the spoke.
      GeneratorLayout layout(s);
      const cplx x = s.punctures()[j] + 3.0 * s.clearance() * layout.spoke_direction(j) * cplx(0.8, 0.6);
      const Mat t = transport(s, layout.spoke(j).then(straight(layout.spoke_point(j), x))).matrix;
      CHECK((f.psi_near(x - s.punctures()[j]) - t).norm() < 1e-8 * t.norm());
    }
  }
}

TEST_CASE("frame of a resonant system is refused") {
  const auto s = two_pole_sl2(0.5);
  CHECK_THROWS_AS(local_frame(s, 0), Error);
}
