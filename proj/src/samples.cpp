#include "fuchs/samples.hpp"

#include <numbers>
#include <random>

namespace fuchs {

namespace {

Mat draw_traceless(int n, std::mt19937_64& rng, double size) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  m -= (m.trace() / static_cast<double>(n)) * Mat::Identity(n, n);
  return m * (size / m.norm());
}

}  // namespace

FuchsianSystem two_pole_sl2(cplx a, cplx z1, cplx z2, SystemOptions options) {
  Mat a1 = Mat::Zero(2, 2);
  a1(0, 0) = a;
  a1(1, 1) = -a;
  return FuchsianSystem(LieAlgebra::sl(2), {z1, z2}, {a1, Mat(-a1)}, options);
}

Mat random_traceless(int n, std::uint64_t seed, double size) {
  std::mt19937_64 rng(seed);
  return draw_traceless(n, rng, size);
}

FuchsianSystem random_system(int n, int num_punctures, std::uint64_t seed, double size, SystemOptions options) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.15, 0.15);
  const LieAlgebra g = LieAlgebra::sl(n);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<cplx> z;
    for (int j = 0; j < num_punctures; ++j) {
      const double th = 2.0 * std::numbers::pi * j / num_punctures + u(rng);
      z.push_back(std::polar(1.0 + u(rng), th));
    }
    std::vector<Mat> a;
    Mat sum = Mat::Zero(n, n);
    for (int j = 0; j + 1 < num_punctures; ++j) {
      a.push_back(draw_traceless(n, rng, size));
      sum += a.back();
    }
    a.push_back(-sum);
    FuchsianSystem s(g, z, a, options);
    if (s.valid()) return s;
  }
  throw Error(ErrorKind::InvalidSystem, "could not draw a valid random system");
}

}  // namespace fuchs
