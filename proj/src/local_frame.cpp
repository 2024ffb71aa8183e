#include "fuchs/local_frame.hpp"

#include <cmath>
#include <numbers>

#include "fuchs/transport.hpp"

namespace fuchs {

std::vector<Mat> frobenius_series(const FuchsianSystem& system, int j, double r_eval, std::vector<Mat>* b_out) {
  const CartanData& cd = system.cartan(j);
  const Mat& p = cd.eigenvectors();
  const Mat& pinv = cd.eigenvectors_inverse();
  const Vec& lam = cd.eigenvalues();
  const int n = system.n();
  const cplx zj = system.punctures()[j];

  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < system.num_punctures(); ++i)
    if (i != j) d = std::min(d, std::abs(system.punctures()[i] - zj));
  if (r_eval >= 0.9 * d) throw Error(ErrorKind::InvalidArgument, "evaluation radius outside the Frobenius disc");

  constexpr int kMax = 400;
  // B(u) = sum_{i != j} A_i / (u - (z_i - z_j)) = sum_m b_m u^m
  std::vector<Mat> bt;  // in the eigenbasis of A_j
  std::vector<Mat> b;
  std::vector<Mat> gt{Mat::Identity(n, n)};
  const double rho = r_eval / d;
  double scale = 1.0;
  int small = 0;
  for (int k = 1; k <= kMax; ++k) {
    Mat bm = Mat::Zero(n, n);
    for (int i = 0; i < system.num_punctures(); ++i) {
      if (i == j) continue;
      const cplx w = system.punctures()[i] - zj;
      bm -= system.residues()[i] * std::pow(w, -(k)) ;
    }
    b.push_back(bm);
    bt.push_back(pinv * bm * p);
    Mat r = Mat::Zero(n, n);
    for (int m = 0; m < k; ++m) r.noalias() += bt[m] * gt[k - 1 - m];
    Mat gk(n, n);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) gk(a, c) = r(a, c) / (static_cast<double>(k) - lam(a) + lam(c));
    gt.push_back(gk);
    const double term = gk.norm() * std::pow(r_eval, k);
    scale = std::max(scale, term);
    small = (term < 1e-17 * scale && std::pow(rho, k) < 1e-16) ? small + 1 : 0;
    if (small >= 2) break;
  }
  if (b_out) *b_out = b;
  std::vector<Mat> g;
  g.reserve(gt.size());
  for (const auto& m : gt) g.push_back(p * m * pinv);
  return g;
}

Mat LocalFrame::power(cplx u) const {
  const cplx lu = std::log(u);
  Vec d(eigenvalues.size());
  for (int k = 0; k < d.size(); ++k) d(k) = std::exp(eigenvalues(k) * lu);
  return p * d.asDiagonal() * p_inv;
}

Mat LocalFrame::series(cplx u) const {
  Mat out = g.back();
  for (int k = static_cast<int>(g.size()) - 2; k >= 0; --k) out = out * u + g[k];
  return out;
}

Mat LocalFrame::psi_near(cplx u) const { return series(u) * power(u) * psi_j; }

Mat LocalFrame::monodromy() const {
  Vec d(eigenvalues.size());
  for (int k = 0; k < d.size(); ++k) d(k) = std::exp(2.0 * std::numbers::pi * cplx(0, 1) * eigenvalues(k));
  return psi_j.inverse() * p * d.asDiagonal() * p_inv * psi_j;
}

Mat LocalFrame::cartan_part(const Mat& x) const {
  const Mat xt = p_inv * x * p;
  return p * Mat(xt.diagonal().asDiagonal()) * p_inv;
}

LocalFrame local_frame_at(const FuchsianSystem& system, int j, cplx s, const Mat& psi_s, bool verify) {
  system.require_valid();
  const CartanData& cd = system.cartan(j);
  LocalFrame f;
  f.j = j;
  f.eigenvalues = cd.eigenvalues();
  f.p = cd.eigenvectors();
  f.p_inv = cd.eigenvectors_inverse();
  f.match_point = s;
  const cplx zj = system.punctures()[j];
  const cplx u = s - zj;
  f.radius = std::numeric_limits<double>::infinity();
  for (int i = 0; i < system.num_punctures(); ++i)
    if (i != j) f.radius = std::min(f.radius, std::abs(system.punctures()[i] - zj));
  f.g = frobenius_series(system, j, std::abs(u), &f.b);
  f.psi_j = f.power(u).inverse() * f.series(u).inverse() * psi_s;

  if (verify) {
    // Match again at half the distance; the two constants must agree.
    const cplx s2 = zj + 0.5 * u;
    const Mat psi2 = transport_from(system, straight(s, s2), psi_s).matrix;
    const Mat psi_j2 = f.power(0.5 * u).inverse() * f.series(0.5 * u).inverse() * psi2;
    f.convergence_residual = (psi_j2 - f.psi_j).norm() / f.psi_j.norm();
    if (!(f.convergence_residual <= 1e-5))
      throw Error(ErrorKind::NoConvergence, "local frame does not converge toward the puncture");
  }
  return f;
}

LocalFrame local_frame(const FuchsianSystem& system, int j) {
  if (j < 0 || j >= system.num_punctures()) throw Error(ErrorKind::InvalidArgument, "puncture index out of range");
  GeneratorLayout layout(system);
  const Mat psi = transport(system, layout.spoke(j)).matrix;
  return local_frame_at(system, j, layout.spoke_point(j), psi);
}

}  // namespace fuchs
