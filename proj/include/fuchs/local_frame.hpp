#pragma once

#include <vector>

#include "fuchs/system.hpp"

namespace fuchs {

/// Frobenius data at a puncture: near z_j the solution normalized at the
/// basepoint reads Psi(x) = G(u) u^{A_j} Psi_j with u = x - z_j, G(0) = Id,
/// and u^{A_j} = P diag(u^lambda) P^{-1} on the principal branch at the
/// matching point.
struct LocalFrame {
  int j = 0;
  Vec eigenvalues;
  Mat p;
  Mat p_inv;
  Mat psi_j;
  /// Point where the frame was matched to the transported solution.
  cplx match_point;
  /// Taylor coefficients of G and of A(x) - A_j / u around z_j.
  std::vector<Mat> g;
  std::vector<Mat> b;
  /// Radius of convergence of G (distance to the nearest other puncture).
  double radius = 0.0;
  /// Relative change of Psi_j when matching at half the distance.
  double convergence_residual = 0.0;

  Mat power(cplx u) const;  ///< u^{A_j}, principal branch
  Mat series(cplx u) const;
  /// Psi(z_j + u) continued from the match point without winding.
  Mat psi_near(cplx u) const;
  /// Psi_j^{-1} e^{2 pi i A_j} Psi_j.
  Mat monodromy() const;
  /// Cartan projection relative to A_j (in the eigenbasis of A_j).
  Mat cartan_part(const Mat& x) const;
  /// E_j such that M(x.E) -> G E_j G^{-1} plus root terms, i.e. the Cartan
  /// part of Psi_j E Psi_j^{-1}.
  Mat local_value(const Mat& e) const { return cartan_part(psi_j * e * psi_j.inverse()); }
};

/// Frame at puncture j matched on the standard spoke from the basepoint.
LocalFrame local_frame(const FuchsianSystem& system, int j);

/// Frame matched at `s` (in the disc around z_j) given Psi(s); the branch
/// of u^{A_j} is the principal one at s - z_j.
LocalFrame local_frame_at(const FuchsianSystem& system, int j, cplx s, const Mat& psi_s, bool verify = true);

/// Frobenius coefficients of G up to the order needed at |u| <= r_eval.
std::vector<Mat> frobenius_series(const FuchsianSystem& system, int j, double r_eval, std::vector<Mat>* b = nullptr);

}  // namespace fuchs
