#pragma once

#include <functional>
#include <vector>

#include "fuchs/lie.hpp"
#include "fuchs/local_frame.hpp"
#include "fuchs/transport.hpp"

namespace fuchs {

constexpr int kMaxAmplitudePoints = 8;

/// Transported data of one bundle point: position, Psi, Psi^{-1} and E.
struct PointFrame {
  cplx x;
  Mat psi;
  Mat psi_inv;
  Mat e;
};

PointFrame frame_of(const FuchsianSystem& system, const BundlePoint& point);
std::vector<PointFrame> frames_of(const FuchsianSystem& system, const std::vector<BundlePoint>& points);

/// K(x, y) = Psi(x)^{-1} Psi(y) / (y - x), regularized to Psi(x)^{-1} A(x) Psi(y)
/// when the projections coincide within 1e-9 * scale.
Mat kernel(const FuchsianSystem& system, const PointFrame& x, const PointFrame& y);
Mat kernel(const FuchsianSystem& system, const BundlePoint& x, const BundlePoint& y);

/// Connected amplitude W_n, sum over circular permutations.
cplx w_connected(const FuchsianSystem& system, const std::vector<PointFrame>& points);
cplx w_connected(const FuchsianSystem& system, const std::vector<BundlePoint>& points);

/// Disconnected amplitude, full signed permutation sum.
cplx w_disconnected(const FuchsianSystem& system, const std::vector<PointFrame>& points);
cplx w_disconnected(const FuchsianSystem& system, const std::vector<BundlePoint>& points);

/// Sum over set partitions of products of connected amplitudes.
cplx w_from_partitions(const FuchsianSystem& system, const std::vector<PointFrame>& points);

struct ShortDistanceReport {
  std::vector<double> separations;
  std::vector<cplx> remainders;
  /// max |remainder| / min |remainder|
  double spread = 0.0;
  bool pass = false;
};

/// Approaches X_1 = [x_1.E_1] to X_2 along x_1 = x_2 + eps * direction on
/// the lift of X_2 and subtracts the double and simple pole terms.
ShortDistanceReport short_distance_check(const FuchsianSystem& system, const Mat& e1, const BundlePoint& x2,
                                         cplx direction, const std::vector<BundlePoint>& extras,
                                         double eps = 0.0);

struct PunctureAsymptoticsReport {
  cplx residue;            ///< extrapolated simple-pole coefficient
  cplx predicted_residue;  ///< <A_j, E_j> W_{n-1}(extras)
  double residue_error = 0.0;
  std::vector<cplx> root_values;    ///< r(A_j)
  std::vector<cplx> fitted_exponents;
  double exponent_error = 0.0;      ///< worst relative error
  bool pass = false;
};

/// Simple-pole coefficient of W^_n(x.E, extras) at z_j for E in the
/// conjugated Cartan subalgebra Psi_j^{-1} h_j Psi_j, and power-law exponents
/// of W^_n(x.Psi_j^{-1} E_r Psi_j, extras) for every root.
PunctureAsymptoticsReport puncture_asymptotics_check(const FuchsianSystem& system, int j, const Mat& cartan_e,
                                                     const std::vector<BundlePoint>& extras);

/// Plain Casimir amplitude: sum c^{a...} W^(x.e_{a1}, ..., extras) with all
/// Casimir legs on `route` (which ends at x) and the regularized kernel.
/// `basis` replaces the algebra basis (e.g. by a conjugated one).
cplx casimir_amplitude(const FuchsianSystem& system, const CasimirTensor& tensor, const Path& route,
                       const std::vector<BundlePoint>& extras = {}, const std::vector<Mat>* basis = nullptr);

/// sum_a ( -Tr(e_a A e^a A) + Tr(e_a A) Tr(e^a A) ) from A(x) alone.
cplx direct_rational_W2C2(const FuchsianSystem& system, cplx x);
/// The same quadratic expression for an arbitrary element in place of A(x).
cplx direct_rational_W2C2(const LieAlgebra& algebra, const Mat& a);

/// sum_a Tr(A(x)^2 e_a e^a), the extra term of the normal-ordered amplitude.
cplx normal_order_correction_W2C2(const FuchsianSystem& system, cplx x);

/// Normal-ordered Casimir amplitude, residues read off algebraically from
/// Laurent expansions of the transport around x (degrees 2 and 3).
cplx normal_ordered_casimir_amplitude(const FuchsianSystem& system, const CasimirTensor& tensor,
                                      const Path& route, const std::vector<BundlePoint>& extras = {});

/// Same quantity from trapezoidal quadrature on circles around x.
cplx normal_ordered_quadrature(const FuchsianSystem& system, const CasimirTensor& tensor, const Path& route,
                               const std::vector<BundlePoint>& extras = {}, double radius = 0.0,
                               int nodes = 64);

struct RationalFit {
  Vec coefficients;
  double residual = 0.0;  ///< relative 2-norm residual
};

/// Least-squares fit by a constant plus poles 1/(x - z_j)^k, k <= order, at
/// the punctures, and poles up to `extra_order` at `extra_poles`.
RationalFit fit_rational(const FuchsianSystem& system, const std::vector<cplx>& xs, const std::vector<cplx>& values,
                         int order, const std::vector<cplx>& extra_poles = {}, int extra_order = 0);

struct ChargeResult {
  cplx value;
  double extrapolation_error = 0.0;
};

/// q_j^i = lim (x - z_j)^i W^(C_i(x)) along the spoke (normal-ordered Casimir).
ChargeResult extract_charge(const FuchsianSystem& system, int degree, int j);

/// Coefficient of (x - z_j)^{-2} in direct_rational_W2C2 + correction, from a
/// contour integral of the rational expression.
cplx charge_oracle_degree2(const FuchsianSystem& system, int j);

/// Richardson extrapolation of f(r0 / 2^k) -> f(0) for f analytic in r.
struct Extrapolation {
  cplx value;
  double error = 0.0;
};
Extrapolation richardson(const std::function<cplx(double)>& f, double r0, int levels = 6);

}  // namespace fuchs
