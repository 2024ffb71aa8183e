#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "fuchs/error.hpp"

namespace fuchs {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Basis of sl_N in the fundamental realization, together with the Killing
/// form, the Killing-dual basis and the structure constants.
///
/// Basis ordering: off-diagonal elementary matrices E_ij in row-major order
/// (i != j), followed by the Cartan differences E_ii - E_{i+1,i+1}.
class LieAlgebra {
 public:
  static LieAlgebra sl(int n);

  int n() const { return n_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  int rank() const { return n_ - 1; }

  const std::vector<Mat>& basis() const { return basis_; }
  const std::vector<Mat>& dual() const { return dual_; }
  const Mat& gram() const { return gram_; }
  const Mat& gram_inverse() const { return gram_inv_; }

  /// f_{ab}^c with [e_a, e_b] = sum_c f_{ab}^c e_c.
  cplx structure(int a, int b, int c) const { return f_[(a * dim() + b) * dim() + c]; }

  /// Trace normalized so that trace_form(E F) equals the Killing form on sl_N.
  double trace_scale() const { return 2.0 * n_; }
  cplx trace_form(const Mat& x) const { return trace_scale() * x.trace(); }

  /// Killing form Tr_ad(ad_E ad_F), evaluated as 2N Tr(EF). Throws on
  /// non-traceless input.
  cplx killing(const Mat& e, const Mat& f) const;

  /// Killing form computed from explicitly built adjoint matrices.
  cplx killing_adjoint(const Mat& e, const Mat& f) const;

  /// Coordinates c_a with X = sum_a c_a e_a.
  Vec coords(const Mat& x) const;
  Mat from_coords(const Vec& c) const;

  /// Matrix of ad_X in the basis: column a holds coords([X, e_a]).
  Mat ad_matrix(const Mat& x) const;

  /// Matrix of Ad_g : X -> g X g^{-1} in the basis.
  Mat group_ad_matrix(const Mat& g) const;

  static Mat bracket(const Mat& a, const Mat& b) { return a * b - b * a; }

 private:
  int n_ = 0;
  std::vector<Mat> basis_;
  std::vector<Mat> dual_;
  Mat gram_;
  Mat gram_inv_;
  std::vector<cplx> f_;
};

/// Degree-i invariant tensor, stored with basis legs:
/// C = sum c^{a1...ai} e_{a1} (x) ... (x) e_{ai}.
struct CasimirTensor {
  int degree = 0;
  int dim = 0;
  std::vector<cplx> coeffs;

  cplx at(std::initializer_list<int> idx) const;

  /// Largest entry of the ad-action contraction over all basis elements.
  double invariance_defect(const LieAlgebra& algebra) const;
};

/// Degree 2: inverse Gram matrix. Degree 3 (N >= 3): symmetrized trace of
/// dual elements in the fundamental representation.
CasimirTensor casimir_tensor(const LieAlgebra& algebra, int degree);

/// One root of a regular semisimple pivot: ad_E v = value * v, with
/// v = P E_kl P^{-1} in the eigenbasis of E.
struct Root {
  cplx value;
  int k = 0;
  int l = 0;
  Mat vector;
};

struct Decomposition {
  Mat cartan;
  /// Coefficient of each root vector, in the order of CartanData::roots().
  std::vector<cplx> root_coeffs;
};

/// Cartan subalgebra (commutant of a regular semisimple pivot) and root
/// space decomposition relative to it.
class CartanData {
 public:
  CartanData(const LieAlgebra& algebra, const Mat& pivot, double rel_tol = 1e-8);

  const Mat& pivot() const { return pivot_; }
  const Vec& eigenvalues() const { return eigenvalues_; }
  const Mat& eigenvectors() const { return p_; }
  const Mat& eigenvectors_inverse() const { return p_inv_; }
  const std::vector<Mat>& cartan_basis() const { return cartan_basis_; }
  const std::vector<Root>& roots() const { return roots_; }

  Decomposition decompose(const Mat& x) const;
  Mat reconstruct(const Decomposition& d) const;
  Mat root_part(const Mat& x) const;
  /// Largest root coefficient of x relative to its norm (0 for elements of h).
  double root_content(const Mat& x) const;

 private:
  Mat pivot_;
  Vec eigenvalues_;
  Mat p_;
  Mat p_inv_;
  std::vector<Mat> cartan_basis_;
  std::vector<Root> roots_;
};

inline CartanData root_decomposition(const LieAlgebra& algebra, const Mat& e,
                                     double rel_tol = 1e-8) {
  return CartanData(algebra, e, rel_tol);
}

}  // namespace fuchs
