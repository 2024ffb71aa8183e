#include "fuchs/lie.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fuchs {

LieAlgebra LieAlgebra::sl(int n) {
  if (n < 2 || n > 5) {
    throw Error(ErrorKind::InvalidArgument, "sl_N supported for 2 <= N <= 5, got " + std::to_string(n));
  }
  LieAlgebra g;
  g.n_ = n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Mat e = Mat::Zero(n, n);
      e(i, j) = 1.0;
      g.basis_.push_back(e);
    }
  }
  for (int i = 0; i + 1 < n; ++i) {
    Mat h = Mat::Zero(n, n);
    h(i, i) = 1.0;
    h(i + 1, i + 1) = -1.0;
    g.basis_.push_back(h);
  }
  const int d = g.dim();
  g.gram_.resize(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) g.gram_(a, b) = g.trace_form(g.basis_[a] * g.basis_[b]);
  g.gram_inv_ = g.gram_.inverse();
  // e^a = sum_b (G^{-1})_{ba} e_b gives <e_a, e^b> = delta.
  g.dual_.assign(d, Mat::Zero(n, n));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) g.dual_[a] += g.gram_inv_(b, a) * g.basis_[b];

  g.f_.assign(static_cast<size_t>(d) * d * d, 0.0);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const Vec c = g.coords(bracket(g.basis_[a], g.basis_[b]));
      for (int k = 0; k < d; ++k) g.f_[(a * d + b) * d + k] = c(k);
    }
  }
  return g;
}

cplx LieAlgebra::killing(const Mat& e, const Mat& f) const {
  if (std::abs(e.trace()) > 1e-9 || std::abs(f.trace()) > 1e-9) {
    throw Error(ErrorKind::InvalidArgument, "Killing form requires traceless arguments");
  }
  return trace_form(e * f);
}

cplx LieAlgebra::killing_adjoint(const Mat& e, const Mat& f) const {
  return (ad_matrix(e) * ad_matrix(f)).trace();
}

Vec LieAlgebra::coords(const Mat& x) const {
  Vec c(dim());
  for (int a = 0; a < dim(); ++a) c(a) = trace_form(dual_[a] * x);
  return c;
}

Mat LieAlgebra::from_coords(const Vec& c) const {
  Mat x = Mat::Zero(n_, n_);
  for (int a = 0; a < dim(); ++a) x += c(a) * basis_[a];
  return x;
}

Mat LieAlgebra::ad_matrix(const Mat& x) const {
  Mat ad(dim(), dim());
  for (int a = 0; a < dim(); ++a) ad.col(a) = coords(bracket(x, basis_[a]));
  return ad;
}

Mat LieAlgebra::group_ad_matrix(const Mat& gmat) const {
  const Mat ginv = gmat.inverse();
  Mat ad(dim(), dim());
  for (int a = 0; a < dim(); ++a) ad.col(a) = coords(gmat * basis_[a] * ginv);
  return ad;
}

cplx CasimirTensor::at(std::initializer_list<int> idx) const {
  size_t flat = 0;
  for (int i : idx) flat = flat * dim + static_cast<size_t>(i);
  return coeffs[flat];
}

double CasimirTensor::invariance_defect(const LieAlgebra& g) const {
  const size_t total = coeffs.size();
  double worst = 0.0;
  std::vector<int> idx(degree);
  for (int d = 0; d < dim; ++d) {
    std::vector<cplx> out(total, 0.0);
    for (size_t flat = 0; flat < total; ++flat) {
      const cplx c = coeffs[flat];
      if (c == cplx(0.0)) continue;
      size_t rem = flat;
      for (int s = degree - 1; s >= 0; --s) {
        idx[s] = static_cast<int>(rem % dim);
        rem /= dim;
      }
      for (int s = 0; s < degree; ++s) {
        const int a = idx[s];
        for (int b = 0; b < dim; ++b) {
          const cplx f = g.structure(d, a, b);
          if (f == cplx(0.0)) continue;
          size_t target = 0;
          for (int t = 0; t < degree; ++t) target = target * dim + static_cast<size_t>(t == s ? b : idx[t]);
          out[target] += f * c;
        }
      }
    }
    for (const cplx& v : out) worst = std::max(worst, std::abs(v));
  }
  return worst;
}

CasimirTensor casimir_tensor(const LieAlgebra& g, int degree) {
  CasimirTensor c;
  c.degree = degree;
  c.dim = g.dim();
  const int d = g.dim();
  if (degree == 2) {
    c.coeffs.resize(static_cast<size_t>(d) * d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) c.coeffs[a * d + b] = g.gram_inverse()(a, b);
    return c;
  }
  if (degree == 3 && g.n() >= 3) {
    c.coeffs.assign(static_cast<size_t>(d) * d * d, 0.0);
    const auto& up = g.dual();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const Mat ab = up[a] * up[b];
        const Mat ba = up[b] * up[a];
        for (int k = 0; k < d; ++k) {
          const cplx v = 0.5 * ((ab * up[k]).trace() + (ba * up[k]).trace());
          c.coeffs[(static_cast<size_t>(a) * d + b) * d + k] = std::abs(v) < 1e-15 ? cplx(0.0) : v;
        }
      }
    return c;
  }
  throw Error(ErrorKind::UnsupportedDegree,
              "Casimir of degree " + std::to_string(degree) + " unsupported for sl_" + std::to_string(g.n()));
}

CartanData::CartanData(const LieAlgebra& g, const Mat& pivot, double rel_tol) : pivot_(pivot) {
  const int n = g.n();
  Eigen::ComplexEigenSolver<Mat> es(pivot);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NonGenericElement, "eigen-decomposition failed");
  eigenvalues_ = es.eigenvalues();
  p_ = es.eigenvectors();

  double scale = 0.0;
  for (int k = 0; k < n; ++k) scale = std::max(scale, std::abs(eigenvalues_(k)));
  if (scale == 0.0) throw Error(ErrorKind::NonGenericElement, "pivot has zero spectrum");
  const double gap = rel_tol * scale;
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l)
      if (std::abs(eigenvalues_(k) - eigenvalues_(l)) <= gap)
        throw Error(ErrorKind::NonGenericElement, "ad_E has a zero eigenspace larger than the rank");

  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      roots_.push_back({eigenvalues_(k) - eigenvalues_(l), k, l, Mat()});
    }
  for (size_t a = 0; a < roots_.size(); ++a)
    for (size_t b = a + 1; b < roots_.size(); ++b)
      if (std::abs(roots_[a].value - roots_[b].value) <= gap)
        throw Error(ErrorKind::NonGenericElement, "nonzero eigenvalues of ad_E collide");

  p_inv_ = p_.inverse();
  const double cond = p_.norm() * p_inv_.norm();
  if (!std::isfinite(cond) || cond > 1.0 / rel_tol)
    throw Error(ErrorKind::NonGenericElement, "pivot is not diagonalizable to working accuracy");

  for (auto& r : roots_) {
    Mat unit = Mat::Zero(n, n);
    unit(r.k, r.l) = 1.0;
    r.vector = p_ * unit * p_inv_;
  }
  for (int i = 0; i + 1 < n; ++i) {
    Mat h = Mat::Zero(n, n);
    h(i, i) = 1.0;
    h(i + 1, i + 1) = -1.0;
    cartan_basis_.push_back(p_ * h * p_inv_);
  }
}

Decomposition CartanData::decompose(const Mat& x) const {
  const Mat xt = p_inv_ * x * p_;
  Decomposition d;
  d.cartan = p_ * Mat(xt.diagonal().asDiagonal()) * p_inv_;
  d.root_coeffs.reserve(roots_.size());
  for (const auto& r : roots_) d.root_coeffs.push_back(xt(r.k, r.l));
  return d;
}

Mat CartanData::reconstruct(const Decomposition& d) const {
  Mat x = d.cartan;
  for (size_t i = 0; i < roots_.size(); ++i) x += d.root_coeffs[i] * roots_[i].vector;
  return x;
}

Mat CartanData::root_part(const Mat& x) const {
  Mat xt = p_inv_ * x * p_;
  xt.diagonal().setZero();
  return p_ * xt * p_inv_;
}

double CartanData::root_content(const Mat& x) const {
  const double nx = x.norm();
  if (nx == 0.0) return 0.0;
  return root_part(x).norm() / nx;
}

}  // namespace fuchs
