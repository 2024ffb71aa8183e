#include <cmath>
#include <numbers>

#include "amplitude_sums.hpp"
#include "fuchs/amplitudes.hpp"
#include "fuchs/combinatorics.hpp"

namespace fuchs {

namespace {

/// Truncated Laurent series in (u1, u2) with matrix (or scalar) coefficients
/// on the window [l1, h1] x [l2, h2]. Only nonzero slots are stored densely
/// and flagged, so that sparse series multiply cheaply.
template <typename T>
class BiSeries {
 public:
  BiSeries(int l1, int h1, int l2, int h2, T zero)
      : l1_(l1), h1_(h1), l2_(l2), h2_(h2), w1_(h1 - l1 + 1), zero_(zero) {
    c_.assign(static_cast<size_t>(w1_) * (h2 - l2 + 1), zero);
    used_.assign(c_.size(), 0);
  }

  bool inside(int p1, int p2) const { return p1 >= l1_ && p1 <= h1_ && p2 >= l2_ && p2 <= h2_; }
  void add(int p1, int p2, const T& v) {
    if (!inside(p1, p2)) return;
    const size_t k = slot(p1, p2);
    if (used_[k]) {
      c_[k] += v;
    } else {
      c_[k] = v;
      used_[k] = 1;
    }
  }
  T at(int p1, int p2) const { return inside(p1, p2) && used_[slot(p1, p2)] ? c_[slot(p1, p2)] : zero_; }

  template <typename F>
  void each(F&& f) const {
    for (size_t k = 0; k < c_.size(); ++k)
      if (used_[k]) f(static_cast<int>(k % w1_) + l1_, static_cast<int>(k / w1_) + l2_, c_[k]);
  }

  BiSeries like() const { return BiSeries(l1_, h1_, l2_, h2_, zero_); }

  template <typename S, typename U, typename Op>
  BiSeries<U> combine(const BiSeries<S>& o, U zero, Op op) const {
    BiSeries<U> out(l1_, h1_, l2_, h2_, zero);
    each([&](int a1, int a2, const T& x) {
      o.each([&](int b1, int b2, const S& y) {
        if (out.inside(a1 + b1, a2 + b2)) out.add(a1 + b1, a2 + b2, op(x, y));
      });
    });
    return out;
  }

  /// Coefficient of u1^0 u2^0 of the product with `o` under `op`.
  template <typename U, typename Op>
  U constant_of_product(const BiSeries& o, U zero, Op op) const {
    U acc = zero;
    each([&](int a1, int a2, const T& x) {
      if (o.inside(-a1, -a2) && o.used_[o.slot(-a1, -a2)]) acc += op(x, o.c_[o.slot(-a1, -a2)]);
    });
    return acc;
  }

 private:
  template <typename>
  friend class BiSeries;
  size_t slot(int p1, int p2) const { return static_cast<size_t>(p2 - l2_) * w1_ + (p1 - l1_); }

  int l1_, h1_, l2_, h2_, w1_;
  T zero_;
  std::vector<T> c_;
  std::vector<char> used_;
};

using MatSeries = BiSeries<Mat>;
using ScalarSeries = BiSeries<cplx>;

struct Window {
  int l1, h1, l2, h2;
};

/// Laurent data of the Casimir legs at x + u_var (var 0: at x itself).
class LocalExpansion {
 public:
  LocalExpansion(const FuchsianSystem& system, const Mat& psi, cplx x, Window w, int order)
      : system_(system), psi_(psi), psi_inv_(psi.inverse()), x_(x), w_(w), order_(order) {
    step_ = taylor_series(system, x, order, true);
  }

  MatSeries zero_series() const {
    const int n = system_.n();
    return MatSeries(w_.l1, w_.h1, w_.l2, w_.h2, Mat::Zero(n, n));
  }

  /// Univariate Taylor series placed on variable `var`.
  MatSeries place(const std::vector<Mat>& coeffs, int var, const Mat& left, const Mat& right) const {
    MatSeries s = zero_series();
    if (var == 0) {
      s.add(0, 0, left * coeffs[0] * right);
      return s;
    }
    for (int k = 0; k < static_cast<int>(coeffs.size()) && k <= (var == 1 ? w_.h1 : w_.h2); ++k)
      s.add(var == 1 ? k : 0, var == 2 ? k : 0, left * coeffs[k] * right);
    return s;
  }

  /// Psi(x)^{-1} V(u_a) U(u_b) Psi(x) as a series (a != b).
  MatSeries vu(int a, int b) const {
    const MatSeries v = place(step_.v, a, psi_inv_, Mat::Identity(system_.n(), system_.n()));
    const MatSeries u = place(step_.u, b, Mat::Identity(system_.n(), system_.n()), psi_);
    return v.combine(u, Mat(Mat::Zero(system_.n(), system_.n())), [](const Mat& p, const Mat& q) { return Mat(p * q); });
  }

  /// 1/(u_b - u_a) expanded in |u2| < |u1|, scalar coefficients.
  ScalarSeries inverse_difference(int a, int b) const {
    ScalarSeries s(w_.l1, w_.h1, w_.l2, w_.h2, 0.0);
    auto diff = [&](int hi, int lo, double sign) {
      // sign / (u_hi - u_lo) with |u_lo| < |u_hi|
      if (lo == 0) {
        s.add(hi == 1 ? -1 : 0, hi == 2 ? -1 : 0, sign);
        return;
      }
      for (int k = 0; k <= w_.h2; ++k) s.add(-k - 1, k, sign);
    };
    if (a == 0) diff(b, a, 1.0);
    else if (b == 0) diff(a, b, -1.0);
    else if (a == 1) diff(a, b, -1.0);  // 1/(u2 - u1) = -1/(u1 - u2)
    else diff(b, a, 1.0);
    return s;
  }

  MatSeries kernel_local(int a, int b) const {
    const MatSeries num = vu(a, b);
    const ScalarSeries den = inverse_difference(a, b);
    return num.combine(den, Mat(Mat::Zero(system_.n(), system_.n())),
                       [](const Mat& m, const cplx& c) { return Mat(m * c); });
  }

  MatSeries kernel_diagonal(int a) const {
    // Psi^{-1} V(u) A(x + u) U(u) Psi
    const int n = system_.n();
    std::vector<Mat> coeffs;
    for (int k = 0; k <= order_; ++k) {
      Mat acc = Mat::Zero(n, n);
      for (int p = 0; p <= k; ++p)
        for (int m = 0; p + m <= k; ++m) acc.noalias() += step_.v[p] * step_.a[m] * step_.u[k - p - m];
      coeffs.push_back(acc);
    }
    return place(coeffs, a, psi_inv_, psi_);
  }

  MatSeries kernel_to_extra(int a, const PointFrame& y) const {
    // Psi^{-1} V(u) Psi_y / (y - x - u)
    const cplx d = y.x - x_;
    std::vector<Mat> coeffs;
    const int n = system_.n();
    for (int k = 0; k <= order_; ++k) {
      Mat acc = Mat::Zero(n, n);
      for (int p = 0; p <= k; ++p) acc += step_.v[p] * std::pow(d, -(k - p + 1));
      coeffs.push_back(acc);
    }
    return place(coeffs, a, psi_inv_, y.psi);
  }

  MatSeries kernel_from_extra(const PointFrame& y, int b) const {
    // Psi_y^{-1} U(u) Psi / (x + u - y)
    const cplx d = x_ - y.x;
    std::vector<Mat> coeffs;
    const int n = system_.n();
    for (int k = 0; k <= order_; ++k) {
      Mat acc = Mat::Zero(n, n);
      for (int p = 0; p <= k; ++p) acc += step_.u[p] * (std::pow(-1.0, k - p) * std::pow(d, -(k - p + 1)));
      coeffs.push_back(acc);
    }
    return place(coeffs, b, y.psi_inv, psi_);
  }

 private:
  const FuchsianSystem& system_;
  Mat psi_;
  Mat psi_inv_;
  cplx x_;
  Window w_;
  int order_;
  TaylorStep step_;
};

void require_degree(const CasimirTensor& tensor) {
  if (tensor.degree != 2 && tensor.degree != 3)
    throw Error(ErrorKind::UnsupportedDegree, "normal ordering implemented for degrees 2 and 3");
}

template <typename F>
void each_coefficient(const CasimirTensor& tensor, F&& f) {
  std::vector<int> idx(tensor.degree);
  for (size_t flat = 0; flat < tensor.coeffs.size(); ++flat) {
    const cplx c = tensor.coeffs[flat];
    if (c == cplx(0.0)) continue;
    size_t rem = flat;
    for (int s = tensor.degree - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(rem % tensor.dim);
      rem /= tensor.dim;
    }
    f(c, idx);
  }
}

}  // namespace

cplx normal_ordered_casimir_amplitude(const FuchsianSystem& system, const CasimirTensor& tensor, const Path& route,
                                      const std::vector<BundlePoint>& extras) {
  require_degree(tensor);
  const int deg = tensor.degree;
  if (deg + extras.size() > static_cast<size_t>(kMaxAmplitudePoints))
    throw Error(ErrorKind::TooManyPoints, "at most 8 points supported");
  const cplx x = route.end();
  system.connection_at(x);
  const Mat psi = transport(system, route).matrix;
  const Window w = deg == 2 ? Window{-2, 2, 0, 0} : Window{-6, 6, -2, 2};
  const LocalExpansion loc(system, psi, x, w, 16);
  const std::vector<PointFrame> rest = frames_of(system, extras);
  const int n = deg + static_cast<int>(rest.size());
  const int nn = system.n();

  // Variable of each Casimir leg: the last leg sits at x itself.
  std::vector<int> var(deg);
  for (int s = 0; s < deg; ++s) var[s] = s + 1 == deg ? 0 : s + 1;

  std::vector<MatSeries> k;
  k.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      const bool li = i < deg, ll = l < deg;
      if (li && ll) {
        k.push_back(i == l ? loc.kernel_diagonal(var[i]) : loc.kernel_local(var[i], var[l]));
      } else if (li) {
        k.push_back(loc.kernel_to_extra(var[i], rest[l - deg]));
      } else if (ll) {
        k.push_back(loc.kernel_from_extra(rest[i - deg], var[l]));
      } else {
        MatSeries s = loc.zero_series();
        s.add(0, 0, kernel(system, rest[i - deg], rest[l - deg]));
        k.push_back(s);
      }
    }
  // Rows of extras carry their E from here on; rows of legs get e_a at use.
  for (int i = deg; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      MatSeries s = loc.zero_series();
      k[i * n + l].each([&](int p1, int p2, const Mat& m) { s.add(p1, p2, rest[i - deg].e * m); });
      k[i * n + l] = std::move(s);
    }
  const double scale = system.algebra().trace_scale();
  const auto& basis = system.algebra().basis();
  const Mat zero = Mat::Zero(nn, nn);
  auto matmul = [](const Mat& p, const Mat& q) { return Mat(p * q); };

  // Collect the cycle structures once.
  std::vector<std::pair<int, Cycles>> perms;
  for_each_permutation(n, [&](int sign, const Cycles& c) { perms.emplace_back(sign, c); });

  cplx total = 0.0;
  std::vector<MatSeries> rows;
  each_coefficient(tensor, [&](cplx c, const std::vector<int>& idx) {
    rows.clear();
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        if (i < deg) {
          MatSeries s = loc.zero_series();
          k[i * n + l].each([&](int p1, int p2, const Mat& m) { s.add(p1, p2, basis[idx[i]] * m); });
          rows.push_back(std::move(s));
        } else {
          rows.push_back(k[i * n + l]);
        }
      }
    cplx sum = 0.0;
    for (const auto& [sign, cycles] : perms) {
      ScalarSeries prod(w.l1, w.h1, w.l2, w.h2, 0.0);
      prod.add(0, 0, 1.0);
      std::vector<ScalarSeries> traces;
      for (const auto& cyc : cycles) {
        MatSeries m = rows[cyc[0] * n + cyc[1 % cyc.size()]];
        for (size_t t = 1; t < cyc.size(); ++t) m = m.combine(rows[cyc[t] * n + cyc[(t + 1) % cyc.size()]], zero, matmul);
        ScalarSeries tr(w.l1, w.h1, w.l2, w.h2, 0.0);
        m.each([&](int p1, int p2, const Mat& v) { tr.add(p1, p2, scale * v.trace()); });
        traces.push_back(std::move(tr));
      }
      for (size_t t = 0; t + 1 < traces.size(); ++t)
        prod = prod.combine(traces[t], cplx(0.0), [](cplx a, cplx b) { return a * b; });
      sum += static_cast<double>(sign) *
             prod.constant_of_product(traces.back(), cplx(0.0), [](cplx a, cplx b) { return a * b; });
    }
    total += c * sum;
  });
  return total;
}

cplx normal_ordered_quadrature(const FuchsianSystem& system, const CasimirTensor& tensor, const Path& route,
                               const std::vector<BundlePoint>& extras, double radius, int nodes) {
  require_degree(tensor);
  const int deg = tensor.degree;
  if (radius <= 0.0) radius = 0.5 * system.clearance();
  const cplx x = route.end();
  const Mat psi = transport(system, route).matrix;
  const TaylorStep st = taylor_series(system, x, 24, false);
  const std::vector<PointFrame> rest = frames_of(system, extras);
  const int n = deg + static_cast<int>(rest.size());
  const double scale = system.algebra().trace_scale();
  const auto& basis = system.algebra().basis();

  auto leg = [&](cplx u) {
    PointFrame f;
    f.x = x + u;
    f.psi = st.u_at(u) * psi;
    f.psi_inv = f.psi.inverse();
    return f;
  };
  auto evaluate = [&](std::vector<PointFrame> pts) {
    pts.insert(pts.end(), rest.begin(), rest.end());
    const std::vector<Mat> k = detail::kernel_table(system, pts);
    std::vector<Mat> e(n);
    for (int i = deg; i < n; ++i) e[i] = pts[i].e;
    cplx total = 0.0;
    each_coefficient(tensor, [&](cplx c, const std::vector<int>& idx) {
      for (int s = 0; s < deg; ++s) e[s] = basis[idx[s]];
      total += c * detail::disconnected_sum(detail::vertex_table(k, e), n, scale);
    });
    return total;
  };

  cplx acc = 0.0;
  const PointFrame at_x = leg(0.0);
  if (deg == 2) {
    for (int a = 0; a < nodes; ++a)
      acc += evaluate({leg(std::polar(radius, 2.0 * std::numbers::pi * a / nodes)), at_x});
    return acc / static_cast<double>(nodes);
  }
  for (int a = 0; a < nodes; ++a) {
    const PointFrame l1 = leg(std::polar(radius, 2.0 * std::numbers::pi * a / nodes));
    for (int b = 0; b < nodes; ++b)
      acc += evaluate({l1, leg(std::polar(0.5 * radius, 2.0 * std::numbers::pi * (b + 0.5) / nodes)), at_x});
  }
  return acc / static_cast<double>(nodes * nodes);
}

}  // namespace fuchs
