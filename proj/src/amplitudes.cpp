#include "fuchs/amplitudes.hpp"

#include <cmath>
#include <numbers>

#include "amplitude_sums.hpp"
#include "fuchs/combinatorics.hpp"

namespace fuchs {

PointFrame frame_of(const FuchsianSystem& system, const BundlePoint& point) {
  PointFrame f;
  f.x = point.position();
  f.psi = transport(system, point.route).matrix;
  f.psi_inv = f.psi.inverse();
  f.e = point.e;
  return f;
}

std::vector<PointFrame> frames_of(const FuchsianSystem& system, const std::vector<BundlePoint>& points) {
  std::vector<PointFrame> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(frame_of(system, p));
  return out;
}

Mat kernel(const FuchsianSystem& system, const PointFrame& x, const PointFrame& y) {
  if (std::abs(y.x - x.x) <= 1e-9 * system.scale()) return x.psi_inv * system.connection_at(x.x) * y.psi;
  return x.psi_inv * y.psi / (y.x - x.x);
}

Mat kernel(const FuchsianSystem& system, const BundlePoint& x, const BundlePoint& y) {
  return kernel(system, frame_of(system, x), frame_of(system, y));
}

namespace detail {

std::vector<Mat> kernel_table(const FuchsianSystem& system, const std::vector<PointFrame>& pts) {
  const size_t n = pts.size();
  std::vector<Mat> k(n * n);
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < n; ++l) k[i * n + l] = kernel(system, pts[i], pts[l]);
  return k;
}

cplx disconnected_sum(const std::vector<Mat>& f, int n, double scale) {
  // f[i * n + k] = E_i K(x_i, x_k)
  cplx total = 0.0;
  for_each_permutation(n, [&](int sign, const Cycles& cycles) {
    cplx term = static_cast<double>(sign);
    for (const auto& c : cycles) {
      Mat prod = f[c[0] * n + c[(1) % c.size()]];
      for (size_t t = 1; t < c.size(); ++t) prod = prod * f[c[t] * n + c[(t + 1) % c.size()]];
      term *= scale * prod.trace();
      if (term == cplx(0.0)) break;
    }
    total += term;
  });
  return total;
}

cplx connected_sum(const std::vector<Mat>& f, int n, double scale) {
  cplx total = 0.0;
  for_each_circular(n, [&](const std::vector<int>& order) {
    Mat prod = f[order[0] * n + order[1 % n]];
    for (int t = 1; t < n; ++t) prod = prod * f[order[t] * n + order[(t + 1) % n]];
    total += prod.trace();
  });
  return (n % 2 == 1 ? 1.0 : -1.0) * scale * total;
}

std::vector<Mat> vertex_table(const std::vector<Mat>& k, const std::vector<Mat>& e) {
  const size_t n = e.size();
  std::vector<Mat> f(n * n);
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < n; ++l) f[i * n + l] = e[i] * k[i * n + l];
  return f;
}

}  // namespace detail

namespace {

void check_count(size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "amplitude needs at least one point");
  if (n > kMaxAmplitudePoints) throw Error(ErrorKind::TooManyPoints, "at most 8 points supported");
}

std::vector<Mat> vertices(const FuchsianSystem& system, const std::vector<PointFrame>& pts) {
  std::vector<Mat> e;
  for (const auto& p : pts) e.push_back(p.e);
  return detail::vertex_table(detail::kernel_table(system, pts), e);
}

}  // namespace

cplx w_connected(const FuchsianSystem& system, const std::vector<PointFrame>& points) {
  check_count(points.size());
  const int n = static_cast<int>(points.size());
  return detail::connected_sum(vertices(system, points), n, system.algebra().trace_scale());
}

cplx w_disconnected(const FuchsianSystem& system, const std::vector<PointFrame>& points) {
  if (points.empty()) return 1.0;
  check_count(points.size());
  const int n = static_cast<int>(points.size());
  return detail::disconnected_sum(vertices(system, points), n, system.algebra().trace_scale());
}

cplx w_connected(const FuchsianSystem& system, const std::vector<BundlePoint>& points) {
  return w_connected(system, frames_of(system, points));
}

cplx w_disconnected(const FuchsianSystem& system, const std::vector<BundlePoint>& points) {
  return w_disconnected(system, frames_of(system, points));
}

cplx w_from_partitions(const FuchsianSystem& system, const std::vector<PointFrame>& points) {
  check_count(points.size());
  cplx total = 0.0;
  for (const auto& partition : set_partitions(static_cast<int>(points.size()))) {
    cplx term = 1.0;
    for (const auto& block : partition) {
      std::vector<PointFrame> sub;
      for (int i : block) sub.push_back(points[i]);
      term *= w_connected(system, sub);
    }
    total += term;
  }
  return total;
}

ShortDistanceReport short_distance_check(const FuchsianSystem& system, const Mat& e1, const BundlePoint& x2,
                                         cplx direction, const std::vector<BundlePoint>& extras, double eps) {
  if (eps <= 0.0) eps = 1e-2 * system.scale();
  direction /= std::abs(direction);
  const PointFrame f2 = frame_of(system, x2);
  const std::vector<PointFrame> rest = frames_of(system, extras);
  const auto& g = system.algebra();

  const cplx w_rest = w_disconnected(system, rest);
  std::vector<PointFrame> with_bracket{f2};
  with_bracket[0].e = LieAlgebra::bracket(e1, f2.e);
  with_bracket.insert(with_bracket.end(), rest.begin(), rest.end());
  const cplx w_bracket = w_disconnected(system, with_bracket);
  const cplx pairing = g.killing(e1, f2.e);

  ShortDistanceReport r;
  for (double s : {eps, eps / 2, eps / 4}) {
    const cplx x1 = f2.x + s * direction;
    PointFrame f1;
    f1.x = x1;
    f1.psi = transport_from(system, straight(f2.x, x1), f2.psi).matrix;
    f1.psi_inv = f1.psi.inverse();
    f1.e = e1;
    std::vector<PointFrame> all{f1, f2};
    all.insert(all.end(), rest.begin(), rest.end());
    const cplx x12 = x1 - f2.x;
    const cplx rem = w_disconnected(system, all) - pairing / (x12 * x12) * w_rest - w_bracket / x12;
    r.separations.push_back(s);
    r.remainders.push_back(rem);
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& v : r.remainders) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  r.spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  r.pass = r.spread <= 3.0;
  return r;
}

Extrapolation richardson(const std::function<cplx(double)>& f, double r0, int levels) {
  std::vector<std::vector<cplx>> t(levels);
  for (int k = 0; k < levels; ++k) {
    t[k].push_back(f(r0 / std::pow(2.0, k)));
    for (int m = 1; m <= k; ++m) {
      const double p = std::pow(2.0, m);
      t[k].push_back((p * t[k][m - 1] - t[k - 1][m - 1]) / (p - 1.0));
    }
  }
  Extrapolation e;
  e.value = t[levels - 1][levels - 1];
  e.error = levels > 1 ? std::abs(e.value - t[levels - 2][levels - 2]) : std::abs(e.value);
  return e;
}

namespace {

double nearest_other(const FuchsianSystem& system, int j) {
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < system.num_punctures(); ++i)
    if (i != j) d = std::min(d, std::abs(system.punctures()[i] - system.punctures()[j]));
  return d;
}

/// W^(x.E, extras) at x = z_j + r * dir on the spoke lift.
cplx spoke_amplitude(const FuchsianSystem& system, int j, cplx dir, double r, const Mat& e,
                     const std::vector<PointFrame>& rest) {
  const cplx x = system.punctures()[j] + r * dir;
  std::vector<PointFrame> all{frame_of(system, BundlePoint{straight(system.basepoint(), x), e})};
  all.insert(all.end(), rest.begin(), rest.end());
  return w_disconnected(system, all);
}

}  // namespace

PunctureAsymptoticsReport puncture_asymptotics_check(const FuchsianSystem& system, int j, const Mat& cartan_e,
                                                     const std::vector<BundlePoint>& extras) {
  const LocalFrame frame = local_frame(system, j);
  GeneratorLayout layout(system);
  const cplx dir = layout.spoke_direction(j);
  const std::vector<PointFrame> rest = frames_of(system, extras);
  const double d = nearest_other(system, j);
  PunctureAsymptoticsReport rep;

  const Mat ej = frame.local_value(cartan_e);
  rep.predicted_residue = system.algebra().killing(system.residues()[j], ej) * w_disconnected(system, rest);
  const Extrapolation ex =
      richardson([&](double r) { return r * dir * spoke_amplitude(system, j, dir, r, cartan_e, rest); }, 0.2 * d, 8);
  rep.residue = ex.value;
  rep.residue_error = std::abs(rep.residue - rep.predicted_residue) /
                      std::max(std::abs(rep.predicted_residue), 1e-300);

  // Power laws along the spoke, over two decades above the clearance.
  const double r_lo = 1.5 * system.clearance();
  constexpr int kSamples = 81;
  constexpr int kPoly = 6;
  const Mat psi_inv_j = frame.psi_j.inverse();
  for (const auto& root : system.cartan(j).roots()) {
    Mat unit = Mat::Zero(system.n(), system.n());
    unit(root.k, root.l) = 1.0;
    const Mat er = frame.p * unit * frame.p_inv;
    const Mat e = psi_inv_j * er * frame.psi_j;
    Eigen::MatrixXcd design(kSamples, 2 + kPoly);
    Vec rhs(kSamples);
    double prev_phase = 0.0;
    for (int s = 0; s < kSamples; ++s) {
      const double r = r_lo * std::pow(100.0, static_cast<double>(s) / (kSamples - 1));
      const cplx v = spoke_amplitude(system, j, dir, r, e, rest);
      double phase = std::arg(v);
      if (s > 0) phase += 2.0 * std::numbers::pi * std::round((prev_phase - phase) / (2.0 * std::numbers::pi));
      prev_phase = phase;
      rhs(s) = cplx(std::log(std::abs(v)), phase);
      design(s, 0) = std::log(r);
      design(s, 1) = 1.0;
      for (int k = 1; k <= kPoly; ++k) design(s, 1 + k) = std::pow(r / d, k);
    }
    const Vec sol = design.colPivHouseholderQr().solve(rhs);
    rep.root_values.push_back(root.value);
    rep.fitted_exponents.push_back(sol(0));
    rep.exponent_error = std::max(rep.exponent_error, std::abs(sol(0) - root.value) / std::abs(root.value));
  }
  rep.pass = rep.residue_error <= 1e-4 && rep.exponent_error <= 1e-3;
  return rep;
}

cplx casimir_amplitude(const FuchsianSystem& system, const CasimirTensor& tensor, const Path& route,
                       const std::vector<BundlePoint>& extras, const std::vector<Mat>* basis) {
  const int deg = tensor.degree;
  check_count(static_cast<size_t>(deg) + extras.size());
  const auto& b = basis ? *basis : system.algebra().basis();
  if (static_cast<int>(b.size()) != tensor.dim) throw Error(ErrorKind::InvalidArgument, "basis size mismatch");

  PointFrame leg = frame_of(system, BundlePoint{route, Mat()});
  std::vector<PointFrame> pts(deg, leg);
  const std::vector<PointFrame> rest = frames_of(system, extras);
  pts.insert(pts.end(), rest.begin(), rest.end());
  const int n = static_cast<int>(pts.size());
  const std::vector<Mat> k = detail::kernel_table(system, pts);
  std::vector<Mat> e(n);
  for (int i = deg; i < n; ++i) e[i] = pts[i].e;

  const double scale = system.algebra().trace_scale();
  cplx total = 0.0;
  std::vector<int> idx(deg);
  const size_t count = tensor.coeffs.size();
  for (size_t flat = 0; flat < count; ++flat) {
    const cplx c = tensor.coeffs[flat];
    if (c == cplx(0.0)) continue;
    size_t rem = flat;
    for (int s = deg - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(rem % tensor.dim);
      rem /= tensor.dim;
    }
    for (int s = 0; s < deg; ++s) e[s] = b[idx[s]];
    total += c * detail::disconnected_sum(detail::vertex_table(k, e), n, scale);
  }
  return total;
}

cplx direct_rational_W2C2(const FuchsianSystem& system, cplx x) {
  return direct_rational_W2C2(system.algebra(), system.connection_at(x));
}

cplx direct_rational_W2C2(const LieAlgebra& g, const Mat& a) {
  cplx total = 0.0;
  for (int i = 0; i < g.dim(); ++i) {
    const Mat ea = g.basis()[i] * a;
    const Mat eb = g.dual()[i] * a;
    total += -g.trace_form(ea * eb) + g.trace_form(ea) * g.trace_form(eb);
  }
  return total;
}

cplx normal_order_correction_W2C2(const FuchsianSystem& system, cplx x) {
  const auto& g = system.algebra();
  const Mat a = system.connection_at(x);
  Mat cas = Mat::Zero(g.n(), g.n());
  for (int i = 0; i < g.dim(); ++i) cas += g.basis()[i] * g.dual()[i];
  return g.trace_form(a * a * cas);
}

RationalFit fit_rational(const FuchsianSystem& system, const std::vector<cplx>& xs, const std::vector<cplx>& values,
                         int order, const std::vector<cplx>& extra_poles, int extra_order) {
  const int cols = 1 + order * system.num_punctures() + extra_order * static_cast<int>(extra_poles.size());
  const int rows = static_cast<int>(xs.size());
  if (rows < cols) throw Error(ErrorKind::InvalidArgument, "not enough samples for the rational fit");
  Mat design(rows, cols);
  Vec rhs(rows);
  for (int r = 0; r < rows; ++r) {
    int c = 0;
    design(r, c++) = 1.0;
    for (const auto& z : system.punctures())
      for (int k = 1; k <= order; ++k) design(r, c++) = std::pow(xs[r] - z, -k);
    for (const auto& y : extra_poles)
      for (int k = 1; k <= extra_order; ++k) design(r, c++) = std::pow(xs[r] - y, -k);
    rhs(r) = values[r];
  }
  // Column equilibration keeps the least-squares problem well conditioned.
  Eigen::VectorXd colscale(cols);
  for (int c = 0; c < cols; ++c) {
    colscale(c) = design.col(c).norm();
    design.col(c) /= colscale(c);
  }
  RationalFit fit;
  const Vec sol = design.colPivHouseholderQr().solve(rhs);
  fit.residual = (design * sol - rhs).norm() / rhs.norm();
  fit.coefficients = sol.cwiseQuotient(colscale.cast<cplx>());
  return fit;
}

ChargeResult extract_charge(const FuchsianSystem& system, int degree, int j) {
  const CasimirTensor tensor = casimir_tensor(system.algebra(), degree);
  GeneratorLayout layout(system);
  const cplx dir = layout.spoke_direction(j);
  const cplx zj = system.punctures()[j];
  const double d = nearest_other(system, j);
  const Extrapolation ex = richardson(
      [&](double r) {
        const cplx u = r * dir;
        return std::pow(u, degree) *
               normal_ordered_casimir_amplitude(system, tensor, straight(system.basepoint(), zj + u));
      },
      0.2 * d);
  if (!(ex.error <= 1e-5 * std::max(1.0, std::abs(ex.value))))
    throw Error(ErrorKind::NoConvergence, "charge extrapolation did not settle");
  return {ex.value, ex.error};
}

cplx charge_oracle_degree2(const FuchsianSystem& system, int j) {
  const double rho = 0.3 * nearest_other(system, j);
  const cplx zj = system.punctures()[j];
  constexpr int kNodes = 256;
  cplx acc = 0.0;
  for (int k = 0; k < kNodes; ++k) {
    const cplx w = std::polar(rho, 2.0 * std::numbers::pi * k / kNodes);
    const cplx x = zj + w;
    acc += w * w * (direct_rational_W2C2(system, x) + normal_order_correction_W2C2(system, x));
  }
  return acc / static_cast<double>(kNodes);
}

}  // namespace fuchs
