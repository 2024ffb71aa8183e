#include "fuchs/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <regex>
#include <sstream>

namespace fuchs {

namespace {

constexpr double kStepRatio = 0.4;  // |h| / distance to nearest puncture
constexpr int kMaxOrder = 90;

double segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(std::real((p - a) * std::conj(d)) / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

double effective_tol(const FuchsianSystem& s, double tol) { return tol > 0.0 ? tol : s.transport_tol(); }

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace

Path Path::reversed() const {
  Path p(vertices);
  std::reverse(p.vertices.begin(), p.vertices.end());
  return p;
}

Path Path::then(const Path& next) const {
  if (vertices.empty()) return next;
  if (next.vertices.empty()) return *this;
  if (std::abs(end() - next.start()) > 1e-12 * (1.0 + std::abs(end())))
    throw Error(ErrorKind::InvalidArgument, "paths do not connect");
  Path p(vertices);
  p.vertices.insert(p.vertices.end(), next.vertices.begin() + 1, next.vertices.end());
  return p;
}

Path Path::prefix(int seg, double t) const {
  Path p(std::vector<cplx>(vertices.begin(), vertices.begin() + seg + 1));
  const cplx pt = vertices[seg] + t * (vertices[seg + 1] - vertices[seg]);
  if (t > 0.0) p.vertices.push_back(pt);
  return p;
}

double Path::length() const {
  double l = 0.0;
  for (int k = 0; k < segments(); ++k) l += std::abs(vertices[k + 1] - vertices[k]);
  return l;
}

Path straight(cplx a, cplx b) { return Path({a, b}); }

Mat TaylorStep::u_at(cplx s) const {
  Mat out = u.back();
  for (int k = static_cast<int>(u.size()) - 2; k >= 0; --k) out = out * s + u[k];
  return out;
}

Mat TaylorStep::v_at(cplx s) const {
  Mat out = v.back();
  for (int k = static_cast<int>(v.size()) - 2; k >= 0; --k) out = out * s + v[k];
  return out;
}

TaylorStep taylor_series(const FuchsianSystem& system, cplx x, int order, bool with_inverse) {
  TaylorStep st;
  st.x = x;
  st.h = 0.0;
  const int n = system.n();
  st.a = system.connection_taylor(x, order);
  st.u.assign(1, Mat::Identity(n, n));
  for (int k = 0; k < order; ++k) {
    Mat acc = Mat::Zero(n, n);
    for (int m = 0; m <= k; ++m) acc.noalias() += st.a[m] * st.u[k - m];
    st.u.push_back(acc / static_cast<double>(k + 1));
  }
  if (with_inverse) {
    st.v.assign(1, Mat::Identity(n, n));
    for (int k = 0; k < order; ++k) {
      Mat acc = Mat::Zero(n, n);
      for (int m = 0; m <= k; ++m) acc.noalias() -= st.v[k - m] * st.a[m];
      st.v.push_back(acc / static_cast<double>(k + 1));
    }
  }
  return st;
}

TaylorStep taylor_step(const FuchsianSystem& system, cplx x, cplx h, double tol, bool with_inverse) {
  const int n = system.n();
  const double cutoff = 1e-2 * tol;
  TaylorStep st;
  st.x = x;
  st.h = h;
  st.a = system.connection_taylor(x, kMaxOrder);
  st.u.assign(1, Mat::Identity(n, n));
  const double habs = std::abs(h);
  double below = 0;
  int order = kMaxOrder;
  double hk = 1.0;
  for (int k = 0; k < kMaxOrder; ++k) {
    Mat acc = Mat::Zero(n, n);
    for (int m = 0; m <= k; ++m) acc.noalias() += st.a[m] * st.u[k - m];
    st.u.push_back(acc / static_cast<double>(k + 1));
    hk *= habs;
    const double term = st.u.back().norm() * hk;
    below = term < cutoff ? below + 1 : 0;
    st.truncation = term;
    if (k >= 3 && below >= 2) {
      order = k + 1;
      break;
    }
  }
  if (below < 2) throw Error(ErrorKind::StepSizeUnderflow, "Taylor series did not converge on step");
  if (with_inverse) {
    st.v.assign(1, Mat::Identity(n, n));
    for (int k = 0; k < order; ++k) {
      Mat acc = Mat::Zero(n, n);
      for (int m = 0; m <= k; ++m) acc.noalias() -= st.v[k - m] * st.a[m];
      st.v.push_back(acc / static_cast<double>(k + 1));
    }
  }
  st.a.resize(static_cast<size_t>(order) + 1);
  return st;
}

void check_clearance(const FuchsianSystem& system, const Path& path) {
  const double c = system.clearance() * (1.0 - 1e-9);
  for (int k = 0; k < path.segments(); ++k)
    for (const auto& z : system.punctures())
      if (segment_distance(z, path.vertices[k], path.vertices[k + 1]) < c)
        throw Error(ErrorKind::ClearanceViolation, "path segment passes within clearance of a puncture");
  if (path.segments() == 0 && !path.vertices.empty() && system.distance_to_punctures(path.start()) < c)
    throw Error(ErrorKind::ClearanceViolation, "point within clearance of a puncture");
}

namespace {

/// Advances value from a to b; returns accumulated truncation estimate.
double walk_segment(const FuchsianSystem& system, cplx a, cplx b, Mat& value, double tol, int& steps,
                    double& det_defect) {
  const double len = std::abs(b - a);
  if (len == 0.0) return 0.0;
  const cplx dir = (b - a) / len;
  double done = 0.0;
  double err = 0.0;
  while (done < len) {
    const cplx x = a + done * dir;
    const double r = system.distance_to_punctures(x);
    double step = std::min(len - done, kStepRatio * r);
    if (step < 1e-15 * (1.0 + std::abs(x))) throw Error(ErrorKind::StepSizeUnderflow, "step size underflow");
    if (len - done - step < 1e-14 * len) step = len - done;
    const TaylorStep st = taylor_step(system, x, step * dir, tol, false);
    value = st.u_at(step * dir) * value;
    err += st.truncation * value.norm();
    done += step;
    ++steps;
    det_defect = std::max(det_defect, std::abs(value.determinant() - 1.0));
  }
  return err;
}

}  // namespace

TransportResult transport_from(const FuchsianSystem& system, const Path& path, const Mat& start_value,
                               double tol) {
  system.require_valid();
  check_clearance(system, path);
  tol = effective_tol(system, tol);
  TransportResult res;
  res.matrix = start_value;
  const double det0 = std::abs(start_value.determinant() - 1.0);
  for (int k = 0; k < path.segments(); ++k)
    res.error_estimate +=
        walk_segment(system, path.vertices[k], path.vertices[k + 1], res.matrix, tol, res.steps, res.det_defect);
  res.det_defect = std::max(0.0, res.det_defect - det0);
  return res;
}

TransportResult transport(const FuchsianSystem& system, const Path& path, double tol) {
  return transport_from(system, path, Mat::Identity(system.n(), system.n()), tol);
}

PathTransport::PathTransport(const FuchsianSystem& system, Path path, Mat start_value, double tol)
    : system_(&system), path_(std::move(path)), tol_(effective_tol(system, tol)) {
  system.require_valid();
  check_clearance(system, path_);
  values_.push_back(std::move(start_value));
  int steps = 0;
  for (int k = 0; k < path_.segments(); ++k) {
    Mat v = values_.back();
    walk_segment(system, path_.vertices[k], path_.vertices[k + 1], v, tol_, steps, det_defect_);
    values_.push_back(std::move(v));
  }
}

Mat PathTransport::at(int seg, double t) const {
  Mat v = values_[static_cast<size_t>(seg)];
  int steps = 0;
  double det = 0.0;
  const cplx a = path_.vertices[seg];
  walk_segment(*system_, a, a + t * (path_.vertices[seg + 1] - a), v, tol_, steps, det);
  return v;
}

GeneratorLayout::GeneratorLayout(const FuchsianSystem& system, double radius_factor, int circle_vertices)
    : x0_(system.basepoint()) {
  build(system, radius_factor, circle_vertices);
}

GeneratorLayout::GeneratorLayout(const FuchsianSystem& system, cplx basepoint, double radius_factor,
                                 int circle_vertices)
    : x0_(basepoint) {
  build(system, radius_factor, circle_vertices);
}

void GeneratorLayout::build(const FuchsianSystem& system, double radius_factor, int circle_vertices) {
  const auto& z = system.punctures();
  const int np = system.num_punctures();
  cplx centroid = 0.0;
  for (const auto& p : z) centroid += p;
  centroid /= static_cast<double>(np);
  const cplx forward = (centroid - x0_) / std::abs(centroid - x0_);
  std::vector<double> phase(np);
  for (int j = 0; j < np; ++j) {
    const cplx d = x0_ - z[j];
    dir_.push_back(d / std::abs(d));
    radius_.push_back(radius_factor * system.clearance());
    spoke_.push_back(z[j] + radius_.back() * dir_.back());
    std::vector<cplx> c;
    const double start = std::arg(dir_.back());
    for (int k = 0; k <= circle_vertices; ++k) {
      const double th = start + 2.0 * std::numbers::pi * k / circle_vertices;
      c.push_back(k == circle_vertices ? spoke_.back() : z[j] + std::polar(radius_.back(), th));
    }
    circle_.push_back(std::move(c));
    phase[j] = std::arg((z[j] - x0_) / forward);
  }
  order_.resize(np);
  for (int j = 0; j < np; ++j) order_[j] = j;
  std::sort(order_.begin(), order_.end(), [&](int a, int b) { return phase[a] < phase[b]; });
}

Path GeneratorLayout::spoke(int j) const { return straight(x0_, spoke_[j]); }
Path GeneratorLayout::circle(int j) const { return Path(circle_[j]); }
Path GeneratorLayout::loop(int j) const { return spoke(j).then(circle(j)).then(spoke(j).reversed()); }

LoopWord LoopWord::parse(const std::string& text) {
  LoopWord w;
  static const std::regex token(R"(g(\d+)(\^(-?\d+))?)");
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    std::smatch m;
    if (!std::regex_match(tok, m, token)) throw Error(ErrorKind::InvalidArgument, "bad loop word token '" + tok + "'");
    const int j = std::stoi(m[1]) - 1;
    const int e = m[3].matched ? std::stoi(m[3]) : 1;
    if (j < 0 || e == 0) throw Error(ErrorKind::InvalidArgument, "bad loop word token '" + tok + "'");
    for (int r = 0; r < std::abs(e); ++r) w.letters.emplace_back(j, e > 0 ? 1 : -1);
  }
  return w;
}

std::string LoopWord::str() const {
  std::ostringstream out;
  for (size_t i = 0; i < letters.size(); ++i) {
    if (i) out << ' ';
    out << 'g' << letters[i].first + 1;
    if (letters[i].second < 0) out << "^-1";
  }
  return out.str();
}

LoopWord LoopWord::inverse() const {
  LoopWord w;
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) w.letters.emplace_back(it->first, -it->second);
  return w;
}

LoopWord LoopWord::then(const LoopWord& other) const {
  LoopWord w = *this;
  w.letters.insert(w.letters.end(), other.letters.begin(), other.letters.end());
  return w;
}

Path LoopWord::realize(const GeneratorLayout& layout) const {
  Path p({layout.basepoint()});
  for (const auto& [j, e] : letters) p = p.then(e > 0 ? layout.loop(j) : layout.loop(j).reversed());
  return p;
}

LoopWord relation_word(const FuchsianSystem& system) {
  GeneratorLayout layout(system);
  LoopWord w;
  for (int j : layout.relation_order()) w.letters.emplace_back(j, 1);
  return w;
}

Mat generator_monodromy(const FuchsianSystem& system, int j) {
  if (j < 0 || j >= system.num_punctures()) throw Error(ErrorKind::InvalidArgument, "generator index out of range");
  const std::uint64_t key = mix(mix(system.hash(), 0x6d6f6e6fULL + static_cast<std::uint64_t>(j)),
                                std::hash<double>{}(system.transport_tol()));
  if (auto hit = system.cache().find(key)) return *hit;
  GeneratorLayout layout(system);
  Mat s = transport(system, layout.loop(j)).matrix;
  system.cache().insert(key, s);
  return s;
}

Mat monodromy(const FuchsianSystem& system, const LoopWord& word) {
  system.require_valid();
  Mat s = Mat::Identity(system.n(), system.n());
  for (const auto& [j, e] : word.letters) {
    const Mat g = generator_monodromy(system, j);
    s = (e > 0 ? g : Mat(g.inverse())) * s;
  }
  return s;
}

BundlePoint point_at(const FuchsianSystem& system, cplx x, Mat e) {
  return BundlePoint{straight(system.basepoint(), x), std::move(e)};
}

Mat evaluate_M(const FuchsianSystem& system, const BundlePoint& point) {
  const Mat t = transport(system, point.route).matrix;
  return t * point.e * t.inverse();
}

std::pair<cplx, Mat> integrate_w1(const FuchsianSystem& system, const Path& path, const Mat& start_value,
                                  const Mat& e, double tol) {
  system.require_valid();
  check_clearance(system, path);
  tol = effective_tol(system, tol);
  const double scale = system.algebra().trace_scale();
  Mat value = start_value;
  cplx integral = 0.0;
  for (int seg = 0; seg < path.segments(); ++seg) {
    const cplx a = path.vertices[seg];
    const cplx b = path.vertices[seg + 1];
    const double len = std::abs(b - a);
    if (len == 0.0) continue;
    const cplx dir = (b - a) / len;
    double done = 0.0;
    while (done < len) {
      const cplx x = a + done * dir;
      double step = std::min(len - done, kStepRatio * system.distance_to_punctures(x));
      if (len - done - step < 1e-14 * len) step = len - done;
      const cplx h = step * dir;
      const TaylorStep st = taylor_step(system, x, h, tol, true);
      const int order = static_cast<int>(st.u.size());
      const Mat m0 = value * e * value.inverse();
      // W_1(x + s) = scale * tr( A(s) U(s) M0 V(s) )
      std::vector<Mat> um(order);
      for (int p = 0; p < order; ++p) um[p] = st.u[p] * m0;
      // Y_k = sum_p U_p M0 V_{k-p}; W_k = sum_m tr(a_m Y_{k-m}).
      std::vector<Mat> ys(order, Mat::Zero(system.n(), system.n()));
      for (int k = 0; k < order; ++k)
        for (int p = 0; p <= k; ++p) ys[k].noalias() += um[p] * st.v[k - p];
      cplx hk = h;
      for (int k = 0; k < order; ++k) {
        cplx wk = 0.0;
        for (int m = 0; m <= k && m < static_cast<int>(st.a.size()); ++m)
          wk += (st.a[m].transpose().cwiseProduct(ys[k - m])).sum();
        integral += scale * wk * hk / static_cast<double>(k + 1);
        hk *= h;
      }
      value = st.u_at(h) * value;
      done += step;
    }
  }
  return {integral, value};
}

}  // namespace fuchs
