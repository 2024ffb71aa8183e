#include "fuchs/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <random>

namespace fuchs {

namespace {

constexpr cplx kTwoPiI(0.0, 2.0 * std::numbers::pi);
constexpr double kEndpointSign = 1.0;

Path normalized_lead(const Path& lead, cplx start) {
  if (lead.vertices.empty()) return Path({start});
  return lead;
}

// Symmetric in its arguments to the last bit, so that swapping the two
// chains negates every crossing term exactly.
cplx symmetric_pairing(const Mat& a, const Mat& b) {
  const int n = static_cast<int>(a.rows());
  cplx s = 0.0;
  for (int i = 0; i < n; ++i) {
    s += a(i, i) * b(i, i);
    for (int j = i + 1; j < n; ++j) s += a(i, j) * b(j, i) + a(j, i) * b(i, j);
  }
  return s;
}

struct Crossing {
  int seg_a;
  double t_a;
  int seg_b;
  double t_b;
  int sign;
};

std::vector<Crossing> segment_crossings(const FuchsianSystem& system, const Path& a, const Path& b) {
  std::vector<Crossing> out;
  const double at_puncture = 1e-9 * system.scale();
  constexpr double kEnd = 1e-10;
  for (int i = 0; i < a.segments(); ++i) {
    const cplx p = a.vertices[i];
    const cplx da = a.vertices[i + 1] - p;
    if (std::abs(da) == 0.0) continue;
    for (int k = 0; k < b.segments(); ++k) {
      const cplx q = b.vertices[k];
      const cplx db = b.vertices[k + 1] - q;
      if (std::abs(db) == 0.0) continue;
      const double denom = std::imag(std::conj(da) * db);
      const cplx w = q - p;
      if (std::abs(denom) <= 1e-9 * std::abs(da) * std::abs(db)) {
        // Parallel: only collinear overlaps matter.
        const double offset = std::abs(std::imag(std::conj(da) * w)) / std::abs(da);
        if (offset > 1e-12 * (1.0 + std::abs(p))) continue;
        const double s0 = std::real(std::conj(da) * w) / std::norm(da);
        const double s1 = std::real(std::conj(da) * (w + db)) / std::norm(da);
        if (std::max(s0, s1) < -kEnd || std::min(s0, s1) > 1.0 + kEnd) continue;
        const cplx touch = p + std::clamp(s0, 0.0, 1.0) * da;
        if (system.distance_to_punctures(touch) <= at_puncture) continue;
        throw Error(ErrorKind::NonTransversal, "collinear overlap of arcs");
      }
      const double s = std::imag(std::conj(w) * db) / denom;
      const double t = std::imag(std::conj(w) * da) / denom;
      if (s < -kEnd || s > 1.0 + kEnd || t < -kEnd || t > 1.0 + kEnd) continue;
      const cplx x = p + s * da;
      if (system.distance_to_punctures(x) <= at_puncture) continue;
      if (s < kEnd || s > 1.0 - kEnd || t < kEnd || t > 1.0 - kEnd)
        throw Error(ErrorKind::NonTransversal, "arcs meet at a vertex");
      out.push_back({i, s, k, t, denom > 0.0 ? 1 : -1});
    }
  }
  return out;
}

// Solution along the geometry of an arc: transported along lead + body,
// then through the Frobenius frame on the radial tail.
class ArcLift {
 public:
  ArcLift(const FuchsianSystem& system, const Arc& arc)
      : system_(&system),
        arc_(arc),
        lead_segments_(normalized_lead(arc.lead, arc.body.start()).segments()),
        transport_(system, normalized_lead(arc.lead, arc.body.start()).then(arc.body),
                   Mat::Identity(system.n(), system.n())) {
    if (arc.puncture_end >= 0)
      frame_ = std::make_unique<LocalFrame>(
          local_frame_at(system, arc.puncture_end, arc.body.end(), transport_.at_end(), false));
  }

  Mat psi(int seg, double t) const {
    if (seg < arc_.body.segments()) return transport_.at(lead_segments_ + seg, t);
    const cplx z = system_->punctures()[arc_.puncture_end];
    const cplx s = arc_.body.end();
    return frame_->psi_near((1.0 - t) * (s - z));
  }
  Mat m(int seg, double t) const {
    const Mat p = psi(seg, t);
    return p * arc_.e * p.inverse();
  }
  const Mat& start_psi() const { return transport_.at_vertex(lead_segments_); }
  const Mat& end_psi() const { return transport_.at_end(); }
  const LocalFrame* frame() const { return frame_.get(); }

 private:
  const FuchsianSystem* system_;
  Arc arc_;
  int lead_segments_;
  PathTransport transport_;
  std::unique_ptr<LocalFrame> frame_;
};

std::uint64_t geometry_key(const Arc& arc) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& v : arc.lead.vertices) mix(&v, sizeof(v));
  const char sep = '|';
  mix(&sep, 1);
  for (const auto& v : arc.body.vertices) mix(&v, sizeof(v));
  mix(&arc.puncture_end, sizeof(arc.puncture_end));
  return h;
}

Arc perturbed(const FuchsianSystem& system, const Arc& arc, int attempt) {
  std::mt19937_64 rng(0x5eed + static_cast<unsigned>(attempt));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Arc out = arc;
  const double r = 0.25 * system.clearance();
  for (size_t k = 1; k + 1 < out.body.vertices.size(); ++k)
    out.body.vertices[k] += std::polar(r * std::sqrt(unit(rng)), 2.0 * std::numbers::pi * unit(rng));
  return out;
}

// Crossing data between two arc geometries with the solutions at each
// crossing; independent of the Lie algebra elements carried by the arcs.
struct PairData {
  std::vector<int> sign;
  std::vector<Mat> psi_a;
  std::vector<Mat> psi_b;
  // Arcs ending at the same puncture meet there with weight 1/2, signed by
  // the angular order of their incoming directions.
  double endpoint_weight = 0.0;
  Mat frame_a, frame_b;  ///< Psi_j of each lift at the common puncture
  Mat eig, eig_inv;
};

class IntersectionEngine {
 public:
  explicit IntersectionEngine(const FuchsianSystem& system) : system_(system) {}

  // Sum over crossings of chain1 against chain2 (not antisymmetrized).
  cplx raw(const Chain& c1, const Chain& c2) {
    cplx total = 0.0;
    for (const auto& [ca, a] : c1.terms)
      for (const auto& [cb, b] : c2.terms) {
        if (ca == cplx(0.0) || cb == cplx(0.0)) continue;
        const PairData& d = pair(a, b);
        for (size_t k = 0; k < d.sign.size(); ++k) {
          const Mat ma = d.psi_a[k] * a.e * d.psi_a[k].inverse();
          const Mat mb = d.psi_b[k] * b.e * d.psi_b[k].inverse();
          total += static_cast<double>(d.sign[k]) * ca * cb * system_.algebra().trace_scale() *
                   symmetric_pairing(ma, mb);
        }
        if (d.endpoint_weight != 0.0) {
          const Mat da = local_cartan(d, d.frame_a * a.e * d.frame_a.inverse());
          const Mat db = local_cartan(d, d.frame_b * b.e * d.frame_b.inverse());
          total += d.endpoint_weight * ca * cb * system_.algebra().trace_scale() * symmetric_pairing(da, db);
        }
      }
    return total;
  }

  cplx antisymmetric(const Chain& c1, const Chain& c2) { return 0.5 * (raw(c1, c2) - raw(c2, c1)); }

 private:
  static Mat local_cartan(const PairData& d, const Mat& x) {
    const Mat xt = d.eig_inv * x * d.eig;
    return d.eig * Mat(xt.diagonal().asDiagonal()) * d.eig_inv;
  }

  const ArcLift& lift(const Arc& arc) {
    const auto key = geometry_key(arc);
    auto it = lifts_.find(key);
    if (it == lifts_.end()) it = lifts_.emplace(key, std::make_unique<ArcLift>(system_, arc)).first;
    return *it->second;
  }

  const PairData& pair(const Arc& a, const Arc& b) {
    const auto key = std::make_pair(geometry_key(a), geometry_key(b));
    auto it = pairs_.find(key);
    if (it != pairs_.end()) return it->second;

    const Path ga = a.geometry(system_);
    Arc bb = b;
    std::vector<Crossing> cross;
    constexpr int kAttempts = 5;
    for (int attempt = 0;; ++attempt) {
      try {
        cross = segment_crossings(system_, ga, bb.geometry(system_));
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonTransversal || attempt + 1 >= kAttempts) throw;
        bb = perturbed(system_, b, attempt);
      }
    }
    PairData d;
    if (!cross.empty()) {
      const ArcLift& la = lift(a);
      const ArcLift& lb = lift(bb);
      for (const auto& c : cross) {
        d.sign.push_back(c.sign);
        d.psi_a.push_back(la.psi(c.seg_a, c.t_a));
        d.psi_b.push_back(lb.psi(c.seg_b, c.t_b));
      }
    }
    if (a.puncture_end >= 0 && a.puncture_end == b.puncture_end) {
      const cplx z = system_.punctures()[a.puncture_end];
      const double turn = std::imag(std::conj(z - a.body.end()) * (z - bb.body.end()));
      if (turn != 0.0) {
        const ArcLift& la = lift(a);
        const ArcLift& lb = lift(bb);
        d.endpoint_weight = kEndpointSign * 0.5 * (turn > 0.0 ? 1.0 : -1.0);
        d.frame_a = la.frame()->psi_j;
        d.frame_b = lb.frame()->psi_j;
        d.eig = la.frame()->p;
        d.eig_inv = la.frame()->p_inv;
      }
    }
    return pairs_.emplace(key, std::move(d)).first->second;
  }

  const FuchsianSystem& system_;
  std::map<std::uint64_t, std::unique_ptr<ArcLift>> lifts_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, PairData> pairs_;
};

double max_singular(const Eigen::VectorXd& s) { return s.size() ? s(0) : 0.0; }

int numerical_rank(const Mat& m, double rel = 1e-8) {
  if (m.cols() == 0 || m.rows() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  const double thr = rel * std::max(1.0, max_singular(s));
  int r = 0;
  for (int k = 0; k < s.size(); ++k)
    if (s(k) > thr) ++r;
  return r;
}

Mat null_space(const Mat& m, double rel = 1e-8) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double thr = rel * std::max(1.0, max_singular(s));
  int r = 0;
  for (int k = 0; k < s.size(); ++k)
    if (s(k) > thr) ++r;
  return svd.matrixV().rightCols(m.cols() - r);
}

Mat column_basis(const Mat& m, double rel = 1e-8) {
  if (m.cols() == 0) return Mat(m.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double thr = rel * std::max(1.0, max_singular(s));
  int r = 0;
  for (int k = 0; k < s.size(); ++k)
    if (s(k) > thr) ++r;
  return svd.matrixU().leftCols(r);
}

std::vector<Mat> generator_monodromies(const FuchsianSystem& system) {
  std::vector<Mat> s;
  for (int j = 0; j < system.num_punctures(); ++j) s.push_back(generator_monodromy(system, j));
  return s;
}

cplx continuous_log_end(const Path& body, cplx z) {
  cplx l = std::log(body.start() - z);
  for (int k = 0; k < body.segments(); ++k) l += std::log((body.vertices[k + 1] - z) / (body.vertices[k] - z));
  return l;
}

}  // namespace

Path Arc::geometry(const FuchsianSystem& system) const {
  Path g = body;
  if (puncture_end >= 0) g.vertices.push_back(system.punctures()[puncture_end]);
  return g;
}

Chain& Chain::add(cplx coefficient, Arc arc) {
  terms.emplace_back(coefficient, std::move(arc));
  return *this;
}

Chain& Chain::append(const Chain& other, cplx factor) {
  for (const auto& [c, a] : other.terms) terms.emplace_back(factor * c, a);
  return *this;
}

Chain Chain::scaled(cplx factor) const {
  Chain out;
  out.append(*this, factor);
  return out;
}

Chain Chain::reversed() const {
  Chain out;
  for (const auto& [c, a] : terms) {
    if (a.puncture_end >= 0) throw Error(ErrorKind::InvalidArgument, "cannot reverse a puncture-ending arc");
    // The reversed body starts where the original ends, reached by lead + body.
    Arc r;
    r.lead = normalized_lead(a.lead, a.body.start()).then(a.body);
    r.body = a.body.reversed();
    r.e = a.e;
    out.add(c, std::move(r));
  }
  return out;
}

double BoundaryDivisor::interior_defect() const {
  double d = 0.0;
  for (const auto& e : entries)
    if (e.puncture < 0) d = std::max(d, e.value.norm());
  return d;
}

double BoundaryDivisor::puncture_defect(const FuchsianSystem& system) const {
  double d = 0.0;
  for (const auto& e : entries)
    if (e.puncture >= 0) d = std::max(d, system.cartan(e.puncture).root_part(e.value).norm());
  return d;
}

bool BoundaryDivisor::is_cycle(double tol) const {
  for (const auto& e : entries)
    if (e.value.norm() > tol) return false;
  return true;
}

bool BoundaryDivisor::is_generalized_cycle(const FuchsianSystem& system, double tol) const {
  return interior_defect() <= tol && puncture_defect(system) <= tol;
}

Mat puncture_value(const FuchsianSystem& system, const Arc& arc, double tol) {
  if (arc.puncture_end < 0) throw Error(ErrorKind::InvalidArgument, "arc does not end at a puncture");
  const Path route = normalized_lead(arc.lead, arc.body.start()).then(arc.body);
  const Mat psi = transport(system, route).matrix;
  const LocalFrame f = local_frame_at(system, arc.puncture_end, arc.body.end(), psi, false);
  const Mat x = f.psi_j * arc.e * f.psi_j.inverse();
  const Mat d = f.cartan_part(x);
  if ((x - d).norm() > tol * std::max(1.0, x.norm()))
    throw Error(ErrorKind::InvalidArgument, "puncture-ending arc carries root components at the puncture");
  return d;
}

BoundaryDivisor boundary(const FuchsianSystem& system, const Chain& chain) {
  BoundaryDivisor div;
  const double merge = 1e-9 * system.scale();
  auto deposit = [&](cplx x, int puncture, const Mat& value) {
    for (auto& e : div.entries)
      if (e.puncture == puncture && std::abs(e.point - x) <= merge) {
        e.value += value;
        return;
      }
    div.entries.push_back({x, puncture, value});
  };
  for (const auto& [c, arc] : chain.terms) {
    const Path lead = normalized_lead(arc.lead, arc.body.start());
    const Mat psi0 = transport(system, lead).matrix;
    deposit(arc.body.start(), -1, -c * (psi0 * arc.e * psi0.inverse()));
    if (arc.puncture_end >= 0) {
      deposit(system.punctures()[arc.puncture_end], arc.puncture_end, c * puncture_value(system, arc));
    } else {
      const Mat psi1 = transport_from(system, arc.body, psi0).matrix;
      deposit(arc.body.end(), -1, c * (psi1 * arc.e * psi1.inverse()));
    }
  }
  return div;
}

cplx intersection(const FuchsianSystem& system, const Chain& chain1, const Chain& chain2) {
  IntersectionEngine engine(system);
  return engine.antisymmetric(chain1, chain2);
}

Arc loop_arc(const GeneratorLayout& layout, int j, const Mat& e, const Path& lead) {
  return Arc{normalized_lead(lead, layout.basepoint()), layout.loop(j), e, -1};
}

Arc puncture_arc(const GeneratorLayout& layout, int j, const Mat& e, const Path& lead) {
  return Arc{normalized_lead(lead, layout.basepoint()), layout.spoke(j), e, j};
}

PunctureSplit replace_puncture_arc(const FuchsianSystem& system, int j, const Mat& e, bool validate) {
  const LocalFrame f = local_frame(system, j);
  const Mat x = f.p_inv * f.psi_j * e * f.psi_j.inverse() * f.p;
  const int n = system.n();
  Mat dt = Mat::Zero(n, n);
  Mat ft = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (k == l) {
        dt(k, k) = x(k, k);
        continue;
      }
      const cplx denom = 1.0 - std::exp(kTwoPiI * (f.eigenvalues(k) - f.eigenvalues(l)));
      if (std::abs(denom) < 1e-10)
        throw Error(ErrorKind::IllConditionedSplit, "monodromy eigenvalue ratio too close to one");
      ft(k, l) = x(k, l) / denom;
    }
  const Mat back = f.psi_j.inverse() * f.p;
  const Mat back_inv = f.p_inv * f.psi_j;
  PunctureSplit out;
  out.e_comm = back * dt * back_inv;
  out.f = back * ft * back_inv;
  GeneratorLayout layout(system);
  out.chain.add(1.0, puncture_arc(layout, j, out.e_comm));
  out.chain.add(1.0, loop_arc(layout, j, out.f));
  if (!validate) return out;

  // Probe arcs crossing the spoke once, away from both ends.
  Chain original;
  original.add(1.0, puncture_arc(layout, j, e));
  std::mt19937_64 rng(0xfeed + static_cast<unsigned>(j));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const cplx x0 = layout.basepoint();
  const cplx s = layout.spoke_point(j);
  const cplx dir = (s - x0) / std::abs(s - x0);
  IntersectionEngine engine(system);
  double scale = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const cplx p = x0 + (0.2 + 0.6 * unit(rng)) * (s - x0);
    const double w = 0.25 * system.distance_to_punctures(p);
    const cplx a = p - cplx(0, 1) * dir * w;
    const cplx b = p + cplx(0, 1) * dir * w;
    Vec c = Vec::Random(system.algebra().dim());
    Chain probe;
    probe.add(1.0, Arc{straight(x0, a), straight(a, b), system.algebra().from_coords(c), -1});
    const cplx lhs = engine.antisymmetric(original, probe);
    const cplx rhs = engine.antisymmetric(out.chain, probe);
    out.probe_defect = std::max(out.probe_defect, std::abs(lhs - rhs));
    scale = std::max(scale, std::abs(lhs));
  }
  out.probe_defect /= std::max(1.0, scale);
  if (out.probe_defect > 1e-7)
    throw Error(ErrorKind::NoConvergence, "split arc does not reproduce the probe intersections");
  return out;
}

int count_block_parameters(int num_punctures, const LieAlgebra& algebra) {
  const int twice = (num_punctures - 2) * algebra.dim() - num_punctures * algebra.rank();
  if (twice < 0 || twice % 2 != 0)
    throw Error(ErrorKind::InvalidArgument, "block parameter count is not a nonnegative integer");
  return twice / 2;
}

CycleSpaceReport cycle_space(const FuchsianSystem& system) {
  system.require_valid();
  const LieAlgebra& g = system.algebra();
  const int d = g.dim();
  const int np = system.num_punctures();
  const std::vector<Mat> s = generator_monodromies(system);

  CycleSpaceReport r;
  r.l_matrix = Mat::Zero(d, np * d);
  std::vector<Mat> blocks;
  for (int j = 0; j < np; ++j) {
    blocks.push_back(Mat::Identity(d, d) - g.group_ad_matrix(s[j]));
    r.l_matrix.block(0, j * d, d, d) = blocks.back();
  }
  Eigen::JacobiSVD<Mat> svd(r.l_matrix);
  r.singular_values = svd.singularValues();
  const Mat kernel = null_space(r.l_matrix);
  r.kernel_dim = static_cast<int>(kernel.cols());

  // Decomposition of the contractible relation loop: letter k carries
  // the element conjugated by the monodromy of the preceding letters.
  const GeneratorLayout layout(system);
  Mat trivial = Mat::Zero(np * d, d);
  for (int a = 0; a < d; ++a) {
    Mat prefix = Mat::Identity(system.n(), system.n());
    for (int j : layout.relation_order()) {
      trivial.block(j * d, a, d, 1) = g.coords(prefix * g.basis()[a] * prefix.inverse());
      prefix = s[j] * prefix;
    }
  }
  const Mat t_basis = column_basis(trivial);
  r.trivial_rank = static_cast<int>(t_basis.cols());
  r.total = r.kernel_dim - r.trivial_rank;
  r.rank_deficiency = r.total != (np - 2) * d;

  Mat with_a = trivial;
  for (int j = 0; j < np; ++j) {
    const Mat comm = null_space(blocks[j]);
    Mat ext = Mat::Zero(np * d, comm.cols());
    ext.block(j * d, 0, d, comm.cols()) = comm;
    Mat joined(np * d, with_a.cols() + ext.cols());
    joined << with_a, ext;
    with_a = joined;
  }
  r.a_cycles = numerical_rank(with_a) - r.trivial_rank;
  r.remainder = r.total - r.a_cycles;
  const int twice = (np - 2) * d - np * g.rank();
  r.expected_remainder = twice >= 0 ? twice : 0;

  const Mat projected = kernel - t_basis * (t_basis.adjoint() * kernel);
  r.loop_cycles = column_basis(projected);
  return r;
}

Chain loop_chain(const FuchsianSystem& system, const GeneratorLayout& layout, const Vec& coords, const Path& lead) {
  const LieAlgebra& g = system.algebra();
  const int d = g.dim();
  Chain c;
  for (int j = 0; j < system.num_punctures(); ++j) {
    const Vec block = coords.segment(j * d, d);
    if (block.norm() == 0.0) continue;
    c.add(1.0, loop_arc(layout, j, g.from_coords(block), lead));
  }
  return c;
}

GeneralizedBasis generalized_basis(const FuchsianSystem& system) {
  const CycleSpaceReport r = cycle_space(system);
  GeneralizedBasis b;
  for (int k = 0; k < r.loop_cycles.cols(); ++k) b.loop_vectors.push_back(r.loop_cycles.col(k));
  const LieAlgebra& g = system.algebra();
  const auto solver = r.l_matrix.completeOrthogonalDecomposition();
  for (int j = 0; j < system.num_punctures(); ++j) {
    const LocalFrame f = local_frame(system, j);
    for (const Mat& h : system.cartan(j).cartan_basis()) {
      const Mat e = f.psi_j.inverse() * h * f.psi_j;
      const Vec rhs = -g.coords(e);
      const Vec sol = solver.solve(rhs);
      if ((r.l_matrix * sol - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm()))
        throw Error(ErrorKind::NoConvergence, "puncture arc cannot be closed by loops");
      b.b.emplace_back(j, e);
      b.b_closures.push_back(sol);
    }
  }
  return b;
}

Chain realize(const FuchsianSystem& system, const GeneralizedBasis& basis, int k, const GeneratorLayout& layout,
              const Path& lead) {
  const int nl = static_cast<int>(basis.loop_vectors.size());
  if (k < 0 || k >= basis.size()) throw Error(ErrorKind::InvalidArgument, "basis index out of range");
  if (k < nl) return loop_chain(system, layout, basis.loop_vectors[k], lead);
  const auto& [j, e] = basis.b[k - nl];
  Chain c;
  c.add(1.0, puncture_arc(layout, j, e, lead));
  c.append(loop_chain(system, layout, basis.b_closures[k - nl], lead));
  return c;
}

ShiftedRealization shifted_realization(const FuchsianSystem& system) {
  cplx centroid = 0.0;
  for (const auto& z : system.punctures()) centroid += z;
  centroid /= static_cast<double>(system.num_punctures());
  const cplx x0 = system.basepoint();
  const cplx shifted = x0 + 0.02 * cplx(0, 1) * (centroid - x0);
  return {GeneratorLayout(system, shifted, 15.0), straight(x0, shifted)};
}

IntersectionMatrixReport intersection_matrix(const FuchsianSystem& system, const GeneralizedBasis& basis) {
  const GeneratorLayout first(system, 10.0);
  const ShiftedRealization shifted = shifted_realization(system);
  const GeneratorLayout& second = shifted.layout;
  const Path& lead = shifted.lead;

  const int n = basis.size();
  std::vector<Chain> c1, c2;
  for (int k = 0; k < n; ++k) {
    c1.push_back(realize(system, basis, k, first));
    c2.push_back(realize(system, basis, k, second, lead));
  }
  IntersectionEngine engine(system);
  IntersectionMatrixReport rep;
  rep.matrix = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) rep.matrix(a, b) = engine.antisymmetric(c1[a], c2[b]);
  const double norm = rep.matrix.norm();
  rep.antisymmetry_defect = norm > 0.0 ? (rep.matrix + rep.matrix.transpose()).norm() / norm : 0.0;
  if (n > 0) {
    Eigen::JacobiSVD<Mat> svd(rep.matrix);
    const auto& s = svd.singularValues();
    rep.condition_ratio = s(0) > 0.0 ? s(s.size() - 1) / s(0) : 0.0;
  }
  rep.nondegenerate = n > 0 && rep.condition_ratio >= 1e-6;
  return rep;
}

Mat symplectic_reduction(const Mat& omega, double tol) {
  const int n = static_cast<int>(omega.rows());
  const Mat w = 0.5 * (omega - omega.transpose());
  auto form = [&w](const Vec& a, const Vec& b) -> cplx { return (a.transpose() * w * b)(0, 0); };
  std::vector<Vec> pool;
  for (int k = 0; k < n; ++k) pool.push_back(Mat::Identity(n, n).col(k));
  std::vector<Vec> es, fs;
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  while (pool.size() >= 2) {
    size_t bi = 0, bj = 1;
    double best = -1.0;
    for (size_t i = 0; i < pool.size(); ++i)
      for (size_t j = i + 1; j < pool.size(); ++j) {
        const double v = std::abs(form(pool[i], pool[j]));
        if (v > best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    if (best <= tol * scale) break;
    const Vec e = pool[bi];
    const Vec f = pool[bj] / form(pool[bi], pool[bj]);
    pool.erase(pool.begin() + static_cast<long>(bj));
    pool.erase(pool.begin() + static_cast<long>(bi));
    for (auto& v : pool) v = v - form(v, f) * e + form(v, e) * f;
    es.push_back(e);
    fs.push_back(f);
  }
  Mat t(n, n);
  int col = 0;
  for (const auto& e : es) t.col(col++) = e;
  for (const auto& f : fs) t.col(col++) = f;
  for (const auto& v : pool) t.col(col++) = v;
  return t;
}

cplx integrate_W1(const FuchsianSystem& system, const Chain& chain, double tol) {
  const double scale = system.algebra().trace_scale();
  cplx total = 0.0;
  for (const auto& [c, arc] : chain.terms) {
    const Mat psi0 = transport(system, normalized_lead(arc.lead, arc.body.start())).matrix;
    auto [integral, psi1] = integrate_w1(system, arc.body, psi0, arc.e, tol);
    if (arc.puncture_end >= 0) {
      const int j = arc.puncture_end;
      const cplx z = system.punctures()[j];
      const LocalFrame f = local_frame_at(system, j, arc.body.end(), psi1, false);
      const Mat x = f.psi_j * arc.e * f.psi_j.inverse();
      const Mat dval = f.cartan_part(x);
      if ((x - dval).norm() > 1e-7 * std::max(1.0, x.norm()))
        throw Error(ErrorKind::InvalidArgument, "puncture-ending arc carries root components at the puncture");
      const Mat& aj = system.residues()[j];
      const cplx cres = scale * (aj * dval).trace();
      // M(z + u) = G(u) D G(u)^{-1}; W_1 - c/u = sum_k R_k u^k.
      const int kmax = static_cast<int>(std::min(f.g.size() - 1, f.b.size()));
      const int n = system.n();
      std::vector<Mat> ginv{Mat::Identity(n, n)};
      for (int k = 1; k <= kmax; ++k) {
        Mat h = Mat::Zero(n, n);
        for (int m = 1; m <= k; ++m) h.noalias() -= f.g[m] * ginv[k - m];
        ginv.push_back(h);
      }
      std::vector<Mat> mser;
      for (int k = 0; k <= kmax; ++k) {
        Mat m = Mat::Zero(n, n);
        for (int p = 0; p <= k; ++p) m.noalias() += f.g[p] * dval * ginv[k - p];
        mser.push_back(m);
      }
      const cplx us = arc.body.end() - z;
      cplx tail = 0.0;
      cplx upow = us;
      for (int k = 0; k < kmax; ++k) {
        cplx rk = (aj * mser[k + 1]).trace();
        for (int p = 0; p <= k; ++p) rk += (f.b[p] * mser[k - p]).trace();
        tail += scale * rk * upow / static_cast<double>(k + 1);
        upow *= us;
      }
      integral += -cres * continuous_log_end(arc.body, z) - tail;
    }
    total += c * integral;
  }
  return total;
}

cplx a_cycle_period(const FuchsianSystem& system, int j, const Mat& h) {
  const LocalFrame f = local_frame(system, j);
  const GeneratorLayout layout(system);
  Chain c;
  c.add(1.0, loop_arc(layout, j, f.psi_j.inverse() * h * f.psi_j));
  return integrate_W1(system, c) / kTwoPiI;
}

}  // namespace fuchs
