#include "fuchs/malgrange.hpp"

#include <cmath>
#include <numbers>

namespace fuchs {

namespace {

constexpr cplx kTwoPiI(0.0, 2.0 * std::numbers::pi);

// P_k: monodromy of the first k generators in relation order, i.e. the
// solution at the hub reached from the outer sector after crossing k edges.
std::vector<Mat> prefix_monodromies(const FuchsianSystem& system, const std::vector<int>& order) {
  std::vector<Mat> p{Mat::Identity(system.n(), system.n())};
  for (int j : order) p.push_back(generator_monodromy(system, j) * p.back());
  return p;
}

std::vector<double> shifted(std::vector<double> t, int i, double by) {
  t[static_cast<size_t>(i)] += by;
  return t;
}

struct EdgeData {
  std::vector<MalgrangeTerm> terms;
  double hub_defect = 0.0;
};

EdgeData edge_terms(const ResidueFamily& family, const std::vector<double>& t, int direction, double h) {
  const FuchsianSystem sys = family.at(t);
  const StarGraph graph(sys);
  const auto p0 = prefix_monodromies(sys, graph.order);
  const auto pp = prefix_monodromies(family.at(shifted(t, direction, h)), graph.order);
  const auto pm = prefix_monodromies(family.at(shifted(t, direction, -h)), graph.order);
  const int np = sys.num_punctures();
  // Y_k = delta S_e S_e^{-1} conjugated by P_{k-1} telescopes to Z_k - Z_{k-1}
  // with Z_k = delta P_k P_k^{-1}.
  std::vector<Mat> z;
  for (int k = 0; k <= np; ++k) z.push_back((pp[k] - pm[k]) / (2.0 * h) * p0[k].inverse());
  EdgeData out;
  Mat sum = Mat::Zero(sys.n(), sys.n());
  for (int k = 1; k <= np; ++k) {
    MalgrangeTerm term;
    term.j = graph.order[k - 1];
    term.y = z[k] - z[k - 1];
    sum += term.y;
    const PunctureSplit split = replace_puncture_arc(sys, term.j, term.y, false);
    term.e_comm = split.e_comm;
    term.f = split.f;
    out.terms.push_back(std::move(term));
  }
  out.hub_defect = sum.norm();
  return out;
}

cplx omega_of(const FuchsianSystem& sys, const std::vector<MalgrangeTerm>& terms) {
  MalgrangeCycle c;
  c.terms = terms;
  return integrate_W1(sys, c.chain(GeneratorLayout(sys))) / kTwoPiI;
}

}  // namespace

FuchsianSystem ResidueFamily::at(const std::vector<double>& t) const {
  if (static_cast<int>(t.size()) != parameters())
    throw Error(ErrorKind::InvalidArgument, "family parameter count mismatch");
  std::vector<Mat> res = base.residues();
  for (int i = 0; i < parameters(); ++i) {
    if (directions[i].size() != res.size())
      throw Error(ErrorKind::InvalidArgument, "family direction has wrong number of residues");
    for (size_t j = 0; j < res.size(); ++j) res[j] += t[i] * directions[i][j];
  }
  return base.with_residues(std::move(res));
}

StarGraph::StarGraph(const FuchsianSystem& system)
    : hub(system.basepoint()), order(GeneratorLayout(system).relation_order()) {}

Chain MalgrangeCycle::chain(const GeneratorLayout& layout, const Path& lead) const {
  Chain c;
  for (const auto& t : terms) {
    c.add(1.0, puncture_arc(layout, t.j, t.e_comm, lead));
    c.add(1.0, loop_arc(layout, t.j, t.f, lead));
  }
  return c;
}

MalgrangeCycle malgrange_cycle(const ResidueFamily& family, const std::vector<double>& t, int direction, double h,
                               double boundary_tol) {
  if (direction < 0 || direction >= family.parameters())
    throw Error(ErrorKind::InvalidArgument, "family direction out of range");
  const FuchsianSystem sys = family.at(t);
  EdgeData edges = edge_terms(family, t, direction, h);
  MalgrangeCycle out;
  out.terms = std::move(edges.terms);

  const BoundaryDivisor div = boundary(sys, out.chain(GeneratorLayout(sys)));
  out.boundary_defect = std::max(div.interior_defect(), edges.hub_defect);
  out.puncture_defect = div.puncture_defect(sys);
  if (out.boundary_defect > boundary_tol || out.puncture_defect > boundary_tol)
    throw Error(ErrorKind::BoundaryCheckFailed, "B_delta is not a generalized cycle");

  out.omega = omega_of(sys, out.terms);
  const cplx half = omega_of(sys, edge_terms(family, t, direction, 0.5 * h).terms);
  out.fd_noise = std::abs(half - out.omega) / std::max(1e-300, std::abs(out.omega));
  return out;
}

MalgrangeCheck malgrange_check(const ResidueFamily& family, int d1, int d2, double h_out, double h,
                               double rel_tol) {
  const std::vector<double> t0(static_cast<size_t>(family.parameters()), 0.0);
  auto omega = [&](int along, double by, int dir) {
    return malgrange_cycle(family, shifted(t0, along, by), dir, h).omega;
  };
  const cplx w2p = omega(d1, h_out, d2), w2m = omega(d1, -h_out, d2);
  const cplx w1p = omega(d2, h_out, d1), w1m = omega(d2, -h_out, d1);
  MalgrangeCheck r;
  r.d_omega = (w2p - w2m) / (2.0 * h_out) - (w1p - w1m) / (2.0 * h_out);
  r.d_omega_swapped = (w1p - w1m) / (2.0 * h_out) - (w2p - w2m) / (2.0 * h_out);

  const FuchsianSystem sys = family.at(t0);
  const MalgrangeCycle b1 = malgrange_cycle(family, t0, d1, h);
  const MalgrangeCycle b2 = malgrange_cycle(family, t0, d2, h);
  const ShiftedRealization second = shifted_realization(sys);
  r.intersection = intersection(sys, b1.chain(GeneratorLayout(sys)), b2.chain(second.layout, second.lead));
  r.boundary_defect = std::max(b1.boundary_defect, b2.boundary_defect);
  r.fd_noise = std::max(b1.fd_noise, b2.fd_noise);
  r.relative_error = std::abs(r.d_omega - r.intersection) / std::max(std::abs(r.intersection), 1e-300);
  r.pass = r.relative_error <= rel_tol;
  return r;
}

}  // namespace fuchs
