// Acceptance report: one PASS/FAIL line per criterion. Exits 0 after
// reporting unless --strict is given, in which case any failure is an error.

#include <chrono>
#include <cstring>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "fuchs/amplitudes.hpp"
#include "fuchs/checks.hpp"
#include "fuchs/cycles.hpp"
#include "fuchs/local_frame.hpp"
#include "fuchs/malgrange.hpp"
#include "fuchs/samples.hpp"

using namespace fuchs;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(3);
  o << v;
  return o.str();
}

std::vector<cplx> random_points(const FuchsianSystem& s, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  std::vector<cplx> xs;
  while (static_cast<int>(xs.size()) < count) {
    const cplx x(u(rng), u(rng));
    if (s.distance_to_punctures(x) >= 0.1) xs.push_back(x);
  }
  return xs;
}

Outcome closed_form_oracles() {
  const double a = 0.3;
  const auto s = two_pole_sl2(a);
  const cplx x0 = s.basepoint();
  double tr = 0.0, eig = 0.0, w1 = 0.0;
  for (cplx x : {cplx(0.5, -0.4), cplx(-0.7, -0.2), cplx(1.3, 0.01), cplx(0.2, -0.05), cplx(-0.3, -0.9)}) {
    // Psi = exp(A_1 (log((x - z1)/(x - z2)) - same at x0)), continued along the straight path
    const cplx l = std::log((x - 0.0) / (x - 1.0)) - std::log((x0 - 0.0) / (x0 - 1.0));
    Mat want = Mat::Zero(2, 2);
    want(0, 0) = std::exp(a * l);
    want(1, 1) = std::exp(-a * l);
    tr = std::max(tr, (transport(s, straight(x0, x)).matrix - want).norm() / want.norm());
    // E commuting with the residues: W_1 = <A(x), E>
    const Mat e = cplx(0.7, -0.2) * s.residues()[0];
    const cplx w = w_connected(s, std::vector<BundlePoint>{point_at(s, x, e)});
    w1 = std::max(w1, rel(w, s.algebra().killing(s.connection_at(x), e)));
  }
  for (int j = 0; j < 2; ++j) {
    Eigen::ComplexEigenSolver<Mat> es(generator_monodromy(s, j));
    const cplx q = std::exp(cplx(0, 2 * std::numbers::pi * a));
    for (int k = 0; k < 2; ++k) {
      const cplx v = es.eigenvalues()(k);
      eig = std::max(eig, std::min(std::abs(v - q), std::abs(v - 1.0 / q)));
    }
  }
  return {tr <= 1e-8 && eig <= 1e-8 && w1 <= 1e-8,
          "transport " + fmt(tr) + ", eigenvalues " + fmt(eig) + ", W1 " + fmt(w1)};
}

Outcome monodromy_relations() {
  const auto s = random_system(2, 3, 11);
  const Mat id = Mat::Identity(2, 2);
  const double relation = (monodromy(s, relation_word(s)) - id).norm();
  GeneratorLayout layout(s);
  double shift = 0.0;
  for (int j = 0; j < 3; ++j) {
    const Mat t = transport(s, layout.spoke(j)).matrix;
    const Mat around = transport_from(s, layout.circle(j), t).matrix;
    shift = std::max(shift, (t.inverse() * around - generator_monodromy(s, j)).norm());
  }
  double homotopy = 0.0;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (cplx x : random_points(s, 5, 12)) {
    const Path p({s.basepoint(), 0.5 * (s.basepoint() + x) + cplx(0.05, 0.05), x});
    if (p.length() <= 0) continue;
    Path q = p;
    q.vertices[1] += cplx(u(rng), u(rng)) * s.clearance();
    homotopy = std::max(homotopy, (transport(s, p).matrix - transport(s, q).matrix).norm());
  }
  return {relation <= 1e-8 && shift <= 1e-8 && homotopy <= 10 * s.transport_tol(),
          "relation " + fmt(relation) + ", basepoint shift " + fmt(shift) + ", homotopy " + fmt(homotopy)};
}

Outcome local_frames() {
  double worst = 0.0;
  for (const auto& s : {random_system(2, 3, 11), random_system(3, 4, 2)})
    for (int j = 0; j < s.num_punctures(); ++j)
      worst = std::max(worst, (local_frame(s, j).monodromy() - generator_monodromy(s, j)).norm());
  return {worst <= 1e-6, "worst " + fmt(worst)};
}

Outcome rationality() {
  double worst = 0.0, fit = 0.0;
  for (const auto& s : {random_system(2, 3, 11), random_system(3, 3, 4)}) {
    const auto c2 = casimir_tensor(s.algebra(), 2);
    const auto xs = random_points(s, 20, 17);
    std::vector<cplx> vals;
    for (cplx x : xs) {
      vals.push_back(casimir_amplitude(s, c2, straight(s.basepoint(), x)));
      worst = std::max(worst, rel(vals.back(), direct_rational_W2C2(s, x)));
    }
    fit = std::max(fit, fit_rational(s, xs, vals, 2).residual);
  }
  return {worst <= 1e-7 && fit <= 1e-6, "direct " + fmt(worst) + ", fit residual " + fmt(fit)};
}

Outcome normal_ordering() {
  const auto s = random_system(2, 3, 11);
  const auto c2 = casimir_tensor(s.algebra(), 2);
  double worst = 0.0;
  for (cplx x : random_points(s, 10, 3)) {
    const Path route = straight(s.basepoint(), x);
    const cplx diff = normal_ordered_casimir_amplitude(s, c2, route) - casimir_amplitude(s, c2, route);
    worst = std::max(worst, rel(diff, normal_order_correction_W2C2(s, x)));
  }
  return {worst <= 1e-8, "worst " + fmt(worst)};
}

Outcome short_distance() {
  const auto s = random_system(2, 3, 11);
  const auto xs = random_points(s, 3, 21);
  std::vector<BundlePoint> pts;
  for (int i = 0; i < 3; ++i) pts.push_back(point_at(s, xs[i], random_traceless(2, 300 + i)));
  const auto r = short_distance_check(s, random_traceless(2, 9), pts[0], cplx(1.0, 0.5), {pts[1], pts[2]});
  return {r.pass && r.spread <= 3.0, "spread " + fmt(r.spread)};
}

Outcome puncture_asymptotics() {
  const auto s = random_system(2, 3, 11);
  const auto extra = point_at(s, cplx(-0.3, 0.05), random_traceless(2, 401));
  double residue = 0.0, exponent = 0.0;
  for (int j = 0; j < 3; ++j) {
    const LocalFrame lf = local_frame(s, j);
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = -1.0;
    const Mat e = lf.psi_j.inverse() * lf.p * d * lf.p_inv * lf.psi_j;
    const auto r = puncture_asymptotics_check(s, j, e, {extra});
    residue = std::max(residue, r.residue_error);
    exponent = std::max(exponent, r.exponent_error);
  }
  return {residue <= 1e-4 && exponent <= 1e-3, "pole " + fmt(residue) + ", exponents " + fmt(exponent)};
}

Outcome cycle_counts() {
  struct Case {
    int n, np, total, a, rem;
  };
  std::string detail;
  bool pass = true;
  for (const Case& c : {Case{2, 3, 3, 3, 0}, Case{2, 4, 6, 4, 2}, Case{3, 3, 8, 6, 2}}) {
    const auto s = random_system(c.n, c.np, 11 + 7 * c.n + c.np);
    const auto r = cycle_space(s);
    pass = pass && r.total == c.total && r.a_cycles == c.a && r.remainder == c.rem &&
           r.remainder == r.expected_remainder;
    detail += (detail.empty() ? "" : "; ") + std::string("sl") + std::to_string(c.n) + "/" + std::to_string(c.np) +
              " (" + std::to_string(r.total) + "," + std::to_string(r.a_cycles) + "," + std::to_string(r.remainder) +
              ")";
  }
  return {pass, detail};
}

Outcome intersection_identity() {
  const auto s = random_system(2, 3, 21);
  const GeneratorLayout layout(s);
  double worst = 0.0;
  bool antisym = true;
  const cplx x0 = layout.basepoint();
  for (int j = 0; j < 3; ++j) {
    const Mat f = random_traceless(2, 100 + j), e2 = random_traceless(2, 200 + j);
    const Mat sj = generator_monodromy(s, j);
    // straight probe across the spoke of z_j, positively oriented
    const cplx dir = (layout.spoke_point(j) - x0) / std::abs(layout.spoke_point(j) - x0);
    const cplx p = x0 + 0.5 * (layout.spoke_point(j) - x0);
    const double w = 0.2 * s.distance_to_punctures(p);
    const cplx a = p - cplx(0, 1) * dir * w, b = p + cplx(0, 1) * dir * w;
    Chain c1, c2;
    c1.add(1.0, loop_arc(layout, j, f));
    c2.add(1.0, Arc{straight(x0, a), straight(a, b), e2, -1});
    const cplx want = s.algebra().trace_form(f * e2) - s.algebra().trace_form(sj * f * sj.inverse() * e2);
    const cplx got = intersection(s, c1, c2);
    worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
    antisym = antisym && intersection(s, c2, c1) == -got;
  }
  double ratio = 1.0, defect = 0.0;
  for (auto [n, np, seed] : {std::tuple{2, 3, 3}, std::tuple{2, 4, 4}, std::tuple{3, 3, 5}}) {
    const auto r = random_system(n, np, seed);
    const auto rep = intersection_matrix(r, generalized_basis(r));
    ratio = std::min(ratio, rep.condition_ratio);
    defect = std::max(defect, rep.antisymmetry_defect);
  }
  return {worst <= 1e-7 && antisym && ratio >= 1e-6,
          "identity " + fmt(worst) + ", exact antisymmetry " + (antisym ? "yes" : "no") + ", basis antisymmetry " +
              fmt(defect) + ", min singular ratio " + fmt(ratio)};
}

Outcome a_cycle_periods() {
  double worst = 0.0;
  for (const auto& s : {random_system(2, 3, 11), random_system(3, 3, 8)})
    for (int j = 0; j < s.num_punctures(); ++j)
      for (const Mat& h : s.cartan(j).cartan_basis()) {
        const cplx want = s.algebra().trace_form(h * s.residues()[j]);
        worst = std::max(worst, std::abs(a_cycle_period(s, j, h) - want) / std::max(1.0, std::abs(want)));
      }
  return {worst <= 1e-6, "worst " + fmt(worst)};
}

Outcome malgrange_form() {
  SystemOptions o;
  o.transport_tol = 1e-12;
  ResidueFamily fam{random_system(2, 3, 7, 0.4, o), {}};
  for (int i = 0; i < 2; ++i) {
    std::vector<Mat> d;
    Mat sum = Mat::Zero(2, 2);
    for (int j = 0; j < 2; ++j) {
      d.push_back(random_traceless(2, 50 + 10 * i + j, 0.3));
      sum += d.back();
    }
    d.push_back(-sum);
    fam.directions.push_back(d);
  }
  const auto r = malgrange_check(fam);
  std::ostringstream d;
  d << "boundary " << fmt(r.boundary_defect) << ", d omega " << r.d_omega << " vs (B1,B2) " << r.intersection
    << ", relative " << fmt(r.relative_error);
  return {r.boundary_defect <= 1e-5 && r.relative_error <= 1e-2, d.str()};
}

Outcome partition_identity() {
  const auto s = random_system(2, 3, 11);
  const auto xs = random_points(s, 4, 31);
  std::vector<BundlePoint> pts;
  for (int i = 0; i < 4; ++i) pts.push_back(point_at(s, xs[i], random_traceless(2, 100 + i)));
  const auto fr = frames_of(s, pts);
  double worst = 0.0;
  for (int n = 2; n <= 4; ++n) {
    const std::vector<PointFrame> sub(fr.begin(), fr.begin() + n);
    worst = std::max(worst, rel(w_disconnected(s, sub), w_from_partitions(s, sub)));
  }
  return {worst <= 1e-10, "worst " + fmt(worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double limit;  // seconds, 0 for none
  };
  const std::vector<Criterion> criteria = {
      {"closed-form oracles", closed_form_oracles, 5},
      {"monodromy relations", monodromy_relations, 30},
      {"local frame consistency", local_frames, 0},
      {"Casimir rationality", rationality, 120},
      {"normal-ordered correction", normal_ordering, 0},
      {"short-distance structure", short_distance, 0},
      {"puncture asymptotics", puncture_asymptotics, 0},
      {"cycle counts", cycle_counts, 0},
      {"intersection identity", intersection_identity, 0},
      {"A-cycle periods", a_cycle_periods, 0},
      {"Malgrange form", malgrange_form, 300},
      {"partition identity", partition_identity, 0},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (criteria[i].limit > 0 && t > criteria[i].limit) {
      o.pass = false;
      o.detail += ", over time limit";
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].name << " (" << fmt(t)
              << " s): " << o.detail << std::endl;
  }
  std::cout << criteria.size() - failures << "/" << criteria.size() << " criteria pass" << std::endl;
  return strict && failures ? 1 : 0;
}
