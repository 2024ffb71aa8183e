#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "fuchs/amplitudes.hpp"
#include "fuchs/checks.hpp"
#include "fuchs/cycles.hpp"
#include "fuchs/io.hpp"
#include "fuchs/local_frame.hpp"
#include "fuchs/malgrange.hpp"
#include "fuchs/samples.hpp"

using namespace fuchs;
namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string system_path;
  std::string family_path;
  std::string out_dir = "fuchs_out";
  double tol = 0.0;  // transport tolerance override; 0 keeps the file's value
  double fit_tol = 1e-6;
  double extrapolation_tol = 1e-6;
  std::uint64_t seed = 1;
  int jobs = 1;
  // subcommand arguments
  std::vector<std::string> points;
  std::string word;
  int grid = 16;
  int degree = 2;
  bool normal_ordered = false;
  int d1 = 0, d2 = 1;
  double h_out = 1e-3;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV writer with fixed formatting so reruns are byte-identical.
class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error(ErrorKind::Io, "cannot write " + path.string());
    row_strings(header);
  }
  Csv& operator<<(double v) { return field(num(v)); }
  Csv& operator<<(int v) { return field(std::to_string(v)); }
  Csv& operator<<(const std::string& v) { return field(v); }
  Csv& operator<<(cplx z) { return field(num(z.real())).field(num(z.imag())); }
  void end() {
    out_ << line_.str() << '\n';
    line_.str("");
    first_ = true;
  }

 private:
  Csv& field(const std::string& s) {
    if (!first_) line_ << ',';
    line_ << s;
    first_ = false;
    return *this;
  }
  void row_strings(const std::vector<std::string>& v) {
    for (const auto& s : v) field(s);
    end();
  }
  std::ofstream out_;
  std::ostringstream line_;
  bool first_ = true;
};

FuchsianSystem load(const RunConfig& cfg) {
  if (cfg.system_path.empty()) throw Error(ErrorKind::InvalidArgument, "--system is required");
  Json j = read_json(cfg.system_path);
  if (cfg.tol > 0) j["tolerances"]["transport"] = cfg.tol;
  return system_from_json(j);
}

Json checks_json(const std::vector<CheckResult>& checks) {
  Json a = Json::array();
  for (const auto& c : checks) a.push_back({{"name", c.name}, {"pass", c.pass}, {"defect", c.defect}, {"detail", c.detail}});
  return a;
}

/// Fails with InvalidSystem (and the failing checks in the message) unless valid.
void require(const FuchsianSystem& s) {
  if (s.valid()) return;
  std::string what;
  for (const auto& c : s.report().checks)
    if (!c.pass) what += (what.empty() ? "" : "; ") + c.name + " defect " + num(c.defect);
  throw Error(ErrorKind::InvalidSystem, what);
}

cplx parse_point(const std::string& text) {
  std::istringstream in(text);
  double re = 0, im = 0;
  char comma = 0;
  if (!(in >> re >> comma >> im) || comma != ',') throw Error(ErrorKind::InvalidArgument, "point must be re,im: " + text);
  return {re, im};
}

int cmd_validate(const RunConfig& cfg, Json& summary) {
  const auto s = load(cfg);
  summary["checks"] = checks_json(s.report().checks);
  summary["valid"] = s.valid();
  Csv csv(fs::path(cfg.out_dir) / "validate.csv", {"check", "pass", "defect"});
  for (const auto& c : s.report().checks) {
    csv << c.name << (c.pass ? 1 : 0) << c.defect;
    csv.end();
  }
  require(s);
  return 0;
}

int cmd_monodromy(const RunConfig& cfg, Json& summary) {
  const auto s = load(cfg);
  require(s);
  const int n = s.n();
  Csv csv(fs::path(cfg.out_dir) / "monodromy.csv", {"loop", "row", "col", "re", "im", "residual"});
  auto emit = [&](const std::string& name, const Mat& m, double residual) {
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        csv << name << r << c << m(r, c) << residual;
        csv.end();
      }
  };
  GeneratorLayout layout(s);
  Json gens = Json::array();
  for (int j = 0; j < s.num_punctures(); ++j) {
    const Mat sj = generator_monodromy(s, j);
    // residual: disagreement with the local frame at z_j
    const double residual = (local_frame(s, j).monodromy() - sj).norm();
    emit("g" + std::to_string(j + 1), sj, residual);
    gens.push_back({{"loop", "g" + std::to_string(j + 1)}, {"det_defect", std::abs(sj.determinant() - 1.0)},
                    {"local_frame_residual", residual}});
  }
  summary["generators"] = gens;
  summary["relation_order"] = layout.relation_order();
  const double rel = (monodromy(s, relation_word(s)) - Mat::Identity(n, n)).norm();
  summary["relation_word"] = relation_word(s).str();
  summary["relation_defect"] = rel;
  bool pass = rel <= 1e-8;
  if (!cfg.word.empty()) {
    const LoopWord w = LoopWord::parse(cfg.word);
    const Mat m = monodromy(s, w);
    const double det = std::abs(m.determinant() - 1.0);
    emit(w.str(), m, det);
    summary["word"] = {{"word", w.str()}, {"det_defect", det}};
  }
  summary["pass"] = pass;
  return pass ? 0 : 1;
}

int cmd_amplitude(const RunConfig& cfg, Json& summary) {
  const auto s = load(cfg);
  require(s);
  std::vector<cplx> xs;
  for (const auto& p : cfg.points) xs.push_back(parse_point(p));
  if (xs.empty()) xs = sample_points(s, 4, cfg.seed);
  if (static_cast<int>(xs.size()) > kMaxAmplitudePoints) throw Error(ErrorKind::TooManyPoints, "at most 8 points");
  std::vector<BundlePoint> pts;
  for (size_t i = 0; i < xs.size(); ++i) pts.push_back(point_at(s, xs[i], random_traceless(s.n(), cfg.seed + i)));
  const auto fr = frames_of(s, pts);
  Csv csv(fs::path(cfg.out_dir) / "amplitude.csv",
          {"n", "W_re", "W_im", "What_re", "What_im", "partition_residual"});
  double worst = 0.0;
  for (size_t n = 1; n <= fr.size(); ++n) {
    const std::vector<PointFrame> sub(fr.begin(), fr.begin() + n);
    const cplx w = w_connected(s, sub), what = w_disconnected(s, sub);
    const double residual = std::abs(what - w_from_partitions(s, sub)) / std::max(std::abs(what), 1e-300);
    worst = std::max(worst, residual);
    csv << static_cast<int>(n) << w << what << residual;
    csv.end();
  }
  Json p = Json::array();
  for (size_t i = 0; i < xs.size(); ++i)
    p.push_back({{"x", complex_to_json(xs[i])}, {"E", matrix_to_json(pts[i].e)}});
  summary["points"] = p;
  summary["worst_partition_residual"] = worst;
  summary["pass"] = worst <= 1e-10;
  return worst <= 1e-10 ? 0 : 1;
}

int cmd_casimir_scan(const RunConfig& cfg, Json& summary) {
  const auto s = load(cfg);
  require(s);
  if (cfg.grid < 2) throw Error(ErrorKind::InvalidArgument, "grid must be at least 2");
  const auto tensor = casimir_tensor(s.algebra(), cfg.degree);
  const bool hat = cfg.normal_ordered || cfg.degree == 3;
  // grid over the box containing the punctures, skipping points near them
  double lo_re = 1e300, hi_re = -1e300, lo_im = 1e300, hi_im = -1e300;
  for (cplx z : s.punctures()) {
    lo_re = std::min(lo_re, z.real()), hi_re = std::max(hi_re, z.real());
    lo_im = std::min(lo_im, z.imag()), hi_im = std::max(hi_im, z.imag());
  }
  const double pad = 0.5 * s.scale();
  std::vector<cplx> xs;
  for (int a = 0; a < cfg.grid; ++a)
    for (int b = 0; b < cfg.grid; ++b) {
      const cplx x(lo_re - pad + (hi_re - lo_re + 2 * pad) * (a + 0.5) / cfg.grid,
                   lo_im - pad + (hi_im - lo_im + 2 * pad) * (b + 0.5) / cfg.grid);
      if (s.distance_to_punctures(x) > 0.1 * s.scale() && std::abs(x - s.basepoint()) > 1e-6) xs.push_back(x);
    }
  std::vector<cplx> vals(xs.size());
  std::vector<std::future<void>> work;
  const int jobs = std::max(1, cfg.jobs);
  for (int w = 0; w < jobs; ++w)
    work.push_back(std::async(std::launch::async, [&, w] {
      for (size_t i = w; i < xs.size(); i += jobs) {
        const Path route = straight(s.basepoint(), xs[i]);
        vals[i] = hat ? normal_ordered_casimir_amplitude(s, tensor, route) : casimir_amplitude(s, tensor, route);
      }
    }));
  for (auto& w : work) w.get();

  const RationalFit fit = fit_rational(s, xs, vals, cfg.degree);
  Csv csv(fs::path(cfg.out_dir) / "casimir_scan.csv", {"x_re", "x_im", "value_re", "value_im", "residual"});
  for (size_t i = 0; i < xs.size(); ++i) {
    // residual against the closed rational expression where it exists,
    // otherwise against the rational fit
    double residual;
    if (cfg.degree == 2) {
      cplx want = direct_rational_W2C2(s, xs[i]);
      if (hat) want += normal_order_correction_W2C2(s, xs[i]);
      residual = std::abs(vals[i] - want) / std::max(std::abs(want), 1e-300);
    } else {
      cplx f = fit.coefficients(0);
      int k = 1;
      for (cplx z : s.punctures())
        for (int p = 1; p <= cfg.degree; ++p) f += fit.coefficients(k++) * std::pow(xs[i] - z, -p);
      residual = std::abs(vals[i] - f) / std::max(std::abs(vals[i]), 1e-300);
    }
    csv << xs[i] << vals[i] << residual;
    csv.end();
  }
  summary["degree"] = cfg.degree;
  summary["normal_ordered"] = hat;
  summary["points"] = xs.size();
  summary["fit_residual"] = fit.residual;
  summary["fit_threshold"] = cfg.fit_tol;
  const bool pass = fit.residual <= cfg.fit_tol;
  summary["pass"] = pass;
  return pass ? 0 : 1;
}

int cmd_charges(const RunConfig& cfg, Json& summary) {
  const auto s = load(cfg);
  require(s);
  Csv csv(fs::path(cfg.out_dir) / "charges.csv",
          {"puncture", "degree", "value_re", "value_im", "extrapolation_error", "residual"});
  bool pass = true;
  Json rows = Json::array();
  for (int degree = 2; degree <= std::min(3, s.n()); ++degree)
    for (int j = 0; j < s.num_punctures(); ++j) {
      const auto q = extract_charge(s, degree, j);
      // degree 2 has an independent contour-integral oracle; degree 3 only
      // the extrapolation error
      double residual = q.extrapolation_error / std::max(std::abs(q.value), 1e-300);
      if (degree == 2) {
        const cplx want = charge_oracle_degree2(s, j);
        residual = std::abs(q.value - want) / std::max(std::abs(want), 1e-300);
      }
      pass = pass && residual <= cfg.extrapolation_tol;
      csv << j + 1 << degree << q.value << q.extrapolation_error << residual;
      csv.end();
      rows.push_back({{"puncture", j + 1}, {"degree", degree}, {"value", complex_to_json(q.value)},
                      {"residual", residual}});
    }
  summary["charges"] = rows;
  summary["pass"] = pass;
  return pass ? 0 : 1;
}

int cmd_cycles(const RunConfig& cfg, Json& summary) {
  const auto s = load(cfg);
  require(s);
  if (s.num_punctures() < 3) throw Error(ErrorKind::InvalidArgument, "cycle calculus needs at least three punctures");
  const auto r = cycle_space(s);
  summary["total"] = r.total;
  summary["a_cycles"] = r.a_cycles;
  summary["remainder"] = r.remainder;
  summary["expected_remainder"] = r.expected_remainder;
  summary["rank_deficiency"] = r.rank_deficiency;
  const auto basis = generalized_basis(s);
  const auto rep = intersection_matrix(s, basis);
  summary["generalized_basis_size"] = basis.size();
  summary["antisymmetry_defect"] = rep.antisymmetry_defect;
  summary["condition_ratio"] = rep.condition_ratio;
  summary["nondegenerate"] = rep.nondegenerate;
  Csv csv(fs::path(cfg.out_dir) / "intersection.csv", {"i", "j", "re", "im", "residual"});
  for (int i = 0; i < rep.matrix.rows(); ++i)
    for (int j = 0; j < rep.matrix.cols(); ++j) {
      csv << i << j << rep.matrix(i, j) << std::abs(rep.matrix(i, j) + rep.matrix(j, i));
      csv.end();
    }
  const bool pass = r.remainder == r.expected_remainder && !r.rank_deficiency && rep.nondegenerate &&
                    rep.antisymmetry_defect <= 1e-6;
  summary["pass"] = pass;
  return pass ? 0 : 1;
}

int cmd_periods(const RunConfig& cfg, Json& summary) {
  const auto s = load(cfg);
  require(s);
  Csv csv(fs::path(cfg.out_dir) / "periods.csv", {"cycle", "value_re", "value_im", "residual"});
  bool pass = true;
  // A-cycles: (1/2 pi i) integral equals <H, A_j>
  for (int j = 0; j < s.num_punctures(); ++j) {
    int k = 0;
    for (const Mat& h : s.cartan(j).cartan_basis()) {
      const cplx v = a_cycle_period(s, j, h);
      const cplx want = s.algebra().trace_form(h * s.residues()[j]);
      const double residual = std::abs(v - want) / std::max(1.0, std::abs(want));
      pass = pass && residual <= 1e-6;
      csv << "A" + std::to_string(j + 1) + "." + std::to_string(++k) << v << residual;
      csv.end();
    }
  }
  if (s.num_punctures() >= 3) {
    // generalized basis; residual is the boundary test of the realized chain
    const auto basis = generalized_basis(s);
    const GeneratorLayout layout(s);
    const cplx two_pi_i(0.0, 2.0 * std::numbers::pi);
    for (int k = 0; k < basis.size(); ++k) {
      const Chain c = realize(s, basis, k, layout);
      const auto d = boundary(s, c);
      const double residual = std::max(d.interior_defect(), d.puncture_defect(s));
      pass = pass && residual <= 1e-7;
      csv << "C" + std::to_string(k + 1) << integrate_W1(s, c) / two_pi_i << residual;
      csv.end();
    }
  }
  summary["pass"] = pass;
  return pass ? 0 : 1;
}

int cmd_malgrange(const RunConfig& cfg, Json& summary) {
  if (cfg.family_path.empty()) throw Error(ErrorKind::InvalidArgument, "--family is required");
  auto family = load_family(cfg.family_path);
  if (cfg.tol > 0) {
    Json j = system_to_json(family.base);
    j["tolerances"]["transport"] = cfg.tol;
    family.base = system_from_json(j);
  }
  require(family.base);
  const std::vector<double> t(family.parameters(), 0.0);
  Csv csv(fs::path(cfg.out_dir) / "malgrange.csv",
          {"direction", "puncture", "y_norm", "e_comm_norm", "f_norm", "omega_re", "omega_im", "residual"});
  for (int d : {cfg.d1, cfg.d2}) {
    const auto c = malgrange_cycle(family, t, d);
    for (const auto& term : c.terms) {
      csv << d << term.j + 1 << term.y.norm() << term.e_comm.norm() << term.f.norm() << c.omega
          << std::max(c.boundary_defect, c.puncture_defect);
      csv.end();
    }
  }
  const auto r = malgrange_check(family, cfg.d1, cfg.d2, cfg.h_out);
  summary["d_omega"] = complex_to_json(r.d_omega);
  summary["intersection"] = complex_to_json(r.intersection);
  summary["relative_error"] = r.relative_error;
  summary["boundary_defect"] = r.boundary_defect;
  summary["fd_noise"] = r.fd_noise;
  summary["pass"] = r.pass;
  return r.pass ? 0 : 1;
}

int cmd_check(const RunConfig& cfg, Json& summary) {
  const auto s = load(cfg);
  const auto checks = invariant_suite(s, {cfg.seed, cfg.jobs, 1.0});
  Csv csv(fs::path(cfg.out_dir) / "check.csv", {"check", "pass", "defect"});
  bool pass = true;
  for (const auto& c : checks) {
    pass = pass && c.pass;
    csv << c.name << (c.pass ? 1 : 0) << c.defect;
    csv.end();
    std::cout << (c.pass ? "PASS  " : "FAIL  ") << c.name << "  " << c.detail << '\n';
  }
  summary["checks"] = checks_json(checks);
  summary["pass"] = pass;
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuchsian system amplitudes, monodromy and cycles"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--system", cfg.system_path, "system definition (JSON)")->envname("FUCHS_SYSTEM");
  app.add_option("--out", cfg.out_dir, "output directory")->envname("FUCHS_OUT");
  app.add_option("--tol", cfg.tol, "transport tolerance")->envname("FUCHS_TOL")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "seed for randomized probes")->envname("FUCHS_SEED");
  app.add_option("--jobs", cfg.jobs, "parallelism degree")->envname("FUCHS_JOBS")->check(CLI::PositiveNumber);
  app.add_option("--fit-tol", cfg.fit_tol, "rational fit residual threshold")
      ->envname("FUCHS_FIT_TOL")
      ->check(CLI::PositiveNumber);
  app.add_option("--extrapolation-tol", cfg.extrapolation_tol, "charge extrapolation threshold")
      ->envname("FUCHS_EXTRAPOLATION_TOL")
      ->check(CLI::PositiveNumber);

  using Handler = int (*)(const RunConfig&, Json&);
  std::vector<std::pair<CLI::App*, Handler>> subs;
  subs.emplace_back(app.add_subcommand("validate", "re-verify system invariants"), cmd_validate);
  auto* mono = app.add_subcommand("monodromy", "generator monodromies and the product relation");
  mono->add_option("--word", cfg.word, "extra loop word, e.g. \"g1 g2^-1\"");
  subs.emplace_back(mono, cmd_monodromy);
  auto* amp = app.add_subcommand("amplitude", "W_n and W^_n at listed points");
  amp->add_option("--point", cfg.points, "point re,im (repeatable); random if absent");
  subs.emplace_back(amp, cmd_amplitude);
  auto* scan = app.add_subcommand("casimir-scan", "Casimir amplitude on a grid with a rational fit");
  scan->add_option("--grid", cfg.grid, "grid points per side");
  scan->add_option("--degree", cfg.degree, "Casimir degree (2 or 3)")->check(CLI::Range(2, 3));
  scan->add_flag("--normal-ordered", cfg.normal_ordered, "normal-ordered amplitude");
  subs.emplace_back(scan, cmd_casimir_scan);
  subs.emplace_back(app.add_subcommand("charges", "charges at each puncture"), cmd_charges);
  subs.emplace_back(app.add_subcommand("cycles", "cycle space dimensions and intersection matrix"), cmd_cycles);
  subs.emplace_back(app.add_subcommand("periods", "periods of W_1 on A-cycles and the generalized basis"),
                    cmd_periods);
  auto* mal = app.add_subcommand("malgrange", "Malgrange cycles on a residue family");
  mal->add_option("--family", cfg.family_path, "family file (JSON)")->envname("FUCHS_FAMILY");
  mal->add_option("--d1", cfg.d1, "first direction");
  mal->add_option("--d2", cfg.d2, "second direction");
  mal->add_option("--h-out", cfg.h_out, "outer finite-difference step")->check(CLI::PositiveNumber);
  subs.emplace_back(mal, cmd_malgrange);
  subs.emplace_back(app.add_subcommand("check", "full invariant suite"), cmd_check);

  CLI11_PARSE(app, argc, argv);

  Json summary;
  std::string name;
  int status = 0;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fs::create_directories(cfg.out_dir);
    for (auto& [sub, handler] : subs)
      if (sub->parsed()) {
        name = sub->get_name();
        summary["command"] = name;
        summary["seed"] = cfg.seed;
        status = handler(cfg, summary);
      }
  } catch (const Error& e) {
    Json err = {{"command", name}, {"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}};
    std::cout << err.dump(2) << '\n';
    try {
      write_json(fs::path(cfg.out_dir) / "error.json", err);
    } catch (const Error&) {
    }
    return 2;
  } catch (const std::exception& e) {
    Json err = {{"command", name}, {"error", {{"kind", "Internal"}, {"message", e.what()}}}};
    std::cout << err.dump(2) << '\n';
    return 2;
  }
  summary["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_json(fs::path(cfg.out_dir) / (name + ".json"), summary);
  std::cout << summary.dump(2) << '\n';
  return status;
}
