#include "fuchs/checks.hpp"

#include <functional>
#include <future>
#include <numbers>
#include <random>
#include <sstream>

#include "fuchs/amplitudes.hpp"
#include "fuchs/cycles.hpp"
#include "fuchs/local_frame.hpp"
#include "fuchs/samples.hpp"
#include "fuchs/transport.hpp"

namespace fuchs {

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

CheckResult make(std::string name, double defect, double threshold) {
  std::ostringstream d;
  d << "defect " << defect << " threshold " << threshold;
  return {std::move(name), defect <= threshold, defect, d.str()};
}

using Check = std::function<CheckResult()>;

}  // namespace

std::vector<cplx> sample_points(const FuchsianSystem& system, int count, std::uint64_t seed, double margin) {
  cplx centre = 0.0;
  for (cplx z : system.punctures()) centre += z;
  centre /= static_cast<double>(system.num_punctures());
  double reach = 0.0;
  for (cplx z : system.punctures()) reach = std::max(reach, std::abs(z - centre));
  reach = std::max(reach, system.scale()) * 1.2;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-reach, reach);
  std::vector<cplx> out;
  while (static_cast<int>(out.size()) < count) {
    const cplx x = centre + cplx(u(rng), u(rng));
    if (system.distance_to_punctures(x) < margin * system.scale()) continue;
    if (std::abs(x - system.basepoint()) < margin * system.scale()) continue;
    out.push_back(x);
  }
  return out;
}

std::vector<CheckResult> invariant_suite(const FuchsianSystem& s, const SuiteOptions& opt) {
  std::vector<CheckResult> out;
  for (const auto& c : s.report().checks) out.push_back(c);
  if (!s.valid()) return out;

  const double k = opt.tol_scale;
  const int np = s.num_punctures();
  const int n = s.n();
  const auto xs = sample_points(s, 8, opt.seed);
  std::vector<std::pair<std::string, Check>> checks;

  checks.emplace_back("monodromy relation", [&] {
    return make("", (monodromy(s, relation_word(s)) - Mat::Identity(n, n)).norm(), 1e-8 * k);
  });
  checks.emplace_back("basepoint shift along loops", [&] {
    GeneratorLayout layout(s);
    double worst = 0.0;
    for (int j = 0; j < np; ++j) {
      const Mat t = transport(s, layout.spoke(j)).matrix;
      const Mat around = transport_from(s, layout.circle(j), t).matrix;
      worst = std::max(worst, (t.inverse() * around - generator_monodromy(s, j)).norm());
    }
    return make("", worst, 1e-8 * k);
  });
  checks.emplace_back("monodromy eigenvalues", [&] {
    double worst = 0.0;
    for (int j = 0; j < np; ++j) {
      Eigen::ComplexEigenSolver<Mat> es(generator_monodromy(s, j));
      const Vec& lam = s.cartan(j).eigenvalues();
      for (int a = 0; a < n; ++a) {
        const cplx want = std::exp(2.0 * std::numbers::pi * cplx(0, 1) * lam(a));
        double best = 1e300;
        for (int b = 0; b < n; ++b) best = std::min(best, std::abs(es.eigenvalues()(b) - want));
        worst = std::max(worst, best);
      }
    }
    return make("", worst, 1e-8 * k);
  });
  checks.emplace_back("local frame monodromy", [&] {
    double worst = 0.0;
    for (int j = 0; j < np; ++j) worst = std::max(worst, (local_frame(s, j).monodromy() - generator_monodromy(s, j)).norm());
    return make("", worst, 1e-6 * k);
  });
  checks.emplace_back("W1 against the connection", [&] {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      const auto p = point_at(s, xs[i], random_traceless(n, opt.seed + i));
      const cplx want = s.algebra().killing(s.connection_at(xs[i]), evaluate_M(s, p));
      worst = std::max(worst, rel(w_connected(s, std::vector<BundlePoint>{p}), want));
    }
    return make("", worst, 1e-8 * k);
  });
  checks.emplace_back("partition identity n=2..4", [&] {
    std::vector<BundlePoint> pts;
    for (int i = 0; i < 4; ++i) pts.push_back(point_at(s, xs[i], random_traceless(n, opt.seed + 10 + i)));
    const auto fr = frames_of(s, pts);
    double worst = 0.0;
    for (int m = 2; m <= 4; ++m) {
      const std::vector<PointFrame> sub(fr.begin(), fr.begin() + m);
      worst = std::max(worst, rel(w_disconnected(s, sub), w_from_partitions(s, sub)));
    }
    return make("", worst, 1e-10 * k);
  });
  checks.emplace_back("Casimir amplitude is rational", [&] {
    const auto c2 = casimir_tensor(s.algebra(), 2);
    const auto pts = sample_points(s, 12, opt.seed + 20);
    std::vector<cplx> vals;
    double worst = 0.0;
    for (cplx x : pts) {
      vals.push_back(casimir_amplitude(s, c2, straight(s.basepoint(), x)));
      worst = std::max(worst, rel(vals.back(), direct_rational_W2C2(s, x)));
    }
    const double residual = fit_rational(s, pts, vals, 2).residual;
    CheckResult c = make("", worst, 1e-7 * k);
    c.pass = c.pass && residual <= 1e-6 * k;
    std::ostringstream d;
    d << " fit residual " << residual;
    c.detail += d.str();
    return c;
  });
  checks.emplace_back("normal-ordered correction", [&] {
    const auto c2 = casimir_tensor(s.algebra(), 2);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      const Path route = straight(s.basepoint(), xs[i]);
      const cplx diff = normal_ordered_casimir_amplitude(s, c2, route) - casimir_amplitude(s, c2, route);
      worst = std::max(worst, rel(diff, normal_order_correction_W2C2(s, xs[i])));
    }
    return make("", worst, 1e-8 * k);
  });
  checks.emplace_back("degree-2 charges", [&] {
    double worst = 0.0;
    for (int j = 0; j < np; ++j) worst = std::max(worst, rel(extract_charge(s, 2, j).value, charge_oracle_degree2(s, j)));
    return make("", worst, 1e-6 * k);
  });
  if (np >= 3) {
    checks.emplace_back("A-cycle periods", [&] {
      double worst = 0.0;
      for (int j = 0; j < np; ++j)
        for (const Mat& h : s.cartan(j).cartan_basis()) {
          const cplx want = s.algebra().trace_form(h * s.residues()[j]);
          worst = std::max(worst, std::abs(a_cycle_period(s, j, h) - want) / std::max(1.0, std::abs(want)));
        }
      return make("", worst, 1e-6 * k);
    });
    checks.emplace_back("cycle space dimensions", [&] {
      const auto r = cycle_space(s);
      CheckResult c = make("", std::abs(r.remainder - r.expected_remainder), 0.0);
      std::ostringstream d;
      d << "total " << r.total << " A-cycles " << r.a_cycles << " remainder " << r.remainder << " expected "
        << r.expected_remainder;
      c.detail = d.str();
      c.pass = c.pass && !r.rank_deficiency;
      return c;
    });
    checks.emplace_back("intersection form", [&] {
      const auto rep = intersection_matrix(s, generalized_basis(s));
      CheckResult c = make("", rep.antisymmetry_defect, 1e-6 * k);
      c.pass = c.pass && rep.nondegenerate;
      std::ostringstream d;
      d << " singular value ratio " << rep.condition_ratio;
      c.detail += d.str();
      return c;
    });
  }

  std::vector<std::future<CheckResult>> futures;
  std::vector<CheckResult> results(checks.size());
  const size_t jobs = static_cast<size_t>(std::max(1, opt.jobs));
  for (size_t start = 0; start < checks.size(); start += jobs) {
    futures.clear();
    for (size_t i = start; i < std::min(checks.size(), start + jobs); ++i)
      futures.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, [&, i] {
        try {
          return checks[i].second();
        } catch (const std::exception& e) {
          return CheckResult{"", false, std::numeric_limits<double>::infinity(), e.what()};
        }
      }));
    for (size_t i = start; i < std::min(checks.size(), start + jobs); ++i) {
      results[i] = futures[i - start].get();
      results[i].name = checks[i].first;
    }
  }
  out.insert(out.end(), results.begin(), results.end());
  return out;
}

}  // namespace fuchs
