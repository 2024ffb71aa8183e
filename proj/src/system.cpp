#include "fuchs/system.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

namespace fuchs {

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

double point_segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  double t = std::real((p - a) * std::conj(d)) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

}  // namespace

FuchsianSystem::FuchsianSystem(LieAlgebra algebra, std::vector<cplx> punctures, std::vector<Mat> residues,
                               SystemOptions options)
    : algebra_(std::move(algebra)),
      punctures_(std::move(punctures)),
      residues_(std::move(residues)),
      options_(options),
      cache_(std::make_shared<MatrixCache>()) {
  if (punctures_.size() != residues_.size())
    throw Error(ErrorKind::InvalidArgument, "punctures and residues differ in length");
  if (punctures_.size() < 2) throw Error(ErrorKind::InvalidArgument, "at least two punctures required");
  for (const auto& a : residues_)
    if (a.rows() != algebra_.n() || a.cols() != algebra_.n())
      throw Error(ErrorKind::InvalidArgument, "residue has wrong shape");

  min_distance_ = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < punctures_.size(); ++i)
    for (size_t j = i + 1; j < punctures_.size(); ++j)
      min_distance_ = std::min(min_distance_, std::abs(punctures_[i] - punctures_[j]));
  clearance_ = options_.clearance > 0.0 ? options_.clearance : 1e-3 * min_distance_;
  basepoint_ = options_.basepoint ? *options_.basepoint : default_basepoint();

  std::uint64_t h = 14695981039346656037ULL;
  for (const auto& z : punctures_) h = fnv1a(h, &z, sizeof(z));
  for (const auto& a : residues_) h = fnv1a(h, a.data(), sizeof(cplx) * a.size());
  h = fnv1a(h, &basepoint_, sizeof(basepoint_));
  hash_ = h;

  validate();
}

FuchsianSystem FuchsianSystem::with_residues(std::vector<Mat> residues) const {
  SystemOptions opts = options_;
  opts.clearance = clearance_;
  opts.basepoint = basepoint_;
  return FuchsianSystem(algebra_, punctures_, std::move(residues), opts);
}

cplx FuchsianSystem::default_basepoint() const {
  // Outside the convex hull, in the direction whose radial lines through the
  // punctures keep the largest distance from the other punctures.
  cplx centroid = 0.0;
  for (const auto& z : punctures_) centroid += z;
  centroid /= static_cast<double>(punctures_.size());
  double spread = 0.0;
  for (const auto& z : punctures_) spread = std::max(spread, std::abs(z - centroid));
  const double dist = 2.0 * spread + min_distance_;

  cplx best = centroid + cplx(0.0, -dist);
  double best_score = -1.0;
  constexpr int kDirections = 72;
  for (int k = 0; k < kDirections; ++k) {
    const double theta = -std::numbers::pi / 2 + 2.0 * std::numbers::pi * k / kDirections;
    const cplx x0 = centroid + dist * std::polar(1.0, theta);
    double score = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < punctures_.size(); ++j) {
      const cplx dir = (punctures_[j] - x0) / std::abs(punctures_[j] - x0);
      const cplx far = x0 + dir * (3.0 * (dist + spread));
      for (size_t i = 0; i < punctures_.size(); ++i) {
        if (i == j) continue;
        score = std::min(score, point_segment_distance(punctures_[i], x0, far));
      }
    }
    if (score > best_score * (1.0 + 1e-9)) {
      best_score = score;
      best = x0;
    }
  }
  return best;
}

void FuchsianSystem::validate() {
  report_.checks.clear();
  const int n = algebra_.n();

  Mat sum = Mat::Zero(n, n);
  for (const auto& a : residues_) sum += a;
  const double sum_defect = sum.cwiseAbs().maxCoeff();
  report_.checks.push_back({"residue_sum", sum_defect <= 1e-12, sum_defect, "max |sum_j A_j| entry"});

  double trace_defect = 0.0;
  for (const auto& a : residues_) trace_defect = std::max(trace_defect, std::abs(a.trace()));
  report_.checks.push_back({"traceless", trace_defect <= 1e-12, trace_defect, "max |Tr A_j|"});

  const double sep = 10.0 * clearance_;
  report_.checks.push_back({"puncture_separation", min_distance_ >= sep, min_distance_,
                            "min pairwise distance vs 10*clearance"});

  const double base_dist = distance_to_punctures(basepoint_);
  report_.checks.push_back({"basepoint_clearance", base_dist >= clearance_, base_dist, "distance of x0"});

  cartan_.clear();
  bool generic = true;
  std::ostringstream gen_detail;
  for (size_t j = 0; j < residues_.size(); ++j) {
    try {
      cartan_.emplace_back(algebra_, residues_[j], options_.genericity_tol);
    } catch (const Error& e) {
      generic = false;
      gen_detail << "A_" << j + 1 << ": " << e.what() << "; ";
    }
  }
  report_.checks.push_back({"regular_semisimple", generic, generic ? 0.0 : 1.0, gen_detail.str()});

  double worst_resonance = std::numeric_limits<double>::infinity();
  bool resonant = false;
  std::ostringstream res_detail;
  if (generic) {
    for (size_t j = 0; j < residues_.size(); ++j) {
      const Vec& lam = cartan_[j].eigenvalues();
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          if (k == l) continue;
          const cplx d = lam(k) - lam(l);
          const double nearest = std::round(d.real());
          if (nearest == 0.0) continue;
          const double dist = std::abs(d - nearest);
          worst_resonance = std::min(worst_resonance, dist);
          if (dist <= options_.resonance_tol) {
            resonant = true;
            res_detail << "A_" << j + 1 << " eigenvalue difference near " << nearest << "; ";
          }
        }
    }
  }
  report_.checks.push_back({"non_resonant", generic && !resonant,
                            std::isfinite(worst_resonance) ? worst_resonance : 0.0, res_detail.str()});
}

void FuchsianSystem::require_valid() const {
  for (const auto& c : report_.checks) {
    if (c.pass) continue;
    if (c.name == "regular_semisimple") throw Error(ErrorKind::NonGenericElement, c.detail);
    if (c.name == "non_resonant") throw Error(ErrorKind::ResonantSystem, c.detail);
    throw Error(ErrorKind::InvalidSystem, c.name + " failed (defect " + std::to_string(c.defect) + ")");
  }
}

const CartanData& FuchsianSystem::cartan(int j) const {
  require_valid();
  return cartan_.at(static_cast<size_t>(j));
}

double FuchsianSystem::distance_to_punctures(cplx x) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& z : punctures_) d = std::min(d, std::abs(x - z));
  return d;
}

Mat FuchsianSystem::connection_unchecked(cplx x) const {
  Mat a = Mat::Zero(n(), n());
  for (size_t j = 0; j < punctures_.size(); ++j) a += residues_[j] / (x - punctures_[j]);
  return a;
}

Mat FuchsianSystem::connection_at(cplx x) const {
  if (distance_to_punctures(x) < clearance_)
    throw Error(ErrorKind::TooCloseToPuncture, "evaluation point within clearance of a puncture");
  return connection_unchecked(x);
}

std::vector<Mat> FuchsianSystem::connection_taylor(cplx x, int order) const {
  // 1/(x - z + s) = sum_m (-1)^m s^m / (x - z)^{m+1}
  std::vector<Mat> out(static_cast<size_t>(order) + 1, Mat::Zero(n(), n()));
  for (size_t j = 0; j < punctures_.size(); ++j) {
    const cplx inv = 1.0 / (x - punctures_[j]);
    cplx f = inv;
    for (int m = 0; m <= order; ++m) {
      out[m] += f * residues_[j];
      f *= -inv;
    }
  }
  return out;
}

ValidationReport validate(const FuchsianSystem& system) { return system.report(); }

}  // namespace fuchs
