#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "fuchs/lie.hpp"

namespace fuchs {

struct SystemOptions {
  /// Minimum distance from any path to any puncture; 0 selects
  /// 1e-3 times the smallest pairwise puncture distance.
  double clearance = 0.0;
  std::optional<cplx> basepoint;
  double genericity_tol = 1e-8;
  double resonance_tol = 1e-8;
  double transport_tol = 1e-10;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double defect = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool ok() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Thread-safe memo of matrices keyed by a 64-bit hash. Concurrent inserts
/// of the same key are idempotent (last write wins).
class MatrixCache {
 public:
  std::optional<Mat> find(std::uint64_t key) const {
    std::shared_lock lock(mutex_);
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  void insert(std::uint64_t key, const Mat& value) {
    std::unique_lock lock(mutex_);
    map_[key] = value;
  }
  size_t size() const {
    std::shared_lock lock(mutex_);
    return map_.size();
  }

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::uint64_t, Mat> map_;
};

/// Fuchsian connection A(x) = sum_j A_j / (x - z_j) on the punctured sphere.
class FuchsianSystem {
 public:
  FuchsianSystem(LieAlgebra algebra, std::vector<cplx> punctures, std::vector<Mat> residues,
                 SystemOptions options = {});

  const LieAlgebra& algebra() const { return algebra_; }
  int n() const { return algebra_.n(); }
  int num_punctures() const { return static_cast<int>(punctures_.size()); }
  const std::vector<cplx>& punctures() const { return punctures_; }
  const std::vector<Mat>& residues() const { return residues_; }
  const SystemOptions& options() const { return options_; }

  double clearance() const { return clearance_; }
  /// Smallest pairwise puncture distance.
  double scale() const { return min_distance_; }
  cplx basepoint() const { return basepoint_; }
  double transport_tol() const { return options_.transport_tol; }

  const ValidationReport& report() const { return report_; }
  bool valid() const { return report_.ok(); }
  /// Throws InvalidSystem / ResonantSystem / NonGenericElement if validation failed.
  void require_valid() const;

  /// Root data of A_j; only available on a valid system.
  const CartanData& cartan(int j) const;

  /// A(x); throws TooCloseToPuncture within clearance of a puncture.
  Mat connection_at(cplx x) const;
  Mat connection_unchecked(cplx x) const;
  /// Taylor coefficients of A around x: A(x + s) = sum_m coeffs[m] s^m.
  std::vector<Mat> connection_taylor(cplx x, int order) const;
  double distance_to_punctures(cplx x) const;

  std::uint64_t hash() const { return hash_; }
  MatrixCache& cache() const { return *cache_; }

  /// Same punctures and options with new residues (cache not shared).
  FuchsianSystem with_residues(std::vector<Mat> residues) const;

 private:
  void validate();
  cplx default_basepoint() const;

  LieAlgebra algebra_;
  std::vector<cplx> punctures_;
  std::vector<Mat> residues_;
  SystemOptions options_;
  double clearance_ = 0.0;
  double min_distance_ = 0.0;
  cplx basepoint_;
  ValidationReport report_;
  std::vector<CartanData> cartan_;
  std::uint64_t hash_ = 0;
  std::shared_ptr<MatrixCache> cache_;
};

ValidationReport validate(const FuchsianSystem& system);

}  // namespace fuchs
