#pragma once

#include <cstdint>
#include <vector>

#include "fuchs/system.hpp"

namespace fuchs {

struct SuiteOptions {
  std::uint64_t seed = 1;
  int jobs = 1;
  /// Scales every threshold of the suite.
  double tol_scale = 1.0;
};

/// Invariant suite applicable to any valid system: monodromy relation,
/// local frames, amplitudes, Casimir rationality, charges and, with at least
/// three punctures, the cycle calculus. Checks never throw; failures to
/// evaluate are reported as failed checks.
std::vector<CheckResult> invariant_suite(const FuchsianSystem& system, const SuiteOptions& options = {});

/// Random points at distance >= margin * scale from the punctures inside the
/// disc containing them.
std::vector<cplx> sample_points(const FuchsianSystem& system, int count, std::uint64_t seed, double margin = 0.1);

}  // namespace fuchs
