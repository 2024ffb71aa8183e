#pragma once

#include <vector>

#include "fuchs/cycles.hpp"

namespace fuchs {

/// Linear residue family A_j(t) = A_j + sum_i t_i D_{i,j}; each direction
/// must sum to zero over the punctures. Punctures, basepoint and clearance
/// are those of the base system.
struct ResidueFamily {
  FuchsianSystem base;
  std::vector<std::vector<Mat>> directions;

  int parameters() const { return static_cast<int>(directions.size()); }
  FuchsianSystem at(const std::vector<double>& t) const;
};

/// Star graph: edges from the hub (the basepoint) straight to each
/// puncture, in the angular order of the generator relation. The complement
/// of the graph in the sphere is simply connected.
struct StarGraph {
  cplx hub;
  std::vector<int> order;
  explicit StarGraph(const FuchsianSystem& system);
};

/// One edge term of B_delta: the logarithmic derivative of the jump across
/// the edge into z_j, moved to the basepoint lift, and its split into a
/// Cartan-valued puncture arc plus a loop.
struct MalgrangeTerm {
  int j = 0;
  Mat y;
  Mat e_comm;
  Mat f;
};

struct MalgrangeCycle {
  std::vector<MalgrangeTerm> terms;
  cplx omega = 0.0;
  /// Norm of the boundary at the hub (the sum of the edge terms).
  double boundary_defect = 0.0;
  /// Root content of the puncture entries after the split.
  double puncture_defect = 0.0;
  /// Relative change of omega when the difference step is halved.
  double fd_noise = 0.0;

  /// B_delta on a layout; `lead` joins the system basepoint to the layout's.
  Chain chain(const GeneratorLayout& layout, const Path& lead = {}) const;
};

/// B_delta for the derivative along `direction` at parameter t, with
/// omega = (1/2 pi i) times the W_1 period. Throws BoundaryCheckFailed when
/// the boundary is not a generalized cycle to `boundary_tol`.
MalgrangeCycle malgrange_cycle(const ResidueFamily& family, const std::vector<double>& t, int direction,
                               double h = 1e-5, double boundary_tol = 1e-5);

struct MalgrangeCheck {
  cplx d_omega = 0.0;       ///< finite-difference exterior derivative
  cplx d_omega_swapped = 0.0;
  cplx intersection = 0.0;  ///< (B_delta1, B_delta2)
  double relative_error = 0.0;
  double boundary_defect = 0.0;
  double fd_noise = 0.0;
  bool pass = false;
};

/// d omega(delta_1, delta_2) by central differences of step h_out (omega
/// itself uses step h) against the intersection of the two cycles.
MalgrangeCheck malgrange_check(const ResidueFamily& family, int d1 = 0, int d2 = 1, double h_out = 1e-3,
                               double h = 1e-5, double rel_tol = 1e-2);

}  // namespace fuchs
