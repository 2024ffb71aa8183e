#pragma once

#include <vector>

#include "fuchs/local_frame.hpp"
#include "fuchs/transport.hpp"

namespace fuchs {

/// Arc [gamma.E] in the bundle. The lift of `body` is fixed by `lead`, a
/// path from the basepoint to body.start(). With puncture_end = j the arc
/// continues radially from body.end() (inside the Frobenius disc) to z_j.
struct Arc {
  Path lead;
  Path body;
  Mat e;
  int puncture_end = -1;

  Path route() const { return lead.then(body); }
  /// Body plus the radial tail to the puncture, if any.
  Path geometry(const FuchsianSystem& system) const;
};

struct Chain {
  std::vector<std::pair<cplx, Arc>> terms;

  Chain& add(cplx coefficient, Arc arc);
  Chain& append(const Chain& other, cplx factor = 1.0);
  Chain scaled(cplx factor) const;
  Chain reversed() const;  ///< every arc traversed backwards
};

struct DivisorEntry {
  cplx point;
  int puncture = -1;  ///< index when the entry sits at a puncture
  Mat value;
};

struct BoundaryDivisor {
  std::vector<DivisorEntry> entries;
  /// Largest norm of an entry away from the punctures.
  double interior_defect() const;
  /// Largest root content (relative to A_j) among puncture entries.
  double puncture_defect(const FuchsianSystem& system) const;
  bool is_cycle(double tol = 1e-7) const;
  bool is_generalized_cycle(const FuchsianSystem& system, double tol = 1e-7) const;
};

/// Boundary: end values minus start values of M, merged by position.
BoundaryDivisor boundary(const FuchsianSystem& system, const Chain& chain);

/// Value of M at the puncture end of an arc: the Cartan part of
/// G(u)^{-1} M(s) G(u) at the body end s. Throws InvalidArgument when the
/// root content exceeds `tol` (relative).
Mat puncture_value(const FuchsianSystem& system, const Arc& arc, double tol = 1e-7);

/// Intersection form, antisymmetric by construction. Crossings at punctures
/// are skipped; vertex or collinear contacts trigger small perturbations of
/// chain2 and finally NonTransversal.
cplx intersection(const FuchsianSystem& system, const Chain& chain1, const Chain& chain2);

/// [delta_j.E] ~ [delta_j.E_comm] + [gamma_j.F] along the standard spoke.
struct PunctureSplit {
  Mat e_comm;
  Mat f;
  Chain chain;
  /// Largest mismatch of intersections with random probe arcs.
  double probe_defect = 0.0;
};
/// With `validate`, five random probe arcs crossing the spoke must see the
/// same intersections before and after (1e-7), else NoConvergence.
PunctureSplit replace_puncture_arc(const FuchsianSystem& system, int j, const Mat& e, bool validate = true);

/// Standard arcs from a generator layout. `lead` connects the system
/// basepoint to the layout basepoint (empty when they coincide).
Arc loop_arc(const GeneratorLayout& layout, int j, const Mat& e, const Path& lead = {});
Arc puncture_arc(const GeneratorLayout& layout, int j, const Mat& e, const Path& lead = {});

/// 𝒩 = ((N_p - 2) dim g - N_p rank g) / 2.
int count_block_parameters(int num_punctures, const LieAlgebra& algebra);

struct CycleSpaceReport {
  int kernel_dim = 0;
  int trivial_rank = 0;
  int total = 0;
  int a_cycles = 0;
  int remainder = 0;
  int expected_remainder = 0;
  bool rank_deficiency = false;  ///< total differs from (N_p - 2) dim g
  Eigen::VectorXd singular_values;
  /// Loop cycles modulo the trivial ones: columns are (E_1, ..., E_Np)
  /// coordinate vectors.
  Mat loop_cycles;
  /// Min-norm right inverse of L restricted to its image, used for B-type
  /// cycles: L(F) = sum_j (F_j - S_j F_j S_j^{-1}).
  Mat l_matrix;
};

CycleSpaceReport cycle_space(const FuchsianSystem& system);

/// Chain sum_j [gamma_j . E_j] for a coordinate vector of g^{N_p}.
Chain loop_chain(const FuchsianSystem& system, const GeneratorLayout& layout, const Vec& coords,
                 const Path& lead = {});

/// Generalized cycles of B type: [delta_j.Psi_j^{-1} H Psi_j] closed by loops.
struct GeneralizedBasis {
  std::vector<Vec> loop_vectors;        ///< loop cycles modulo trivial ones
  std::vector<std::pair<int, Mat>> b;   ///< (j, E) of each delta arc
  std::vector<Vec> b_closures;          ///< loop coordinates closing each delta arc
  int size() const { return static_cast<int>(loop_vectors.size() + b.size()); }
};
GeneralizedBasis generalized_basis(const FuchsianSystem& system);

/// Realization of basis element k on a layout (lead from the basepoint).
Chain realize(const FuchsianSystem& system, const GeneralizedBasis& basis, int k, const GeneratorLayout& layout,
              const Path& lead = {});

struct IntersectionMatrixReport {
  Mat matrix;
  double antisymmetry_defect = 0.0;  ///< ||M + M^T|| / ||M||
  double condition_ratio = 0.0;      ///< sigma_min / sigma_max
  bool nondegenerate = false;
};

/// Layout for the second argument of an intersection between cycles built
/// on the standard layout: basepoint moved slightly off x0, larger circles.
struct ShiftedRealization {
  GeneratorLayout layout;
  Path lead;
};
ShiftedRealization shifted_realization(const FuchsianSystem& system);

/// Intersection matrix of the generalized basis, second argument realized
/// from a slightly shifted basepoint with larger circles.
IntersectionMatrixReport intersection_matrix(const FuchsianSystem& system, const GeneralizedBasis& basis);

/// Symplectic Gram-Schmidt: columns T with T^T Omega T = [[0, I], [-I, 0]]
/// on the leading 2k columns (k = rank / 2).
Mat symplectic_reduction(const Mat& omega, double tol = 1e-8);

/// Integral of W_1 over a chain; puncture-ending arcs are regularized by
/// subtracting <A_j, E_j>/(x - z_j) and adding -<A_j, E_j> log(start - z_j).
cplx integrate_W1(const FuchsianSystem& system, const Chain& chain, double tol = 1e-11);

/// (1/2 pi i) times the W_1 integral over [gamma_j . Psi_j^{-1} H Psi_j].
cplx a_cycle_period(const FuchsianSystem& system, int j, const Mat& h);

}  // namespace fuchs
