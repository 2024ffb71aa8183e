#pragma once

#include <cstdint>

#include "fuchs/system.hpp"

namespace fuchs {

/// sl_2 with z = {z1, z2}, A_1 = diag(a, -a), A_2 = -A_1.
FuchsianSystem two_pole_sl2(cplx a = 0.3, cplx z1 = 0.0, cplx z2 = 1.0, SystemOptions options = {});

/// Random sl_N system with `num_punctures` punctures: residues are random
/// traceless matrices of Frobenius norm about `size`, the last one fixed by
/// the residue sum. Punctures are spread on a perturbed circle of radius 1.
/// Draws are repeated until the system validates.
FuchsianSystem random_system(int n, int num_punctures, std::uint64_t seed, double size = 0.4,
                             SystemOptions options = {});

/// Random traceless N x N matrix with i.i.d. complex Gaussian entries.
Mat random_traceless(int n, std::uint64_t seed, double size = 1.0);

}  // namespace fuchs
