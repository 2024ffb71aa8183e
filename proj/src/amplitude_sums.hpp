#pragma once

#include <vector>

#include "fuchs/amplitudes.hpp"

namespace fuchs::detail {

/// Kernel matrices K(x_i, x_k), row-major over (i, k).
std::vector<Mat> kernel_table(const FuchsianSystem& system, const std::vector<PointFrame>& pts);
/// E_i K(x_i, x_k) from a kernel table.
std::vector<Mat> vertex_table(const std::vector<Mat>& k, const std::vector<Mat>& e);
cplx disconnected_sum(const std::vector<Mat>& f, int n, double scale);
cplx connected_sum(const std::vector<Mat>& f, int n, double scale);

}  // namespace fuchs::detail
