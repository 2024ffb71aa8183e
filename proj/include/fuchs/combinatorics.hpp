#pragma once

#include <functional>
#include <vector>

namespace fuchs {

using Cycles = std::vector<std::vector<int>>;

/// Calls f(sign, cycles) for every permutation of {0..n-1}; each cycle is
/// listed as (i, sigma(i), sigma^2(i), ...) starting from its smallest element.
void for_each_permutation(int n, const std::function<void(int, const Cycles&)>& f);

/// Calls f(order) for every cyclic order (0, sigma(0), sigma^2(0), ...) of a
/// single n-cycle.
void for_each_circular(int n, const std::function<void(const std::vector<int>&)>& f);

/// All set partitions of {0..n-1} (blocks in increasing order of minimum).
std::vector<Cycles> set_partitions(int n);

}  // namespace fuchs
