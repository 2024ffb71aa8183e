#include "fuchs/combinatorics.hpp"

#include <algorithm>
#include <numeric>

namespace fuchs {

void for_each_permutation(int n, const std::function<void(int, const Cycles&)>& f) {
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::vector<char> seen(n);
  Cycles cycles;
  do {
    cycles.clear();
    std::fill(seen.begin(), seen.end(), 0);
    for (int i = 0; i < n; ++i) {
      if (seen[i]) continue;
      std::vector<int> c;
      for (int k = i; !seen[k]; k = sigma[k]) {
        seen[k] = 1;
        c.push_back(k);
      }
      cycles.push_back(std::move(c));
    }
    const int sign = ((n - static_cast<int>(cycles.size())) % 2 == 0) ? 1 : -1;
    f(sign, cycles);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
}

void for_each_circular(int n, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> rest(std::max(0, n - 1));
  std::iota(rest.begin(), rest.end(), 1);
  std::vector<int> order(n);
  do {
    order[0] = 0;
    std::copy(rest.begin(), rest.end(), order.begin() + 1);
    f(order);
  } while (std::next_permutation(rest.begin(), rest.end()));
}

namespace {

void partitions_rec(int i, int n, Cycles& current, std::vector<Cycles>& out) {
  if (i == n) {
    out.push_back(current);
    return;
  }
  for (size_t b = 0; b < current.size(); ++b) {
    current[b].push_back(i);
    partitions_rec(i + 1, n, current, out);
    current[b].pop_back();
  }
  current.push_back({i});
  partitions_rec(i + 1, n, current, out);
  current.pop_back();
}

}  // namespace

std::vector<Cycles> set_partitions(int n) {
  std::vector<Cycles> out;
  Cycles current;
  partitions_rec(0, n, current, out);
  return out;
}

}  // namespace fuchs
