#pragma once

// Slow definitional re-implementations used as independent oracles in tests.
// Nothing here shares code paths with the library beyond FunctionTable storage.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "cubetest/cube.hpp"

namespace oracle {

using cubetest::FunctionTable;

inline FunctionTable random_table(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> values(std::size_t{1} << n);
  for (auto& v : values) v = unit(rng);
  return FunctionTable(n, std::move(values));
}

inline std::uint64_t random_mask(int n, std::mt19937_64& rng) {
  return rng() & ((std::uint64_t{1} << n) - 1);
}

// f(x) + f(y) >= f(x & y) + f(x | y) for every pair.
inline bool all_pairs_submodular(const FunctionTable& f, double tol = 1e-9) {
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    for (std::uint64_t y = 0; y < f.size(); ++y) {
      if (f.at(x) + f.at(y) < f.at(x & y) + f.at(x | y) - tol) return false;
    }
  }
  return true;
}

// \hat f(T) = 2^-n sum_x f(x) (-1)^{|x & T|}
inline double fourier_coefficient(const FunctionTable& f, std::uint64_t t) {
  double sum = 0.0;
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    int parity = 0;
    for (std::uint64_t b = x & t; b != 0; b >>= 1) parity ^= static_cast<int>(b & 1U);
    sum += parity ? -f.at(x) : f.at(x);
  }
  return sum / static_cast<double>(f.size());
}

// Groups points by their restriction outside S and averages the population
// variance of each group.
inline double influence(const FunctionTable& f, std::uint64_t s) {
  std::map<std::uint64_t, std::vector<double>> groups;
  for (std::uint64_t x = 0; x < f.size(); ++x) groups[x & ~s].push_back(f.at(x));
  double total = 0.0;
  for (const auto& [key, values] : groups) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    total += var / static_cast<double>(values.size());
  }
  return total / static_cast<double>(groups.size());
}

// f_J by grouping points that agree on J.
inline std::vector<double> junta_average(const FunctionTable& f, std::uint64_t junta) {
  std::map<std::uint64_t, std::pair<double, int>> sums;
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    auto& [sum, count] = sums[x & junta];
    sum += f.at(x);
    ++count;
  }
  std::vector<double> out(f.size());
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    const auto& [sum, count] = sums[x & junta];
    out[x] = sum / count;
  }
  return out;
}

inline double l2(const std::vector<double>& a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum / static_cast<double>(a.size()));
}

// Every table on {0,1}^k with values in `grid`, in lexicographic order of the
// value tuple with point 0 most significant.
inline void for_each_grid_table(int k, const std::vector<double>& grid,
                                const std::function<void(const std::vector<double>&)>& visit) {
  const std::size_t points = std::size_t{1} << k;
  std::vector<std::size_t> digit(points, 0);
  std::vector<double> values(points, grid.front());
  while (true) {
    visit(values);
    std::size_t p = points;
    while (p > 0) {
      --p;
      if (++digit[p] < grid.size()) {
        values[p] = grid[digit[p]];
        break;
      }
      digit[p] = 0;
      values[p] = grid.front();
      if (p == 0) return;
    }
  }
}

// Normalized l2 distance from a 2-input core to the continuous set of
// submodular cores: the only constraint is v00 + v11 <= v10 + v01, so the
// distance is at least the distance to that half-space, (violation)/4.
inline double submodular_pair_lower_bound(const std::vector<double>& core) {
  const double violation = core[0] + core[3] - core[1] - core[2];
  return std::max(0.0, violation) / 4.0;
}

}  // namespace oracle
