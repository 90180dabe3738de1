#pragma once

// Data-parallel inner loops over full hypercube tables.
//
// `parallel::` holds the OpenMP kernels used by the library. `serial::` holds
// straight-line reference versions with identical signatures; they are kept
// for the kernel tests and the benchmark and are not used on hot paths.

#include <cstdint>
#include <span>
#include <vector>

namespace cubetest {

// Spreads the low bits of `index` onto the set bits of `mask` (software pdep).
inline std::uint64_t deposit_bits(std::uint64_t index, std::uint64_t mask) {
  std::uint64_t out = 0;
  for (std::uint64_t bit = 1; mask != 0; bit <<= 1) {
    const std::uint64_t lowest = mask & (~mask + 1);
    if (index & bit) out |= lowest;
    mask ^= lowest;
  }
  return out;
}

namespace serial {

// Unnormalized in-place Walsh-Hadamard butterfly; size must be a power of two.
void walsh_hadamard_inplace(std::span<double> data);
// sum_x |a[x] - b[x]|^p
double power_distance_sum(std::span<const double> a, std::span<const double> b, double p);
// Sum, over assignments to the coordinates outside `subset`, of the population
// variance of f over the 2^|subset| completions.
double influence_variance_sum(std::span<const double> values, int n, std::uint64_t subset);
// f_J: each point replaced by the mean of f over the coordinates outside `junta`.
std::vector<double> junta_average(std::span<const double> values, int n, std::uint64_t junta);

}  // namespace serial

namespace parallel {

void walsh_hadamard_inplace(std::span<double> data);
double power_distance_sum(std::span<const double> a, std::span<const double> b, double p);
double influence_variance_sum(std::span<const double> values, int n, std::uint64_t subset);
std::vector<double> junta_average(std::span<const double> values, int n, std::uint64_t junta);

}  // namespace parallel

}  // namespace cubetest
