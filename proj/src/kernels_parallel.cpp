#include "cubetest/kernels.hpp"

#include <bit>
#include <cmath>

namespace cubetest::parallel {

namespace {

// Below this many table entries the thread fan-out costs more than it saves.
constexpr std::int64_t kParallelCutoff = 1 << 12;

std::uint64_t full_mask(int n) { return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1); }

}  // namespace

void walsh_hadamard_inplace(std::span<double> data) {
  const auto size = static_cast<std::int64_t>(data.size());
  const std::int64_t pairs = size / 2;
  // One team for all stages; the implicit barrier after each `omp for` orders them.
#pragma omp parallel if (size >= kParallelCutoff)
  for (std::int64_t half = 1; half < size; half <<= 1) {
#pragma omp for schedule(static)
    for (std::int64_t t = 0; t < pairs; ++t) {
      const std::int64_t low = t & (half - 1);
      const std::int64_t j = ((t - low) << 1) | low;
      const double a = data[j];
      const double b = data[j + half];
      data[j] = a + b;
      data[j + half] = a - b;
    }
  }
}

double power_distance_sum(std::span<const double> a, std::span<const double> b, double p) {
  const auto size = static_cast<std::int64_t>(a.size());
  double sum = 0.0;
#pragma omp parallel for reduction(+ : sum) schedule(static) if (size >= kParallelCutoff)
  for (std::int64_t x = 0; x < size; ++x) sum += std::pow(std::abs(a[x] - b[x]), p);
  return sum;
}

double influence_variance_sum(std::span<const double> values, int n, std::uint64_t subset) {
  const std::uint64_t rest = full_mask(n) & ~subset;
  const auto outer_count = static_cast<std::int64_t>(std::uint64_t{1} << std::popcount(rest));
  const double inner = std::ldexp(1.0, std::popcount(subset));
  double total = 0.0;
#pragma omp parallel for reduction(+ : total) schedule(static) \
    if (static_cast<std::int64_t>(values.size()) >= kParallelCutoff && outer_count > 1)
  for (std::int64_t t = 0; t < outer_count; ++t) {
    const std::uint64_t outer = deposit_bits(static_cast<std::uint64_t>(t), rest);
    double mean = 0.0;
    std::uint64_t y = 0;
    do {
      mean += values[outer | y];
      y = (y - subset) & subset;
    } while (y != 0);
    mean /= inner;
    double var = 0.0;
    y = 0;
    do {
      const double d = values[outer | y] - mean;
      var += d * d;
      y = (y - subset) & subset;
    } while (y != 0);
    total += var / inner;
  }
  return total;
}

std::vector<double> junta_average(std::span<const double> values, int n, std::uint64_t junta) {
  const std::uint64_t rest = full_mask(n) & ~junta;
  const auto kept_count = static_cast<std::int64_t>(std::uint64_t{1} << std::popcount(junta));
  const double count = std::ldexp(1.0, std::popcount(rest));
  std::vector<double> out(values.size());
#pragma omp parallel for schedule(static) \
    if (static_cast<std::int64_t>(values.size()) >= kParallelCutoff && kept_count > 1)
  for (std::int64_t t = 0; t < kept_count; ++t) {
    const std::uint64_t kept = deposit_bits(static_cast<std::uint64_t>(t), junta);
    double mean = 0.0;
    std::uint64_t y = 0;
    do {
      mean += values[kept | y];
      y = (y - rest) & rest;
    } while (y != 0);
    mean /= count;
    y = 0;
    do {
      out[kept | y] = mean;
      y = (y - rest) & rest;
    } while (y != 0);
  }
  return out;
}

}  // namespace cubetest::parallel
