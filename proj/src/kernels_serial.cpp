#include "cubetest/kernels.hpp"

#include <bit>
#include <cmath>

namespace cubetest::serial {

void walsh_hadamard_inplace(std::span<double> data) {
  const std::size_t size = data.size();
  for (std::size_t half = 1; half < size; half <<= 1) {
    for (std::size_t block = 0; block < size; block += 2 * half) {
      for (std::size_t j = block; j < block + half; ++j) {
        const double a = data[j];
        const double b = data[j + half];
        data[j] = a + b;
        data[j + half] = a - b;
      }
    }
  }
}

double power_distance_sum(std::span<const double> a, std::span<const double> b, double p) {
  double sum = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) sum += std::pow(std::abs(a[x] - b[x]), p);
  return sum;
}

double influence_variance_sum(std::span<const double> values, int n, std::uint64_t subset) {
  const std::uint64_t rest = (n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1)) & ~subset;
  const double inner = std::ldexp(1.0, std::popcount(subset));
  double total = 0.0;
  // Walk the submasks of `rest`, then of `subset`, in increasing order.
  std::uint64_t outer = 0;
  do {
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
    outer = (outer - rest) & rest;
  } while (outer != 0);
  return total;
}

std::vector<double> junta_average(std::span<const double> values, int n, std::uint64_t junta) {
  const std::uint64_t rest = (n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1)) & ~junta;
  const double count = std::ldexp(1.0, std::popcount(rest));
  std::vector<double> out(values.size());
  std::uint64_t kept = 0;
  do {
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
    kept = (kept - junta) & junta;
  } while (kept != 0);
  return out;
}

}  // namespace cubetest::serial
