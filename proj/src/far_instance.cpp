#include <algorithm>
#include <bit>
#include <numeric>

#include "cubetest/core_space.hpp"
#include "cubetest/errors.hpp"
#include "cubetest/influence.hpp"
#include "cubetest/text_io.hpp"
#include "cubetest/valuation.hpp"

namespace cubetest {

namespace {

std::vector<int> random_coords(int n, int k, Rng& rng) {
  std::vector<int> coords(static_cast<std::size_t>(n));
  std::iota(coords.begin(), coords.end(), 1);
  std::shuffle(coords.begin(), coords.end(), rng);
  coords.resize(static_cast<std::size_t>(k));
  return coords;
}

// AND on k inputs with the all-zeros point raised to `bottom`. bottom = 0 is
// AND itself; bottom = 1 maximizes the supermodular square violation.
CoreTable and_like_core(int k, double bottom) {
  std::vector<double> values(std::size_t{1} << k, 0.0);
  values.front() = bottom;
  values.back() = 1.0;
  return CoreTable(k, std::move(values));
}

}  // namespace

FarInstance make_far_instance(ValuationClass target, FarMode mode, int n, int k, double epsilon, std::uint64_t seed,
                              double gamma) {
  if (n < 1 || n > kMaxTableDimension) throw InputError("far instance dimension out of range");
  if (k < 0 || k >= n) throw InputError("far instances need 0 <= k < n");
  if (!(epsilon > 0.0)) throw InputError("far instances need epsilon > 0");

  if (mode == FarMode::parity) {
    // Every k-set misses some coordinate of [n], so Inf_f(~J) = \hat f([n])^2 = 1/4.
    constexpr double kParityDistance = 0.5;
    if (epsilon > kParityDistance) {
      throw BudgetError("parity instance is only 1/2-far from k-juntas, below epsilon=" + format_double(epsilon));
    }
    auto table = FunctionTable::from_masks(n, [](std::uint64_t x) { return std::popcount(x) % 2 == 0 ? 1.0 : 0.0; });
    return {std::move(table), kParityDistance, {}};
  }

  const auto cores = enumerate_cores(target, k, gamma);
  Rng rng(seed);
  const auto coords = random_coords(n, k, rng);
  double best_seen = 0.0;
  for (int step = 0; step <= 8; ++step) {
    const auto core = and_like_core(k, step / 8.0);
    auto table = lift_core(core, coords, n);
    const auto certificate = certify_distance(table, cores);
    best_seen = std::max(best_seen, certificate.certified_distance);
    if (certificate.certified_distance >= epsilon) return {std::move(table), certificate.certified_distance, coords};
  }
  throw BudgetError("no AND-like " + std::to_string(k) + "-junta reaches certified distance " + format_double(epsilon) +
                    " from class '" + std::string(to_string(target)) + "' (best " + format_double(best_seen) + ")");
}

}  // namespace cubetest
