#include "cubetest/influence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "cubetest/errors.hpp"
#include "cubetest/kernels.hpp"

namespace cubetest {

namespace {

void require_match(const FunctionTable& f, const CoordSet& s) {
  if (f.dimension() != s.dimension()) throw InputError("coordinate set dimension differs from the table");
}

}  // namespace

double influence_exact(const FunctionTable& f, const CoordSet& s) {
  require_match(f, s);
  if (s.empty()) return 0.0;
  const double sum = parallel::influence_variance_sum(f.values(), f.dimension(), s.mask());
  return sum / std::ldexp(1.0, f.dimension() - s.size());
}

double influence_fourier(const FourierSpectrum& spectrum, const CoordSet& s) {
  if (spectrum.dimension != s.dimension()) throw InputError("coordinate set dimension differs from the spectrum");
  double sum = 0.0;
  for (std::uint64_t t = 0; t < spectrum.coefficients.size(); ++t) {
    if (t & s.mask()) sum += spectrum.coefficients[t] * spectrum.coefficients[t];
  }
  return sum;
}

double estimate_inf(QueryOracle& oracle, const CoordSet& s, std::size_t m, Rng& rng) {
  if (m == 0) throw InputError("estimate_inf needs m >= 1");
  if (oracle.dimension() != s.dimension()) throw InputError("coordinate set dimension differs from the oracle");
  const std::uint64_t inside = s.mask();
  const std::uint64_t outside = low_mask(s.dimension()) & ~inside;
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint64_t x = rng() & outside;
    const std::uint64_t y = rng() & inside;
    const std::uint64_t y2 = rng() & inside;
    const double d = oracle.query(x | y) - oracle.query(x | y2);
    sum += d * d;
  }
  return sum / (2.0 * static_cast<double>(m));
}

FunctionTable junta_projection(const FunctionTable& f, const CoordSet& junta) {
  require_match(f, junta);
  auto values = parallel::junta_average(f.values(), f.dimension(), junta.mask());
  // Means of [0,1] values; clamp away rounding only.
  for (double& v : values) v = std::clamp(v, 0.0, 1.0);
  return FunctionTable(f.dimension(), std::move(values));
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t out = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // Exact: out * (n - k + i) is divisible by i at every step.
    const std::uint64_t next = out * (n - k + i);
    if (next / (n - k + i) != out) return ~std::uint64_t{0};
    out = next / i;
  }
  return out;
}

void for_each_combination(int count, int k, const std::function<void(std::span<const int>)>& visit) {
  if (k < 0 || k > count) return;
  std::vector<int> pick(static_cast<std::size_t>(k));
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    visit(pick);
    int i = k - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == count - k + i) --i;
    if (i < 0) return;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
}

ClosestJunta closest_junta(const FunctionTable& f, int k, std::uint64_t max_subsets) {
  const int n = f.dimension();
  if (k < 0 || k > n) throw InputError("closest_junta needs 0 <= k <= n");
  const auto subsets = binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k));
  if (subsets > max_subsets) {
    throw BudgetError("closest_junta would scan " + std::to_string(subsets) + " subsets (budget " +
                      std::to_string(max_subsets) + ")");
  }
  // Inf_f(~J) = sum over T not inside J of \hat f(T)^2.
  const auto spectrum = walsh_hadamard(f);
  double total = 0.0;
  for (double c : spectrum.coefficients) total += c * c;

  ClosestJunta best{CoordSet::none(n), std::numeric_limits<double>::infinity()};
  double best_influence = std::numeric_limits<double>::infinity();
  for_each_combination(n, k, [&](std::span<const int> members) {
    std::uint64_t junta = 0;
    for (int m : members) junta |= std::uint64_t{1} << m;
    double inside = 0.0;
    std::uint64_t t = 0;
    do {
      inside += spectrum.coefficients[t] * spectrum.coefficients[t];
      t = (t - junta) & junta;
    } while (t != 0);
    const double influence = std::max(0.0, total - inside);
    if (influence < best_influence - 1e-12) {
      best_influence = influence;
      best.junta = CoordSet(n, junta);
    }
  });
  best.distance = std::sqrt(best_influence);
  return best;
}

std::size_t CoordPartition::empty_parts() const {
  return static_cast<std::size_t>(std::count_if(parts.begin(), parts.end(), [](const auto& p) { return p.empty(); }));
}

CoordPartition random_partition(std::span<const std::uint64_t> ground, std::size_t parts, PartitionMode mode, Rng& rng) {
  if (parts == 0) throw InputError("a partition needs at least one part");
  CoordPartition out;
  out.ground_size = ground.size();
  out.parts.resize(parts);
  if (mode == PartitionMode::uniform) {
    std::uniform_int_distribution<std::size_t> label(0, parts - 1);
    for (auto element : ground) out.parts[label(rng)].push_back(element);
    return out;
  }
  std::vector<std::uint64_t> shuffled(ground.begin(), ground.end());
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const std::size_t base = shuffled.size() / parts;
  const std::size_t extra = shuffled.size() % parts;
  std::size_t next = 0;
  for (std::size_t j = 0; j < parts; ++j) {
    const std::size_t size = base + (j < extra ? 1 : 0);
    out.parts[j].assign(shuffled.begin() + static_cast<std::ptrdiff_t>(next),
                        shuffled.begin() + static_cast<std::ptrdiff_t>(next + size));
    next += size;
  }
  return out;
}

CoordPartition random_partition(const CoordSet& ground, std::size_t parts, PartitionMode mode, Rng& rng) {
  std::vector<std::uint64_t> coords;
  for (int c : ground.members()) coords.push_back(static_cast<std::uint64_t>(c));
  return random_partition(coords, parts, mode, rng);
}

}  // namespace cubetest
