#pragma once

// Influence of coordinate sets (exact, via Fourier weight, and sampled),
// junta projections, closest-junta search and random coordinate partitions.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "cubetest/cube.hpp"

namespace cubetest {

using Rng = std::mt19937_64;

// E_{x over ~S}[ Var_{y over S} f(x, y) ], population variance, by full enumeration.
double influence_exact(const FunctionTable& f, const CoordSet& s);

// sum_{T : T meets S} \hat f(T)^2
double influence_fourier(const FourierSpectrum& spectrum, const CoordSet& s);

// Monte-Carlo estimate (1/2m) sum_i (f(x_i, y_i) - f(x_i, y'_i))^2 using
// exactly 2m oracle queries. Requires m >= 1.
double estimate_inf(QueryOracle& oracle, const CoordSet& s, std::size_t m, Rng& rng);

// Signature shared by estimate_inf and test stubs that plug into the tester.
using InfluenceEstimator = std::function<double(QueryOracle&, const CoordSet&, std::size_t, Rng&)>;

// f_J(x) = E_y[f(x_J, y)], returned as an n-variable table constant on the
// classes of points that agree on J.
FunctionTable junta_projection(const FunctionTable& f, const CoordSet& junta);

struct ClosestJunta {
  CoordSet junta;
  double distance = 0.0;  // dist_2(f, f_J) = Inf_f(~J)^{1/2}
};

// Exhaustive search over all |J| = k; the lexicographically first minimizer wins.
// Throws BudgetError when C(n, k) exceeds `max_subsets`.
ClosestJunta closest_junta(const FunctionTable& f, int k, std::uint64_t max_subsets = 5'000'000);

// Calls `visit(members)` for every k-subset of {0..count-1} in lexicographic order.
void for_each_combination(int count, int k, const std::function<void(std::span<const int>)>& visit);
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

enum class PartitionMode {
  uniform,  // every element picks a part label independently and uniformly
  equi,     // shuffle, then cut into parts of size ceil(N/r) or floor(N/r)
};

struct CoordPartition {
  std::size_t ground_size = 0;
  // parts[j] lists elements of the ground set (as given by the caller).
  std::vector<std::vector<std::uint64_t>> parts;
  std::size_t empty_parts() const;
};

// Partitions an explicit ground set. In equi mode the first (N mod r) parts
// receive the extra element; r > N leaves some parts empty.
CoordPartition random_partition(std::span<const std::uint64_t> ground, std::size_t parts, PartitionMode mode, Rng& rng);
// Ground set = the coordinates of `ground` (1-indexed).
CoordPartition random_partition(const CoordSet& ground, std::size_t parts, PartitionMode mode, Rng& rng);

}  // namespace cubetest
