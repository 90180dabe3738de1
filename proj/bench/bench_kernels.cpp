// Serial reference kernels against their OpenMP counterparts on random tables.
// Prints one line per kernel: best-of-reps wall time for each side and the
// largest absolute disagreement between their results.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <vector>

#include "CLI11.hpp"
#include "cubetest/kernels.hpp"

namespace {

using namespace cubetest;

double best_ms(int reps, const std::function<void()>& body) {
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    body();
    best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  }
  return best;
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

void report(const char* name, double serial_ms, double parallel_ms, double gap) {
  std::cout << name << " serial_ms " << serial_ms << " parallel_ms " << parallel_ms << " speedup "
            << serial_ms / parallel_ms << " max_abs_diff " << gap << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs OpenMP hypercube kernels"};
  int n = 20;
  int reps = 5;
  int threads = 0;
  std::uint64_t seed = 1;
  app.add_option("-n,--dimension", n, "Table dimension")->check(CLI::Range(4, 26));
  app.add_option("--reps", reps, "Repetitions per kernel (best time kept)")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Seed for the random tables");
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  const std::size_t size = std::size_t{1} << n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> f(size), g(size);
  for (auto& v : f) v = unit(rng);
  for (auto& v : g) v = unit(rng);
  const std::uint64_t subset = 0x5555555555555555ULL & ((std::uint64_t{1} << n) - 1);
  const std::uint64_t junta = 0b1011;

  std::cout << "dimension " << n << " threads " << omp_get_max_threads() << " reps " << reps << "\n";

  std::vector<double> ws, wp;
  const double wht_s = best_ms(reps, [&] { ws = f; serial::walsh_hadamard_inplace(ws); });
  const double wht_p = best_ms(reps, [&] { wp = f; parallel::walsh_hadamard_inplace(wp); });
  report("walsh_hadamard", wht_s, wht_p, max_gap(ws, wp));

  double ds = 0.0, dp = 0.0;
  const double dist_s = best_ms(reps, [&] { ds = serial::power_distance_sum(f, g, 3.0); });
  const double dist_p = best_ms(reps, [&] { dp = parallel::power_distance_sum(f, g, 3.0); });
  report("power_distance_sum", dist_s, dist_p, std::abs(ds - dp));

  double is = 0.0, ip = 0.0;
  const double inf_s = best_ms(reps, [&] { is = serial::influence_variance_sum(f, n, subset); });
  const double inf_p = best_ms(reps, [&] { ip = parallel::influence_variance_sum(f, n, subset); });
  report("influence_variance_sum", inf_s, inf_p, std::abs(is - ip));

  std::vector<double> js, jp;
  const double ja_s = best_ms(reps, [&] { js = serial::junta_average(f, n, junta); });
  const double ja_p = best_ms(reps, [&] { jp = parallel::junta_average(f, n, junta); });
  report("junta_average", ja_s, ja_p, max_gap(js, jp));
  return 0;
}
