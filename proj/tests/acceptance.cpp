// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Pass a list of criterion numbers to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cubetest/core_space.hpp"
#include "cubetest/experiment.hpp"
#include "cubetest/influence.hpp"
#include "cubetest/tester.hpp"
#include "cubetest/text_io.hpp"
#include "cubetest/valuation.hpp"
#include "oracles.hpp"

using namespace cubetest;

namespace {

// Tolerances and budgets, pinned here so a change shows up in review.
constexpr double kOracleTol = 1e-9;
constexpr double kTwoThirds = 2.0 / 3.0;
constexpr double kWilsonZ = 1.96;
constexpr std::size_t kTrials = 200;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(double v) { return format_double(v); }

std::vector<std::uint64_t> all_sets_up_to(int n, int size) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
    if (std::popcount(s) <= size) out.push_back(s);
  }
  return out;
}

// Reads the bits of `x` at the positions set in `junta`, lowest position first.
std::uint64_t extract(std::uint64_t x, std::uint64_t junta) {
  std::uint64_t out = 0;
  int at = 0;
  for (std::uint64_t rest = junta; rest != 0; rest &= rest - 1, ++at) {
    out |= ((x >> std::countr_zero(rest)) & 1U) << at;
  }
  return out;
}

Outcome ac1_oracle_equivalence() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 8;
    const auto f = oracle::random_table(n, rng);
    const auto spectrum = walsh_hadamard(f);
    for (int s = 0; s < 50; ++s) {
      const CoordSet set(n, oracle::random_mask(n, rng));
      worst = std::max(worst, std::abs(influence_fourier(spectrum, set) - influence_exact(f, set)));
    }
  }
  return {worst <= kOracleTol, "max |fourier - exact| = " + fmt(worst)};
}

Outcome ac2_junta_distance() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 0.05);
  double worst = 0.0;
  std::size_t beaten = 0;
  std::size_t challengers = 0;
  for (int t = 0; t < 20; ++t) {
    const int n = 4 + t % 5;
    const auto f = oracle::random_table(n, rng);
    const auto sets = all_sets_up_to(n, 3);
    // At least 1000 challengers per table, spread evenly over the sets.
    const auto per_set = static_cast<int>((1000 + sets.size() - 1) / sets.size());
    for (std::uint64_t j : sets) {
      const CoordSet junta(n, j);
      const auto projected = junta_projection(f, junta);
      const double d = lp_distance(f, projected, 2.0);
      worst = std::max(worst, std::abs(influence_exact(f, junta.complement()) - d * d));

      // Challengers on J: half uniform cores, half small perturbations of f_J.
      std::vector<double> core(std::size_t{1} << std::popcount(j));
      for (int c = 0; c < per_set; ++c) {
        for (std::size_t y = 0; y < core.size(); ++y) core[y] = unit(rng);
        if (c % 2 == 1) {
          for (std::uint64_t x = 0; x < f.size(); ++x) core[extract(x, j)] = projected.at(x) + jitter(rng);
        }
        double sum = 0.0;
        for (std::uint64_t x = 0; x < f.size(); ++x) sum += std::pow(f.at(x) - core[extract(x, j)], 2);
        const double challenger = std::sqrt(sum / static_cast<double>(f.size()));
        ++challengers;
        if (d <= challenger + kOracleTol) ++beaten;
      }
    }
  }
  return {worst <= kOracleTol && beaten == challengers,
          "max |Inf(~J) - dist^2| = " + fmt(worst) + ", f_J beat " + std::to_string(beaten) + "/" +
              std::to_string(challengers) + " random J-juntas"};
}

Outcome ac3_concentration() {
  constexpr int kRuns = 1000;
  constexpr std::size_t kM = 2000;
  constexpr double kT = 0.05;
  constexpr double kMaxFraction = 0.01;
  const auto dictator = FunctionTable::from_masks(12, [](std::uint64_t x) { return static_cast<double>(x & 1U); });
  const auto s = CoordSet::of(12, {1});
  int far = 0;
  for (int run = 0; run < kRuns; ++run) {
    auto oracle = make_counting_oracle(dictator);
    Rng rng(static_cast<std::uint64_t>(run));
    if (std::abs(estimate_inf(oracle, s, kM, rng) - 0.25) >= kT) ++far;
  }
  const double fraction = static_cast<double>(far) / kRuns;
  return {fraction <= kMaxFraction, "fraction with |est - 1/4| >= 0.05: " + fmt(fraction) + " (limit 0.01)"};
}

Outcome ac4_partition_lemma() {
  constexpr int kN = 12;
  constexpr int kK = 2;
  constexpr std::size_t kParts = 100;
  constexpr int kSeeds = 200;
  constexpr double kEpsilon = 0.5;  // the parity instance is 1/2-far from 2-juntas
  constexpr double kMaxFailure = 1.0 / 6.0 + 0.1;
  const auto f = FunctionTable::from_masks(kN, [](std::uint64_t x) { return std::popcount(x) % 2 == 0 ? 1.0 : 0.0; });
  int failures = 0;
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    const auto partition = random_partition(CoordSet::all(kN), kParts, PartitionMode::uniform, rng);
    std::vector<std::uint64_t> part_masks;
    for (const auto& part : partition.parts) {
      std::uint64_t mask = 0;
      for (auto c : part) mask |= std::uint64_t{1} << (c - 1);
      part_masks.push_back(mask);
    }
    std::set<std::uint64_t> unions;
    for_each_combination(static_cast<int>(kParts), kK, [&](std::span<const int> pick) {
      std::uint64_t mask = 0;
      for (int j : pick) mask |= part_masks[static_cast<std::size_t>(j)];
      unions.insert(mask);
    });
    bool failed = false;
    for (auto mask : unions) {
      if (influence_exact(f, CoordSet(kN, mask).complement()) < kEpsilon * kEpsilon / 4) failed = true;
    }
    if (failed) ++failures;
  }
  const double fraction = static_cast<double>(failures) / kSeeds;
  return {fraction <= kMaxFailure, "failure fraction " + fmt(fraction) + " (limit " + fmt(kMaxFailure) + ")"};
}

Outcome ac5_hierarchy() {
  using VC = ValuationClass;
  const std::vector<VC> base = {VC::submodular, VC::subadditive, VC::self_bounding};
  const std::vector<std::pair<VC, std::vector<VC>>> rows = {
      {VC::additive, {VC::submodular, VC::subadditive, VC::self_bounding, VC::additive}},
      {VC::coverage, base},
      {VC::unit_demand, {VC::submodular, VC::subadditive, VC::self_bounding, VC::unit_demand}},
      {VC::oxs, base},
      {VC::gross_substitutes, base},
      {VC::submodular, base},
      {VC::xos, {VC::subadditive, VC::self_bounding}},
      {VC::self_bounding, {VC::subadditive, VC::self_bounding}},
      {VC::subadditive, {VC::subadditive, VC::self_bounding}},
  };
  std::size_t checks = 0;
  std::string first_failure;
  for (const auto& [generator, checkers] : rows) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const int n = 1 + static_cast<int>(seed % 8);
      const auto table = gen(sample_spec(generator, n, seed), n).table;
      for (auto checker : checkers) {
        ++checks;
        if (check_class(table, checker) && first_failure.empty()) {
          first_failure = std::string(to_string(generator)) + " seed " + std::to_string(seed) + " fails " +
                          std::string(to_string(checker));
        }
      }
    }
  }
  return {first_failure.empty(), std::to_string(checks) + " checks" +
                                     (first_failure.empty() ? std::string(", all pass") : ", first: " + first_failure)};
}

ExperimentPlan tester_plan(InstanceMode mode) {
  ExperimentPlan plan;
  plan.class_tag = ValuationClass::submodular;
  plan.n = 12;
  plan.k = 2;
  plan.epsilon = 0.25;
  plan.p = 2.0;
  plan.trial_count = kTrials;
  plan.seed_base = 1;
  plan.instance = mode;
  plan.profile = ScaleProfile::desk;
  plan.instance_grid = 0.25;
  return plan;
}

// Wilson slack: the observed rate passes when the upper end of its Wilson
// interval at z = 1.96 reaches 2/3.
Outcome rate_outcome(std::size_t successes, std::size_t trials, const std::string& what) {
  const auto [lo, hi] = wilson_interval(successes, trials, kWilsonZ);
  const double rate = static_cast<double>(successes) / static_cast<double>(trials);
  return {hi >= kTwoThirds, what + " rate " + fmt(rate) + " (" + std::to_string(successes) + "/" +
                                std::to_string(trials) + ", wilson [" + fmt(lo) + ", " + fmt(hi) + "])"};
}

std::string query_note(const ExperimentSummary& s) {
  return ", queries mean " + fmt(s.query_mean) + " max " + std::to_string(s.query_max);
}

Outcome ac6_completeness() {
  const auto s = run_experiment(tester_plan(InstanceMode::in_class));
  auto out = rate_outcome(s.accept_count, s.trial_count, "accept");
  out.detail += query_note(s);
  return out;
}

Outcome ac7_parity_soundness() {
  const auto s = run_experiment(tester_plan(InstanceMode::far_mode_b));
  auto out = rate_outcome(s.trial_count - s.accept_count, s.trial_count, "reject");
  out.detail += ", certified distance " + fmt(s.certified_distance) + query_note(s);
  return out;
}

// Lower bound on the l2 distance from f to every submodular 2-junta, computed
// without the enumerated core grid: for each pair J the distance splits into
// dist(f, f_J)^2 plus the distance of f_J's core to the submodular half-space.
double continuous_pair_certificate(const FunctionTable& f) {
  const int n = f.dimension();
  double mean_square = 0.0;
  for (std::uint64_t x = 0; x < f.size(); ++x) mean_square += f.at(x) * f.at(x);
  mean_square /= static_cast<double>(f.size());
  double best = 1e9;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      std::vector<double> core(4, 0.0);
      for (std::uint64_t x = 0; x < f.size(); ++x) core[((x >> a) & 1U) | (((x >> b) & 1U) << 1)] += f.at(x);
      double core_square = 0.0;
      for (double& v : core) {
        v /= static_cast<double>(f.size() / 4);
        core_square += v * v / 4;
      }
      const double residual = std::max(0.0, mean_square - core_square);
      const double half_space = oracle::submodular_pair_lower_bound(core);
      best = std::min(best, std::sqrt(residual + half_space * half_space));
    }
  }
  return best;
}

Outcome ac8_core_soundness() {
  const auto plan = tester_plan(InstanceMode::far_mode_a);
  double weakest = 1e9;
  for (std::size_t i = 0; i < plan.trial_count; ++i) {
    weakest = std::min(weakest, continuous_pair_certificate(make_trial_instance(plan, i).table));
  }
  const auto s = run_experiment(plan);
  auto out = rate_outcome(s.trial_count - s.accept_count, s.trial_count, "reject");
  out.pass = out.pass && weakest > plan.epsilon && s.certified_distance >= plan.epsilon;
  out.detail += ", grid certificate " + fmt(s.certified_distance) + ", continuous certificate " + fmt(weakest) +
                query_note(s);
  return out;
}

Outcome ac9_exact_pipeline() {
  constexpr int kN = 12;
  constexpr int kQualifying = 50;
  const CoreTable core(2, {0.0, 0.5, 0.5, 0.75});
  const auto cores = enumerate_cores(ValuationClass::submodular, 2, 0.25);
  int qualifying = 0;
  int isolated = 0;
  std::uint64_t seed = 0;
  for (; qualifying < kQualifying && seed < 5000; ++seed) {
    Rng placement(seed);
    std::vector<int> coords(kN);
    for (int i = 0; i < kN; ++i) coords[static_cast<std::size_t>(i)] = i + 1;
    std::shuffle(coords.begin(), coords.end(), placement);
    coords.resize(2);
    const auto f = lift_core(core, coords, kN);
    const InfluenceEstimator exact = [&f](QueryOracle&, const CoordSet& s, std::size_t, Rng&) {
      return influence_exact(f, s);
    };
    auto oracle = make_counting_oracle(f);
    const auto config = make_config(ScaleProfile::desk, 2, 0.25, 2.0, seed);
    Rng rng(seed);
    const auto report = run_tester(oracle, cores, config, rng, exact);
    const auto& part_of = report.initial_part_of;
    if (part_of[static_cast<std::size_t>(coords[0] - 1)] == part_of[static_cast<std::size_t>(coords[1] - 1)]) continue;
    ++qualifying;
    bool ok = report.selected_buckets.size() == 2;
    for (const auto& bucket : report.selected_buckets) {
      ok = ok && (bucket.contains(coords[0]) != bucket.contains(coords[1]));
    }
    if (ok) ++isolated;
  }
  return {qualifying == kQualifying && isolated == qualifying,
          "isolated " + std::to_string(isolated) + "/" + std::to_string(qualifying) +
              " runs with relevant coordinates in distinct parts (" + std::to_string(seed) + " seeds drawn)"};
}

Outcome ac10_lp_map() {
  const double p2 = lp_epsilon_map(2.0, 0.1);
  const double p4 = lp_epsilon_map(4.0, 0.1);
  return {p2 == 0.1 && std::abs(p4 - 0.01) <= 1e-15, "p=2 -> " + fmt(p2) + ", p=4 -> " + fmt(p4)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "influence_fourier matches influence_exact", 60, ac1_oracle_equivalence},
      {2, "Inf of the complement equals squared junta distance", 120, ac2_junta_distance},
      {3, "EstimateInf concentration on a dictator", 60, ac3_concentration},
      {4, "random partitions keep parity influence outside k parts", 300, ac4_partition_lemma},
      {5, "generated valuations pass downstream checkers", 120, ac5_hierarchy},
      {6, "tester accepts lifted submodular cores", 1200, ac6_completeness},
      {7, "tester rejects the parity instance", 1200, ac7_parity_soundness},
      {8, "tester rejects AND-like juntas far from the core set", 1200, ac8_core_soundness},
      {9, "exact-influence pipeline isolates relevant coordinates", 600, ac9_exact_pipeline},
      {10, "lp epsilon map spot values", 1, ac10_lp_map},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.time_limit_s;
    const bool pass = outcome.pass && in_time;
    if (!pass) ++failed;
    std::printf("AC%-2d %s  %s: %s [%.1fs, limit %.0fs]\n", c.id, pass ? "PASS" : "FAIL", c.title.c_str(),
                outcome.detail.c_str(), seconds, c.time_limit_s);
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
