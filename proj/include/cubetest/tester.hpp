#pragma once

// The implicit-learning tester: sample q points, bucket coordinates by their
// column pattern, pick k parts of a random partition of pattern space whose
// union carries almost all influence, refine each part down to one pattern,
// gate on the leftover influence, then search the enumerated class cores for
// one consistent with the samples.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cubetest/core_space.hpp"
#include "cubetest/cube.hpp"
#include "cubetest/influence.hpp"
#include "cubetest/pattern_partition.hpp"
#include "cubetest/valuation.hpp"

namespace cubetest {

// Distance parameter for l2 testing that suffices for l_p testing at epsilon:
// epsilon^{p/2} for p > 2, epsilon itself for 1 <= p <= 2.
double lp_epsilon_map(double p, double epsilon);

enum class ScaleProfile { paper, desk };

std::string_view to_string(ScaleProfile profile);
ScaleProfile parse_scale_profile(std::string_view text);

struct TesterConfig {
  double epsilon = 0.25;  // l_p distance parameter as given by the caller
  int k = 2;
  double p = 2.0;
  std::size_t q = 64;
  std::size_t m = 2000;
  std::size_t num_parts = 12;
  std::size_t refine_rounds = 0;  // 0: enough halvings to reach single patterns
  double inf_threshold = 0.0;
  double accept_threshold = 0.0;
  double core_grid = 0.25;
  std::uint64_t seed = 0;
  ScaleProfile scale_profile = ScaleProfile::desk;
  bool sqrt_statistic = false;           // compare the root of the step statistic instead
  std::uint64_t max_subsets = 200'000;   // budget for the C(num_parts, k) sweep
};

// Fills every field from (profile, k, epsilon, p). Thresholds and the core grid
// are derived from the l2 parameter lp_epsilon_map(p, epsilon).
//
// paper: q = ceil(2^k / e^5), m = ceil(k^6 / e^5), num_parts = 100 k^4,
//        core grid e/1000 (hidden constants in the asymptotic bounds set to 1).
// desk:  q = clamp(ceil(4/e^2), 64, 1024), m = clamp(ceil(125/e^2), 1000, 10000),
//        num_parts = max(4k, 12), core grid 1/ceil(1/e).
// Both: inf_threshold = e^2/1000, accept_threshold = 0.35 e.
TesterConfig make_config(ScaleProfile profile, int k, double epsilon, double p = 2.0, std::uint64_t seed = 0);
void validate(const TesterConfig& config);

// Applies `key value` overrides (field names as in TesterConfig). Unknown keys throw.
void apply_config_line(TesterConfig& config, const std::string& key, const std::string& value);
TesterConfig parse_config(std::string_view text);
std::string format_config(const TesterConfig& config);

struct PatternBuckets {
  int n = 0;
  std::size_t q = 0;
  std::map<Pattern, CoordSet> buckets;  // occupied patterns only; others are empty

  CoordSet bucket(const Pattern& c) const;
  CoordSet coords_of(std::span<const Pattern> patterns) const;
  CoordSet coords_of(const PatternPart& part) const { return coords_of(part.occupied); }
};

PatternBuckets bucket_coordinates(std::span<const CubePoint> samples);

struct SampleSet {
  std::vector<CubePoint> points;
  std::vector<double> values;  // f at each point
};

// Draws q uniform points and queries f once at each.
SampleSet draw_samples(QueryOracle& oracle, std::size_t q, Rng& rng);

struct InitialSelection {
  std::vector<PatternPart> parts;     // the full random partition
  std::vector<std::size_t> selected;  // 0-based part indices, ascending
  std::vector<double> eta;            // one estimate per k-subset, lexicographic order
};

// Costs 2m * C(num_parts, k) queries when `estimator` is estimate_inf.
InitialSelection select_initial_parts(QueryOracle& oracle, const PatternBuckets& buckets, const TesterConfig& config,
                                      Rng& rng, const InfluenceEstimator& estimator = estimate_inf);

struct Refinement {
  std::vector<PatternPart> parts;     // final part per selected index
  std::vector<std::uint64_t> choices; // z* per round; bit (k - i) is z_i
  std::vector<double> eta;            // eta_{z*} per round
  std::size_t rounds = 0;
};

std::size_t refine_rounds_for(const TesterConfig& config);

// Costs 2m * 2^k * rounds queries when `estimator` is estimate_inf.
Refinement refine_parts(QueryOracle& oracle, std::vector<PatternPart> selected, const PatternBuckets& buckets,
                        const TesterConfig& config, Rng& rng, const InfluenceEstimator& estimator = estimate_inf);

enum class Verdict { accept, reject };
enum class RejectStage { none, influence_check, core_search };

std::string_view to_string(Verdict verdict);
std::string_view to_string(RejectStage stage);

struct TesterReport {
  Verdict verdict = Verdict::reject;
  RejectStage reject_stage = RejectStage::none;
  std::uint64_t queries_used = 0;
  std::vector<CoordSet> selected_buckets;  // S_{b_i} per final part
  std::vector<bool> empty_buckets;         // S_{b_i} empty: core input i fed 0
  std::optional<CoreTable> learned_core;
  std::optional<double> empirical_distance;  // statistic of the accepted core, or the best one on core_search reject
  std::vector<std::size_t> selected_parts;   // 1-based initial part indices
  std::vector<int> initial_part_of;          // per coordinate, 1-based initial part index
  std::vector<double> eta_initial;
  std::vector<double> eta_refine;
  double eta_final = 0.0;
  std::size_t refine_rounds = 0;
};

// Influence gate, projection and core search. Costs 2m queries (one estimate).
TesterReport final_check_and_learn(QueryOracle& oracle, const SampleSet& samples, std::span<const PatternPart> parts,
                                   const PatternBuckets& buckets, const CoreSet& cores, const TesterConfig& config,
                                   Rng& rng, const InfluenceEstimator& estimator = estimate_inf);

// The whole pipeline on one oracle and one RNG stream. Uses
// q + 2m (C(num_parts, k) + 2^k r + 1) queries with the default estimator.
TesterReport run_tester(QueryOracle& oracle, const CoreSet& cores, const TesterConfig& config, Rng& rng,
                        const InfluenceEstimator& estimator = estimate_inf);
TesterReport run_tester(QueryOracle& oracle, ValuationClass tag, const TesterConfig& config, Rng& rng);

std::uint64_t expected_queries(const TesterConfig& config);

// "report v1" followed by one `field value` line per TesterReport field.
std::string format_report(const TesterReport& report);

}  // namespace cubetest
