#pragma once

// Seeded batches of tester runs and their aggregate statistics.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cubetest/tester.hpp"
#include "cubetest/valuation.hpp"

namespace cubetest {

enum class InstanceMode { in_class, far_mode_a, far_mode_b };

std::string_view to_string(InstanceMode mode);
InstanceMode parse_instance_mode(std::string_view text);

struct ExperimentPlan {
  ValuationClass class_tag = ValuationClass::submodular;
  int n = 12;
  int k = 2;
  double epsilon = 0.25;
  double p = 2.0;
  std::size_t trial_count = 200;
  std::uint64_t seed_base = 1;
  InstanceMode instance = InstanceMode::in_class;
  ScaleProfile profile = ScaleProfile::desk;
  double instance_grid = 0.25;  // grid of the cores that in-class instances are drawn from
  std::vector<std::pair<std::string, std::string>> overrides;  // TesterConfig `key value` lines
};

// "plan v1" followed by `key value` lines; `config key value` lines become overrides.
ExperimentPlan parse_plan(std::string_view text);
std::string format_plan(const ExperimentPlan& plan);

TesterConfig plan_config(const ExperimentPlan& plan, std::uint64_t seed);

struct TrialInstance {
  FunctionTable table;
  double certified_distance = 0.0;  // 0 for in-class instances
  std::vector<int> coords;          // relevant coordinates, empty for parity
};

// Trial `index` uses seed seed_base + index for both the instance and the tester,
// on separate streams.
TrialInstance make_trial_instance(const ExperimentPlan& plan, std::size_t index);

struct TrialRecord {
  std::uint64_t seed = 0;
  TesterReport report;
};

struct ExperimentSummary {
  std::size_t trial_count = 0;
  std::size_t accept_count = 0;
  double accept_rate = 0.0;
  double query_mean = 0.0;
  std::uint64_t query_p50 = 0;
  std::uint64_t query_p95 = 0;
  std::uint64_t query_max = 0;
  std::uint64_t expected_queries = 0;
  std::map<std::string, std::size_t> reject_stages;  // keyed by RejectStage name
  double certified_distance = 0.0;                   // minimum over trials
  double wall_time_ms = 0.0;
  std::vector<TrialRecord> trials;  // in trial order
};

// Trials run in parallel; records are stored by index so the summary does not
// depend on scheduling.
ExperimentSummary run_experiment(const ExperimentPlan& plan);

// "summary v1", aggregate lines, then one "trial i seed s" header and report per trial.
// The wall_time_ms line is the only field that varies between identical runs.
std::string format_summary(const ExperimentSummary& summary);

// Wilson score interval for `successes` out of `trials` at normal quantile z.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

}  // namespace cubetest
