#include "cubetest/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>

#include "cubetest/core_space.hpp"
#include "cubetest/errors.hpp"
#include "cubetest/text_io.hpp"

namespace cubetest {

std::string_view to_string(InstanceMode mode) {
  switch (mode) {
    case InstanceMode::in_class: return "in_class";
    case InstanceMode::far_mode_a: return "far_mode_a";
    case InstanceMode::far_mode_b: return "far_mode_b";
  }
  return "in_class";
}

InstanceMode parse_instance_mode(std::string_view text) {
  if (text == "in_class") return InstanceMode::in_class;
  if (text == "far_mode_a") return InstanceMode::far_mode_a;
  if (text == "far_mode_b") return InstanceMode::far_mode_b;
  throw InputError("unknown instance mode '" + std::string(text) + "'");
}

ExperimentPlan parse_plan(std::string_view text) {
  const auto doc = KeyValueDocument::parse(text);
  const auto& lines = doc.lines();
  if (lines.empty() || lines.front().key != "plan" || lines.front().tokens != std::vector<std::string>{"v1"}) {
    throw InputError("plan must start with 'plan v1'");
  }
  ExperimentPlan plan;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    const auto where = "line " + std::to_string(line.line_number) + ": ";
    if (line.key == "config") {
      if (line.tokens.size() != 2) throw InputError(where + "expected 'config key value'");
      plan.overrides.emplace_back(line.tokens[0], line.tokens[1]);
      continue;
    }
    if (line.tokens.size() != 1) throw InputError(where + "expected 'key value'");
    const auto& value = line.tokens.front();
    if (line.key == "class") plan.class_tag = parse_valuation_class(value);
    else if (line.key == "n") plan.n = static_cast<int>(parse_int(value));
    else if (line.key == "k") plan.k = static_cast<int>(parse_int(value));
    else if (line.key == "epsilon") plan.epsilon = parse_double(value);
    else if (line.key == "p") plan.p = parse_double(value);
    else if (line.key == "trial_count") plan.trial_count = static_cast<std::size_t>(parse_uint(value));
    else if (line.key == "seed_base") plan.seed_base = parse_uint(value);
    else if (line.key == "instance") plan.instance = parse_instance_mode(value);
    else if (line.key == "profile") plan.profile = parse_scale_profile(value);
    else if (line.key == "instance_grid") plan.instance_grid = parse_double(value);
    else throw InputError(where + "unknown plan key '" + line.key + "'");
  }
  if (plan.trial_count < 1) throw InputError("trial_count must be at least 1");
  if (plan.n < 1 || plan.n > kMaxTableDimension) throw InputError("plan dimension out of range");
  if (plan.k < 1 || plan.k >= plan.n) throw InputError("plan needs 1 <= k < n");
  plan_config(plan, plan.seed_base);  // surfaces bad overrides before any trial runs
  return plan;
}

std::string format_plan(const ExperimentPlan& plan) {
  std::string out = "plan v1\n";
  out += "class " + std::string(to_string(plan.class_tag)) + "\n";
  out += "n " + std::to_string(plan.n) + "\n";
  out += "k " + std::to_string(plan.k) + "\n";
  out += "epsilon " + format_double(plan.epsilon) + "\n";
  out += "p " + format_double(plan.p) + "\n";
  out += "trial_count " + std::to_string(plan.trial_count) + "\n";
  out += "seed_base " + std::to_string(plan.seed_base) + "\n";
  out += "instance " + std::string(to_string(plan.instance)) + "\n";
  out += "profile " + std::string(to_string(plan.profile)) + "\n";
  out += "instance_grid " + format_double(plan.instance_grid) + "\n";
  for (const auto& [key, value] : plan.overrides) out += "config " + key + " " + value + "\n";
  return out;
}

TesterConfig plan_config(const ExperimentPlan& plan, std::uint64_t seed) {
  auto config = make_config(plan.profile, plan.k, plan.epsilon, plan.p, seed);
  for (const auto& [key, value] : plan.overrides) apply_config_line(config, key, value);
  config.seed = seed;
  validate(config);
  return config;
}

namespace {

Rng stream(std::uint64_t seed, std::uint64_t lane) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(lane)};
  return Rng(seq);
}

constexpr std::uint64_t kInstanceLane = 0;
constexpr std::uint64_t kTesterLane = 1;

TrialInstance make_instance(const ExperimentPlan& plan, std::uint64_t seed, const CoreSet* in_class_cores) {
  if (plan.instance == InstanceMode::far_mode_b) {
    auto far = make_far_instance(plan.class_tag, FarMode::parity, plan.n, plan.k, plan.epsilon, seed,
                                 plan.instance_grid);
    return {std::move(far.table), far.certified_distance, std::move(far.coords)};
  }
  if (plan.instance == InstanceMode::far_mode_a) {
    auto far = make_far_instance(plan.class_tag, FarMode::core_far, plan.n, plan.k, plan.epsilon, seed,
                                 plan.instance_grid);
    return {std::move(far.table), far.certified_distance, std::move(far.coords)};
  }
  if (in_class_cores->members.empty()) throw BudgetError("class has no cores on the instance grid");
  auto rng = stream(seed, kInstanceLane);
  std::uniform_int_distribution<std::size_t> pick(0, in_class_cores->members.size() - 1);
  const auto& core = in_class_cores->members[pick(rng)];
  std::vector<int> coords(static_cast<std::size_t>(plan.n));
  std::iota(coords.begin(), coords.end(), 1);
  std::shuffle(coords.begin(), coords.end(), rng);
  coords.resize(static_cast<std::size_t>(plan.k));
  return {lift_core(core, coords, plan.n), 0.0, std::move(coords)};
}

std::uint64_t percentile(std::vector<std::uint64_t> sorted, double fraction) {
  const auto rank = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

}  // namespace

TrialInstance make_trial_instance(const ExperimentPlan& plan, std::size_t index) {
  const std::uint64_t seed = plan.seed_base + index;
  if (plan.instance != InstanceMode::in_class) return make_instance(plan, seed, nullptr);
  const auto cores = enumerate_cores(plan.class_tag, plan.k, plan.instance_grid);
  return make_instance(plan, seed, &cores);
}

ExperimentSummary run_experiment(const ExperimentPlan& plan) {
  const auto start = std::chrono::steady_clock::now();
  const auto base_config = plan_config(plan, plan.seed_base);
  const auto tester_cores = enumerate_cores(plan.class_tag, plan.k, base_config.core_grid);
  std::optional<CoreSet> instance_cores;
  if (plan.instance == InstanceMode::in_class) {
    instance_cores = enumerate_cores(plan.class_tag, plan.k, plan.instance_grid);
  }

  ExperimentSummary summary;
  summary.trial_count = plan.trial_count;
  summary.trials.resize(plan.trial_count);
  std::vector<double> distances(plan.trial_count, 0.0);
  std::exception_ptr failure;
  const auto trials = static_cast<std::int64_t>(plan.trial_count);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < trials; ++t) {
    try {
      const auto index = static_cast<std::size_t>(t);
      const std::uint64_t seed = plan.seed_base + index;
      const auto instance = make_instance(plan, seed, instance_cores ? &*instance_cores : nullptr);
      auto config = base_config;
      config.seed = seed;
      auto oracle = make_counting_oracle(instance.table);
      auto rng = stream(seed, kTesterLane);
      summary.trials[index] = {seed, run_tester(oracle, tester_cores, config, rng)};
      distances[index] = instance.certified_distance;
    } catch (...) {
#pragma omp critical(experiment_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::uint64_t> queries;
  double query_sum = 0.0;
  for (const auto& trial : summary.trials) {
    if (trial.report.verdict == Verdict::accept) ++summary.accept_count;
    else ++summary.reject_stages[std::string(to_string(trial.report.reject_stage))];
    queries.push_back(trial.report.queries_used);
    query_sum += static_cast<double>(trial.report.queries_used);
  }
  std::sort(queries.begin(), queries.end());
  summary.accept_rate = static_cast<double>(summary.accept_count) / static_cast<double>(plan.trial_count);
  summary.query_mean = query_sum / static_cast<double>(plan.trial_count);
  summary.query_p50 = percentile(queries, 0.5);
  summary.query_p95 = percentile(queries, 0.95);
  summary.query_max = queries.back();
  summary.expected_queries = expected_queries(base_config);
  summary.certified_distance = *std::min_element(distances.begin(), distances.end());
  summary.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

std::string format_summary(const ExperimentSummary& s) {
  std::string out = "summary v1\n";
  out += "trial_count " + std::to_string(s.trial_count) + "\n";
  out += "accept_count " + std::to_string(s.accept_count) + "\n";
  out += "accept_rate " + format_double(s.accept_rate) + "\n";
  out += "query_mean " + format_double(s.query_mean) + "\n";
  out += "query_p50 " + std::to_string(s.query_p50) + "\n";
  out += "query_p95 " + std::to_string(s.query_p95) + "\n";
  out += "query_max " + std::to_string(s.query_max) + "\n";
  out += "expected_queries " + std::to_string(s.expected_queries) + "\n";
  for (auto stage : {RejectStage::influence_check, RejectStage::core_search}) {
    const auto name = std::string(to_string(stage));
    const auto it = s.reject_stages.find(name);
    out += "reject_stage " + name + " " + std::to_string(it == s.reject_stages.end() ? 0 : it->second) + "\n";
  }
  out += "certified_distance " + format_double(s.certified_distance) + "\n";
  out += "wall_time_ms " + format_double(std::round(s.wall_time_ms)) + "\n";
  for (std::size_t i = 0; i < s.trials.size(); ++i) {
    out += "trial " + std::to_string(i) + " seed " + std::to_string(s.trials[i].seed) + "\n";
    out += format_report(s.trials[i].report);
  }
  return out;
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0 || successes > trials) throw InputError("wilson_interval needs 0 <= successes <= trials, trials > 0");
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (phat + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace cubetest
