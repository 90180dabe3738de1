// cubetest: generate valuation tables, check class membership, compute
// influences, run seeded tester experiments and certify far instances.
//
// Exit codes: 0 ok, 1 violation found, 2 malformed input or usage,
// 3 unsupported class, 4 budget exceeded or enumeration infeasible.

#include <omp.h>

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cubetest/core_space.hpp"
#include "cubetest/errors.hpp"
#include "cubetest/experiment.hpp"
#include "cubetest/influence.hpp"
#include "cubetest/tester.hpp"
#include "cubetest/text_io.hpp"
#include "cubetest/valuation.hpp"

namespace {

using namespace cubetest;

enum Exit : int { kOk = 0, kViolation = 1, kMalformed = 2, kUnsupported = 3, kBudget = 4 };

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out_path;
  int threads = 0;
};

void emit(const Globals& g, const std::string& text) {
  if (g.out_path.empty() || g.out_path == "-") {
    std::cout << text;
  } else {
    write_text_file(g.out_path, text);
  }
}

int cmd_gen(const Globals& g, const std::string& spec_path) {
  const auto text = read_text_file(spec_path);
  int n = 0;
  auto spec = parse_spec(text, &n);
  if (g.seed && KeyValueDocument::parse(text).has("random")) spec = sample_spec(spec.class_tag, n, *g.seed);
  const auto generated = gen(spec, n);
  std::vector<std::string> comments = {
      "class " + std::string(to_string(spec.class_tag)),
      "seed " + std::to_string(spec.seed),
      "spec_hash " + std::to_string(spec_hash(spec)),
      "normalization " + format_double(generated.normalization),
  };
  emit(g, format_table(generated.table, comments));
  return kOk;
}

int cmd_check(const Globals& g, const std::string& table_path, const std::string& class_name, double tol) {
  const auto table = read_table_file(table_path);
  const auto tag = parse_valuation_class(class_name);
  const auto result = check_class(table, tag, tol);
  if (!result) {
    emit(g, "pass " + class_name + "\n");
    return kOk;
  }
  std::string out = "violation " + class_name + "\n";
  out += "points";
  for (const auto& x : result->points) out += " " + x.to_string();
  out += "\nrelation " + result->relation + "\n";
  out += "lhs " + format_double(result->lhs) + "\n";
  out += "rhs " + format_double(result->rhs) + "\n";
  emit(g, out);
  return kViolation;
}

int cmd_influence(const Globals& g, const std::string& table_path, const std::string& set_text,
                  const std::string& mode) {
  const auto table = read_table_file(table_path);
  const auto s = CoordSet::parse(table.dimension(), set_text);
  if (mode == "exact") {
    emit(g, "influence " + format_double(influence_exact(table, s)) + "\n");
    return kOk;
  }
  if (mode == "fourier") {
    emit(g, "influence " + format_double(influence_fourier(walsh_hadamard(table), s)) + "\n");
    return kOk;
  }
  // estimate:m[:seed]; --seed supplies the seed when the mode omits it.
  if (mode.rfind("estimate:", 0) != 0) throw InputError("influence mode must be exact, fourier or estimate:m:seed");
  const auto rest = mode.substr(9);
  const auto colon = rest.find(':');
  const auto m = parse_uint(rest.substr(0, colon));
  if (m < 1) throw InputError("estimate needs m >= 1");
  const std::uint64_t seed = colon != std::string::npos ? parse_uint(rest.substr(colon + 1)) : g.seed.value_or(0);
  auto oracle = make_counting_oracle(table);
  Rng rng(seed);
  const double value = estimate_inf(oracle, s, static_cast<std::size_t>(m), rng);
  emit(g, "influence " + format_double(value) + "\nqueries " + std::to_string(oracle.query_count()) + "\n");
  return kOk;
}

int cmd_test(const Globals& g, const std::string& plan_path) {
  auto plan = parse_plan(read_text_file(plan_path));
  if (g.seed) plan.seed_base = *g.seed;
  if (!g.config_path.empty()) {
    const auto overrides = KeyValueDocument::read_file(g.config_path);
    for (const auto& line : overrides.lines()) {
      if (line.tokens.size() != 1) throw InputError(g.config_path + ": expected 'key value' lines");
      plan.overrides.emplace_back(line.key, line.tokens.front());
    }
    plan_config(plan, plan.seed_base);
  }
  const auto summary = run_experiment(plan);
  emit(g, format_summary(summary));
  if (!g.out_path.empty() && g.out_path != "-") {
    std::cerr << "accept_rate " << format_double(summary.accept_rate) << " over " << summary.trial_count
              << " trials\n";
  }
  return kOk;
}

int cmd_certify(const Globals& g, const std::string& table_path, const std::string& class_name, int k, double gamma) {
  const auto table = read_table_file(table_path);
  const auto cores = enumerate_cores(parse_valuation_class(class_name), k, gamma);
  const auto c = certify_distance(table, cores);
  std::string out = "certified_distance " + format_double(c.certified_distance) + "\n";
  out += "junta " + c.junta.to_string() + "\n";
  out += "junta_distance " + format_double(c.junta_distance) + "\n";
  out += "core_distance " + format_double(c.core_distance) + "\n";
  out += "slack " + format_double(c.slack) + "\n";
  out += "core_count " + std::to_string(cores.members.size()) + "\n";
  emit(g, out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Property testing of valuation functions on the Boolean hypercube"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may also follow the subcommand
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Seed for random specs, estimates and trial bases");
  app.add_option("--config", g.config_path, "Tester config overrides (`key value` lines) for test");
  app.add_option("--out", g.out_path, "Write output here instead of stdout");
  app.add_option("--threads", g.threads, "OpenMP thread count (0: runtime default)")->check(CLI::NonNegativeNumber);

  std::string spec_path, table_path, class_name, set_text, mode = "exact", plan_path;
  double tol = kDefaultCheckTolerance;
  int k = 2;
  double gamma = 0.25;

  auto* gen_cmd = app.add_subcommand("gen", "Generate a valuation table from a spec file");
  gen_cmd->add_option("spec", spec_path)->required();

  auto* check_cmd = app.add_subcommand("check", "Check a table against a class definition");
  check_cmd->add_option("table", table_path)->required();
  check_cmd->add_option("class", class_name)->required();
  check_cmd->add_option("--tol", tol, "Absolute tolerance for the defining inequalities");

  auto* influence_cmd = app.add_subcommand("influence", "Influence of a coordinate set");
  influence_cmd->add_option("table", table_path)->required();
  influence_cmd->add_option("set", set_text, "Coordinates as {1,3} or 1,3")->required();
  influence_cmd->add_option("--mode", mode, "exact | fourier | estimate:m[:seed]");

  auto* test_cmd = app.add_subcommand("test", "Run the seeded tester trials of a plan file");
  test_cmd->add_option("plan", plan_path)->required();

  auto* certify_cmd = app.add_subcommand("certify", "Lower-bound the l2 distance of a table to a class");
  certify_cmd->add_option("table", table_path)->required();
  certify_cmd->add_option("class", class_name)->required();
  certify_cmd->add_option("k", k)->required();
  certify_cmd->add_option("gamma", gamma)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kMalformed;
  }
  if (*seed_opt) g.seed = seed;
  if (g.threads > 0) omp_set_num_threads(g.threads);

  try {
    if (*gen_cmd) return cmd_gen(g, spec_path);
    if (*check_cmd) return cmd_check(g, table_path, class_name, tol);
    if (*influence_cmd) return cmd_influence(g, table_path, set_text, mode);
    if (*test_cmd) return cmd_test(g, plan_path);
    if (*certify_cmd) return cmd_certify(g, table_path, class_name, k, gamma);
  } catch (const UnsupportedClass& e) {
    std::cerr << "unsupported class: " << e.what() << "\n";
    return kUnsupported;
  } catch (const BudgetError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMalformed;
  }
  return kMalformed;
}
