#pragma once

// Valuation-function classes on {0,1}^n: generators that build tables by the
// literal class definitions, definitional membership checkers, and synthesis
// of instances with a certified l2 distance to a class.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cubetest/cube.hpp"

namespace cubetest {

enum class ValuationClass {
  additive,
  coverage,
  unit_demand,
  oxs,
  gross_substitutes,
  submodular,
  xos,
  self_bounding,
  subadditive,
};

std::string_view to_string(ValuationClass tag);
ValuationClass parse_valuation_class(std::string_view text);

// Parameters for one generated valuation. Which fields are read depends on
// `class_tag`:
//   additive, unit_demand   weights w_1..w_n
//   submodular              weights + budget: f(x) = min(sum w_i x_i, budget)
//   coverage                universe_weights w_u, sets A_1..A_n (1-based u)
//   xos, self_bounding,     rows w_{i,.}: f(x) = max_i sum_j w_ij x_j
//   subadditive
//   oxs, gross_substitutes  rows = unit-demand agents; f(x) is the best
//                           assignment of the items in x, one per agent
struct ValuationSpec {
  ValuationClass class_tag = ValuationClass::additive;
  std::uint64_t seed = 0;
  std::vector<double> weights;
  double budget = 0.0;
  std::vector<double> universe_weights;
  std::vector<std::vector<int>> sets;
  std::vector<std::vector<double>> rows;
};

struct GeneratedValuation {
  FunctionTable table;
  // Raw values were divided by this factor (1 when the raw maximum is <= 1).
  double normalization = 1.0;
};

GeneratedValuation gen(const ValuationSpec& spec, int n);

// Draws random parameters for `tag` on n items, deterministically from `seed`.
ValuationSpec sample_spec(ValuationClass tag, int n, std::uint64_t seed);

std::string format_spec(const ValuationSpec& spec);
// `random` in the document means "sample parameters from the seed"; the
// returned spec then carries the sampled parameters. `n` is required in that
// case and is returned through `dimension`.
ValuationSpec parse_spec(std::string_view text, int* dimension = nullptr);
std::uint64_t spec_hash(const ValuationSpec& spec);

// A failed inequality. `lhs < rhs` always holds for a reported witness; for
// equality constraints lhs is the smaller side.
struct ViolationWitness {
  std::vector<CubePoint> points;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string relation;
};

// std::nullopt means the table passed.
using CheckResult = std::optional<ViolationWitness>;

inline constexpr double kDefaultCheckTolerance = 1e-9;

CheckResult check_submodular(const FunctionTable& f, double tol = kDefaultCheckTolerance);
CheckResult check_subadditive(const FunctionTable& f, double tol = kDefaultCheckTolerance);
CheckResult check_self_bounding(const FunctionTable& f, double tol = kDefaultCheckTolerance);
CheckResult check_additive(const FunctionTable& f, double tol = kDefaultCheckTolerance);
CheckResult check_unit_demand(const FunctionTable& f, double tol = kDefaultCheckTolerance);

bool has_checker(ValuationClass tag);
// Throws UnsupportedClass for classes without a checker.
CheckResult check_class(const FunctionTable& f, ValuationClass tag, double tol = kDefaultCheckTolerance);

enum class FarMode {
  core_far,  // a k-junta whose core is far from every enumerated class core
  parity,    // (1 + chi_[n]) / 2, at l2 distance 1/2 from every k-junta
};

struct FarInstance {
  FunctionTable table;
  double certified_distance = 0.0;
  // Relevant coordinates, in core-input order (empty for parity).
  std::vector<int> coords;
};

// Throws BudgetError when no instance reaches the requested distance.
FarInstance make_far_instance(ValuationClass target, FarMode mode, int n, int k, double epsilon,
                              std::uint64_t seed, double gamma = 0.25);

}  // namespace cubetest
