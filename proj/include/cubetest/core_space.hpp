#pragma once

// Grid-discretized core functions on {0,1}^k: exhaustive enumeration of the
// grid cores that satisfy a class definition, distances to such sets, lifting
// a core onto n variables, and distance certificates built from both.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cubetest/cube.hpp"
#include "cubetest/valuation.hpp"

namespace cubetest {

// A function {0,1}^k -> [0,1], indexed like FunctionTable (input i in bit i-1).
class CoreTable {
 public:
  CoreTable() = default;
  CoreTable(int k, std::vector<double> values);

  int arity() const { return k_; }
  double at(std::uint64_t input) const { return values_[input]; }
  std::span<const double> values() const { return values_; }
  FunctionTable as_table() const { return FunctionTable(k_, values_); }

  friend bool operator==(const CoreTable&, const CoreTable&) = default;

 private:
  int k_ = 0;
  std::vector<double> values_;
};

struct CoreSet {
  ValuationClass class_tag = ValuationClass::submodular;
  int k = 0;
  double gamma = 0.0;
  std::vector<CoreTable> members;  // enumeration order
};

struct EnumerationBudget {
  std::uint64_t max_candidates = 50'000'000;  // bound on (1/gamma + 1)^(2^k)
  int max_arity = 3;
};

// Grid values {0, gamma, 2 gamma, ...} plus the endpoint 1.
std::vector<double> grid_values(double gamma);

bool has_core_enumeration(ValuationClass tag);

// Every grid function on {0,1}^k whose table passes the class's definitional
// checker at tolerance gamma * 1e-6. Members appear in lexicographic order of
// their value tuples (point 0 most significant, values ascending).
// Throws UnsupportedClass / BudgetError.
CoreSet enumerate_cores(ValuationClass tag, int k, double gamma, const EnumerationBudget& budget = {});

// min over members of the exact l2 distance on {0,1}^k. Throws on an empty set.
double dist_core_to_set(const CoreTable& g, const CoreSet& cores);

// f(x) = h(x_{coords[0]}, ..., x_{coords[k-1]}) on n variables; coords are 1-indexed.
FunctionTable lift_core(const CoreTable& h, std::span<const int> coords, int n);

// The core of f_J read off along `coords` (the members of J in the given order).
CoreTable projected_core(const FunctionTable& f, std::span<const int> coords);

// Lower bound on the l2 distance from f to the k-juntas whose cores lie in the
// class. For g a junta on J with class core, ||f-g||^2 = Inf_f(~J) + ||f_J-g||^2,
// so the bound minimizes sqrt(Inf_f(~J) + dist(core of f_J, cores)^2) over all
// |J| = k and subtracts the gamma/2 discretization slack.
struct DistanceCertificate {
  CoordSet junta;                 // minimizing J
  double junta_distance = 0.0;    // Inf_f(~J)^{1/2}
  double core_distance = 0.0;     // dist_core_to_set(core of f_J, cores)
  double slack = 0.0;             // gamma / 2
  double certified_distance = 0.0;
};

DistanceCertificate certify_distance(const FunctionTable& f, const CoreSet& cores,
                                     std::uint64_t max_subsets = 1'000'000);

// On-disk cache keyed by (class, k, gamma, checker tolerance).
inline constexpr int kCoreCacheVersion = 1;
double core_check_tolerance(double gamma);
void save_core_set(const std::string& path, const CoreSet& cores);
// std::nullopt when the file is missing, from another version, or keyed differently.
std::optional<CoreSet> load_core_set(const std::string& path, ValuationClass tag, int k, double gamma);
std::string core_cache_name(ValuationClass tag, int k, double gamma);

}  // namespace cubetest
