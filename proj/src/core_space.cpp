#include "cubetest/core_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <limits>

#include "cubetest/errors.hpp"
#include "cubetest/influence.hpp"
#include "cubetest/text_io.hpp"

namespace cubetest {

CoreTable::CoreTable(int k, std::vector<double> values) : k_(k), values_(std::move(values)) {
  if (k < 0 || k > kMaxTableDimension) throw InputError("core arity out of range");
  if (values_.size() != (std::size_t{1} << k)) throw InputError("core table needs 2^k values");
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) throw InputError("core value outside [0,1]");
  }
}

std::vector<double> grid_values(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("grid step must lie in (0,1]");
  std::vector<double> grid;
  const double steps = std::round(1.0 / gamma);
  if (std::abs(1.0 / gamma - steps) < 1e-9 * steps) {
    for (double j = 0; j <= steps; ++j) grid.push_back(j / steps);
    return grid;
  }
  for (double j = 0; j * gamma < 1.0 - 1e-12; ++j) grid.push_back(j * gamma);
  grid.push_back(1.0);
  return grid;
}

bool has_core_enumeration(ValuationClass tag) { return has_checker(tag); }

double core_check_tolerance(double gamma) { return gamma * 1e-6; }

namespace {

// Checks every class constraint whose largest point index is `t`; all points
// below t are already assigned.
bool consistent_at(ValuationClass tag, std::span<const double> v, int k, std::uint64_t t, double tol) {
  switch (tag) {
    case ValuationClass::submodular: {
      for (int i = 0; i < k; ++i) {
        const std::uint64_t ei = std::uint64_t{1} << i;
        if (!(t & ei)) continue;
        for (int j = i + 1; j < k; ++j) {
          const std::uint64_t ej = std::uint64_t{1} << j;
          if (!(t & ej)) continue;
          const std::uint64_t x = t & ~(ei | ej);
          if (v[x | ei] + v[x | ej] < v[x] + v[t] - tol) return false;
        }
      }
      return true;
    }
    case ValuationClass::additive:
    case ValuationClass::unit_demand: {
      if (t == 0) return v[0] <= tol;
      if (std::popcount(t) < 2) return true;
      double sum = 0.0;
      double max = 0.0;
      for (int i = 0; i < k; ++i) {
        if ((t >> i) & 1U) {
          sum += v[std::uint64_t{1} << i];
          max = std::max(max, v[std::uint64_t{1} << i]);
        }
      }
      const double expected = tag == ValuationClass::additive ? sum : max;
      return std::abs(v[t] - expected) <= tol;
    }
    case ValuationClass::subadditive: {
      // All pairs (x, y) with x | y == t.
      std::uint64_t x = t;
      while (true) {
        const std::uint64_t forced = t & ~x;
        std::uint64_t s = x;
        while (true) {
          if (v[x] + v[forced | s] < v[t] - tol) return false;
          if (s == 0) break;
          s = (s - 1) & x;
        }
        if (x == 0) break;
        x = (x - 1) & t;
      }
      return true;
    }
    case ValuationClass::self_bounding: {
      if (t != low_mask(k)) return true;
      std::vector<double> values(v.begin(), v.end());
      return !check_self_bounding(FunctionTable(k, std::move(values)), tol).has_value();
    }
    default: throw UnsupportedClass("no core enumeration for class '" + std::string(to_string(tag)) + "'");
  }
}

void extend(ValuationClass tag, int k, const std::vector<double>& grid, double tol, std::vector<double>& values,
            std::uint64_t t, std::vector<CoreTable>& out) {
  if (t == values.size()) {
    out.emplace_back(k, values);
    return;
  }
  for (double g : grid) {
    values[t] = g;
    if (consistent_at(tag, values, k, t, tol)) extend(tag, k, grid, tol, values, t + 1, out);
  }
}

}  // namespace

CoreSet enumerate_cores(ValuationClass tag, int k, double gamma, const EnumerationBudget& budget) {
  if (!has_core_enumeration(tag)) {
    throw UnsupportedClass("no core enumeration for class '" + std::string(to_string(tag)) + "'");
  }
  if (k < 1) throw InputError("core arity must be at least 1");
  if (k > budget.max_arity) {
    throw BudgetError("core arity " + std::to_string(k) + " exceeds the cap of " + std::to_string(budget.max_arity));
  }
  const auto grid = grid_values(gamma);
  const double candidates = std::pow(static_cast<double>(grid.size()), std::ldexp(1.0, k));
  if (candidates > static_cast<double>(budget.max_candidates)) {
    throw BudgetError("core enumeration for k=" + std::to_string(k) + ", gamma=" + format_double(gamma) +
                      " needs " + format_double(candidates) + " candidates (budget " +
                      std::to_string(budget.max_candidates) + ")");
  }
  const double tol = core_check_tolerance(gamma);
  const std::size_t points = std::size_t{1} << k;

  // Split on the value at point 0; concatenating in order keeps enumeration order.
  std::vector<std::vector<CoreTable>> by_prefix(grid.size());
  const auto prefixes = static_cast<std::int64_t>(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t p = 0; p < prefixes; ++p) {
    std::vector<double> values(points, 0.0);
    values[0] = grid[static_cast<std::size_t>(p)];
    if (consistent_at(tag, values, k, 0, tol)) {
      extend(tag, k, grid, tol, values, 1, by_prefix[static_cast<std::size_t>(p)]);
    }
  }

  CoreSet set{tag, k, gamma, {}};
  for (auto& chunk : by_prefix) {
    std::move(chunk.begin(), chunk.end(), std::back_inserter(set.members));
  }
  return set;
}

double dist_core_to_set(const CoreTable& g, const CoreSet& cores) {
  if (cores.members.empty()) throw InputError("distance to an empty core set");
  if (g.arity() != cores.k) throw InputError("core arity differs from the core set");
  double best = std::numeric_limits<double>::infinity();
  const auto gv = g.values();
  for (const auto& h : cores.members) {
    const auto hv = h.values();
    double sum = 0.0;
    for (std::size_t a = 0; a < gv.size(); ++a) sum += (gv[a] - hv[a]) * (gv[a] - hv[a]);
    best = std::min(best, sum);
  }
  return std::sqrt(best / static_cast<double>(gv.size()));
}

namespace {

void require_coords(std::span<const int> coords, int n) {
  std::uint64_t seen = 0;
  for (int c : coords) {
    if (c < 1 || c > n) throw InputError("core coordinate " + std::to_string(c) + " outside [1, n]");
    const std::uint64_t bit = std::uint64_t{1} << (c - 1);
    if (seen & bit) throw InputError("duplicate core coordinate " + std::to_string(c));
    seen |= bit;
  }
}

std::uint64_t gather(std::uint64_t x, std::span<const int> coords) {
  std::uint64_t input = 0;
  for (std::size_t j = 0; j < coords.size(); ++j) input |= ((x >> (coords[j] - 1)) & 1U) << j;
  return input;
}

}  // namespace

FunctionTable lift_core(const CoreTable& h, std::span<const int> coords, int n) {
  if (static_cast<int>(coords.size()) != h.arity()) throw InputError("lift needs one coordinate per core input");
  require_coords(coords, n);
  return FunctionTable::from_masks(n, [&](std::uint64_t x) { return h.at(gather(x, coords)); });
}

CoreTable projected_core(const FunctionTable& f, std::span<const int> coords) {
  require_coords(coords, f.dimension());
  const int k = static_cast<int>(coords.size());
  std::vector<double> sums(std::size_t{1} << k, 0.0);
  for (std::uint64_t x = 0; x < f.size(); ++x) sums[gather(x, coords)] += f.at(x);
  const double per_input = std::ldexp(1.0, f.dimension() - k);
  for (double& s : sums) s = std::clamp(s / per_input, 0.0, 1.0);
  return CoreTable(k, std::move(sums));
}

DistanceCertificate certify_distance(const FunctionTable& f, const CoreSet& cores, std::uint64_t max_subsets) {
  const int n = f.dimension();
  const int k = cores.k;
  if (k > n) throw InputError("core arity exceeds the table dimension");
  const auto subsets = binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k));
  if (subsets > max_subsets) {
    throw BudgetError("certificate would scan " + std::to_string(subsets) + " subsets (budget " +
                      std::to_string(max_subsets) + ")");
  }
  double mean_square = 0.0;
  for (double v : f.values()) mean_square += v * v;
  mean_square /= static_cast<double>(f.size());

  DistanceCertificate best;
  double best_total = std::numeric_limits<double>::infinity();
  for_each_combination(n, k, [&](std::span<const int> members) {
    std::vector<int> coords(members.begin(), members.end());
    for (int& c : coords) ++c;
    const auto core = projected_core(f, coords);
    // ||f - f_J||^2 = E[f^2] - E[f_J^2] because f_J is an orthogonal projection.
    double projected_square = 0.0;
    for (double v : core.values()) projected_square += v * v;
    projected_square /= static_cast<double>(core.values().size());
    const double influence = std::max(0.0, mean_square - projected_square);
    const double core_distance = dist_core_to_set(core, cores);
    const double total = std::sqrt(influence + core_distance * core_distance);
    if (total < best_total - 1e-12) {
      best_total = total;
      best.junta = CoordSet::of(n, coords);
      best.junta_distance = std::sqrt(influence);
      best.core_distance = core_distance;
    }
  });
  best.slack = cores.gamma / 2.0;
  best.certified_distance = std::max(0.0, best_total - best.slack);
  return best;
}

std::string core_cache_name(ValuationClass tag, int k, double gamma) {
  return "coreset_" + std::string(to_string(tag)) + "_k" + std::to_string(k) + "_g" + format_double(gamma) + ".txt";
}

void save_core_set(const std::string& path, const CoreSet& cores) {
  std::string out = "coreset v" + std::to_string(kCoreCacheVersion) + "\n";
  out += "class " + std::string(to_string(cores.class_tag)) + "\n";
  out += "k " + std::to_string(cores.k) + "\n";
  out += "gamma " + format_double(cores.gamma) + "\n";
  out += "tolerance " + format_double(core_check_tolerance(cores.gamma)) + "\n";
  out += "count " + std::to_string(cores.members.size()) + "\n";
  for (const auto& h : cores.members) {
    out += "core";
    for (double v : h.values()) out += " " + format_double(v);
    out += "\n";
  }
  write_text_file(path, out);
}

std::optional<CoreSet> load_core_set(const std::string& path, ValuationClass tag, int k, double gamma) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    const auto doc = KeyValueDocument::read_file(path);
    if (doc.string_value("coreset") != "v" + std::to_string(kCoreCacheVersion)) return std::nullopt;
    if (parse_valuation_class(doc.string_value("class")) != tag) return std::nullopt;
    if (doc.int_value("k") != k || doc.double_value("gamma") != gamma) return std::nullopt;
    if (doc.double_value("tolerance") != core_check_tolerance(gamma)) return std::nullopt;
    CoreSet set{tag, k, gamma, {}};
    for (const auto* line : doc.find_all("core")) {
      std::vector<double> values;
      for (const auto& token : line->tokens) values.push_back(parse_double(token));
      set.members.emplace_back(k, std::move(values));
    }
    if (set.members.size() != doc.uint_value("count")) return std::nullopt;
    return set;
  } catch (const InputError&) {
    return std::nullopt;
  }
}

}  // namespace cubetest
