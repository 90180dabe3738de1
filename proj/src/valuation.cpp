#include "cubetest/valuation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "cubetest/errors.hpp"
#include "cubetest/text_io.hpp"

namespace cubetest {

namespace {

constexpr std::pair<ValuationClass, std::string_view> kClassNames[] = {
    {ValuationClass::additive, "additive"},
    {ValuationClass::coverage, "coverage"},
    {ValuationClass::unit_demand, "unit_demand"},
    {ValuationClass::oxs, "oxs"},
    {ValuationClass::gross_substitutes, "gross_substitutes"},
    {ValuationClass::submodular, "submodular"},
    {ValuationClass::xos, "xos"},
    {ValuationClass::self_bounding, "self_bounding"},
    {ValuationClass::subadditive, "subadditive"},
};

enum class Family { additive, unit_demand, budget_additive, coverage, xos, oxs };

Family family_of(ValuationClass tag) {
  switch (tag) {
    case ValuationClass::additive: return Family::additive;
    case ValuationClass::unit_demand: return Family::unit_demand;
    case ValuationClass::submodular: return Family::budget_additive;
    case ValuationClass::coverage: return Family::coverage;
    case ValuationClass::xos:
    case ValuationClass::self_bounding:
    case ValuationClass::subadditive: return Family::xos;
    case ValuationClass::oxs:
    case ValuationClass::gross_substitutes: return Family::oxs;
  }
  throw InputError("unknown valuation class");
}

void require_weights(const std::vector<double>& w, std::size_t n, const char* what) {
  if (w.empty()) throw InputError(std::string(what) + " must not be empty");
  if (w.size() != n) throw InputError(std::string(what) + " needs " + std::to_string(n) + " entries");
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError(std::string(what) + " must be non-negative");
  }
}

// Best total value when every agent takes at most one item of `items`.
double best_assignment(const std::vector<std::vector<double>>& agents, std::size_t agent, std::uint64_t items) {
  if (agent == agents.size() || items == 0) return 0.0;
  double best = best_assignment(agents, agent + 1, items);
  for (std::uint64_t rest = items; rest != 0; rest &= rest - 1) {
    const int item = std::countr_zero(rest);
    const double w = agents[agent][static_cast<std::size_t>(item)];
    if (w <= 0.0) continue;
    best = std::max(best, w + best_assignment(agents, agent + 1, items & ~(std::uint64_t{1} << item)));
  }
  return best;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (double v : values) out += " " + format_double(v);
  return out;
}

std::vector<double> doubles_of(const KeyValueLine& line, std::size_t skip = 0) {
  std::vector<double> out;
  for (std::size_t i = skip; i < line.tokens.size(); ++i) out.push_back(parse_double(line.tokens[i]));
  return out;
}

}  // namespace

std::string_view to_string(ValuationClass tag) {
  for (const auto& [t, name] : kClassNames) {
    if (t == tag) return name;
  }
  return "unknown";
}

ValuationClass parse_valuation_class(std::string_view text) {
  for (const auto& [t, name] : kClassNames) {
    if (name == text) return t;
  }
  throw InputError("unknown valuation class '" + std::string(text) + "'");
}

GeneratedValuation gen(const ValuationSpec& spec, int n) {
  if (n < 1 || n > kMaxTableDimension) throw InputError("generator dimension out of range");
  const auto items = static_cast<std::size_t>(n);
  std::vector<double> raw(std::size_t{1} << n, 0.0);

  switch (family_of(spec.class_tag)) {
    case Family::additive:
    case Family::unit_demand:
    case Family::budget_additive: {
      require_weights(spec.weights, items, "weights");
      const auto family = family_of(spec.class_tag);
      if (family == Family::budget_additive && !(spec.budget >= 0.0)) throw InputError("budget must be non-negative");
      for (std::uint64_t x = 0; x < raw.size(); ++x) {
        double sum = 0.0;
        double max = 0.0;
        for (std::size_t i = 0; i < items; ++i) {
          if ((x >> i) & 1U) {
            sum += spec.weights[i];
            max = std::max(max, spec.weights[i]);
          }
        }
        raw[x] = family == Family::additive ? sum : family == Family::unit_demand ? max : std::min(sum, spec.budget);
      }
      break;
    }
    case Family::coverage: {
      const auto& uw = spec.universe_weights;
      if (uw.empty()) throw InputError("coverage universe must not be empty");
      for (double v : uw) {
        if (!(v >= 0.0)) throw InputError("universe weights must be non-negative");
      }
      if (spec.sets.size() != items) throw InputError("coverage needs one set per item");
      std::vector<std::vector<bool>> member(items, std::vector<bool>(uw.size(), false));
      for (std::size_t i = 0; i < items; ++i) {
        for (int u : spec.sets[i]) {
          if (u < 1 || static_cast<std::size_t>(u) > uw.size()) throw InputError("coverage set element out of range");
          member[i][static_cast<std::size_t>(u - 1)] = true;
        }
      }
      for (std::uint64_t x = 0; x < raw.size(); ++x) {
        double sum = 0.0;
        for (std::size_t u = 0; u < uw.size(); ++u) {
          for (std::size_t i = 0; i < items; ++i) {
            if (((x >> i) & 1U) && member[i][u]) {
              sum += uw[u];
              break;
            }
          }
        }
        raw[x] = sum;
      }
      break;
    }
    case Family::xos: {
      if (spec.rows.empty()) throw InputError("xos needs at least one row");
      for (const auto& row : spec.rows) require_weights(row, items, "xos row");
      for (std::uint64_t x = 0; x < raw.size(); ++x) {
        double best = 0.0;
        for (const auto& row : spec.rows) {
          double sum = 0.0;
          for (std::size_t j = 0; j < items; ++j) {
            if ((x >> j) & 1U) sum += row[j];
          }
          best = std::max(best, sum);
        }
        raw[x] = best;
      }
      break;
    }
    case Family::oxs: {
      if (spec.rows.empty()) throw InputError("oxs needs at least one unit-demand agent");
      if (spec.rows.size() > 6) throw InputError("oxs supports at most 6 agents");
      for (const auto& row : spec.rows) require_weights(row, items, "oxs agent");
      for (std::uint64_t x = 0; x < raw.size(); ++x) raw[x] = best_assignment(spec.rows, 0, x);
      break;
    }
  }

  const double max = *std::max_element(raw.begin(), raw.end());
  const double factor = max > 1.0 ? max : 1.0;
  if (factor != 1.0) {
    for (double& v : raw) v = std::min(v / factor, 1.0);
  }
  return {FunctionTable(n, std::move(raw)), factor};
}

ValuationSpec sample_spec(ValuationClass tag, int n, std::uint64_t seed) {
  if (n < 1 || n > kMaxTableDimension) throw InputError("generator dimension out of range");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const auto items = static_cast<std::size_t>(n);

  ValuationSpec spec;
  spec.class_tag = tag;
  spec.seed = seed;
  switch (family_of(tag)) {
    case Family::additive:
    case Family::unit_demand:
    case Family::budget_additive: {
      spec.weights.resize(items);
      for (double& w : spec.weights) w = unit(rng);
      if (family_of(tag) == Family::budget_additive) {
        double total = 0.0;
        for (double w : spec.weights) total += w;
        spec.budget = total * std::uniform_real_distribution<double>(0.25, 0.75)(rng);
      }
      break;
    }
    case Family::coverage: {
      spec.universe_weights.resize(2 * items);
      for (double& w : spec.universe_weights) w = unit(rng);
      std::bernoulli_distribution include(0.3);
      spec.sets.resize(items);
      for (auto& set : spec.sets) {
        for (std::size_t u = 0; u < spec.universe_weights.size(); ++u) {
          if (include(rng)) set.push_back(static_cast<int>(u + 1));
        }
      }
      break;
    }
    case Family::xos: {
      spec.rows.assign(items, std::vector<double>(items, 0.0));
      for (auto& row : spec.rows) {
        for (double& w : row) w = coin(rng) ? unit(rng) : 0.0;
      }
      break;
    }
    case Family::oxs: {
      const std::size_t agents = std::min<std::size_t>(3, items);
      spec.rows.assign(agents, std::vector<double>(items, 0.0));
      for (auto& row : spec.rows) {
        for (double& w : row) w = unit(rng);
      }
      break;
    }
  }
  return spec;
}

std::string format_spec(const ValuationSpec& spec) {
  std::string out = "class " + std::string(to_string(spec.class_tag)) + "\n";
  out += "seed " + std::to_string(spec.seed) + "\n";
  if (!spec.weights.empty()) out += "weights" + join(spec.weights) + "\n";
  if (family_of(spec.class_tag) == Family::budget_additive) out += "budget " + format_double(spec.budget) + "\n";
  if (!spec.universe_weights.empty()) out += "universe_weights" + join(spec.universe_weights) + "\n";
  for (std::size_t i = 0; i < spec.sets.size(); ++i) {
    out += "set " + std::to_string(i + 1);
    for (int u : spec.sets[i]) out += " " + std::to_string(u);
    out += "\n";
  }
  for (const auto& row : spec.rows) out += "row" + join(row) + "\n";
  return out;
}

ValuationSpec parse_spec(std::string_view text, int* dimension) {
  const auto doc = KeyValueDocument::parse(text);
  for (const auto& line : doc.lines()) {
    static const std::string_view known[] = {"class", "seed", "n", "random", "weights", "budget",
                                             "universe_weights", "set", "row"};
    if (std::find(std::begin(known), std::end(known), line.key) == std::end(known)) {
      throw InputError("line " + std::to_string(line.line_number) + ": unknown key '" + line.key + "'");
    }
  }
  const auto tag = parse_valuation_class(doc.string_value("class"));
  const std::uint64_t seed = doc.has("seed") ? doc.uint_value("seed") : 0;
  int n = 0;
  if (doc.has("n")) {
    const auto value = doc.int_value("n");
    if (value < 1 || value > kMaxTableDimension) throw InputError("n out of range");
    n = static_cast<int>(value);
  }

  ValuationSpec spec;
  if (doc.has("random")) {
    if (n == 0) throw InputError("a random spec needs 'n'");
    spec = sample_spec(tag, n, seed);
  } else {
    spec.class_tag = tag;
    spec.seed = seed;
    if (const auto* w = doc.find("weights")) spec.weights = doubles_of(*w);
    if (doc.has("budget")) spec.budget = doc.double_value("budget");
    if (const auto* u = doc.find("universe_weights")) spec.universe_weights = doubles_of(*u);
    const auto sets = doc.find_all("set");
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const auto& line = *sets[i];
      if (line.tokens.empty() || parse_int(line.tokens.front()) != static_cast<std::int64_t>(i + 1)) {
        throw InputError("line " + std::to_string(line.line_number) + ": sets must be listed as 'set 1', 'set 2', ...");
      }
      std::vector<int> members;
      for (std::size_t t = 1; t < line.tokens.size(); ++t) members.push_back(static_cast<int>(parse_int(line.tokens[t])));
      spec.sets.push_back(std::move(members));
    }
    for (const auto* row : doc.find_all("row")) spec.rows.push_back(doubles_of(*row));
    if (n == 0) {
      if (!spec.weights.empty()) {
        n = static_cast<int>(spec.weights.size());
      } else if (!spec.sets.empty()) {
        n = static_cast<int>(spec.sets.size());
      } else if (!spec.rows.empty()) {
        n = static_cast<int>(spec.rows.front().size());
      }
    }
  }
  if (dimension != nullptr) *dimension = n;
  return spec;
}

std::uint64_t spec_hash(const ValuationSpec& spec) {
  // 64-bit FNV-1a over the canonical text form.
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : format_spec(spec)) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

CheckResult check_submodular(const FunctionTable& f, double tol) {
  const int n = f.dimension();
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    for (int i = 0; i < n; ++i) {
      const std::uint64_t ei = std::uint64_t{1} << i;
      if (x & ei) continue;
      for (int j = i + 1; j < n; ++j) {
        const std::uint64_t ej = std::uint64_t{1} << j;
        if (x & ej) continue;
        const double lhs = f.at(x | ei) + f.at(x | ej);
        const double rhs = f.at(x) + f.at(x | ei | ej);
        if (lhs < rhs - tol) {
          return ViolationWitness{{CubePoint(n, x | ei), CubePoint(n, x | ej)}, lhs, rhs, "f(x)+f(y) >= f(x&y)+f(x|y)"};
        }
      }
    }
  }
  return std::nullopt;
}

CheckResult check_subadditive(const FunctionTable& f, double tol) {
  const int n = f.dimension();
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    for (std::uint64_t y = x; y < f.size(); ++y) {
      const double lhs = f.at(x) + f.at(y);
      const double rhs = f.at(x | y);
      if (lhs < rhs - tol) return ViolationWitness{{CubePoint(n, x), CubePoint(n, y)}, lhs, rhs, "f(x)+f(y) >= f(x|y)"};
    }
  }
  return std::nullopt;
}

CheckResult check_self_bounding(const FunctionTable& f, double tol) {
  const int n = f.dimension();
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    const double fx = f.at(x);
    double drops = 0.0;
    for (int i = 0; i < n; ++i) drops += fx - std::min(fx, f.at(x ^ (std::uint64_t{1} << i)));
    if (fx < drops - tol) return ViolationWitness{{CubePoint(n, x)}, fx, drops, "f(x) >= sum_i (f(x) - min_{x_i} f(x))"};
  }
  return std::nullopt;
}

namespace {

template <typename Predict>
CheckResult check_against_singletons(const FunctionTable& f, double tol, Predict predict, const char* relation) {
  const int n = f.dimension();
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = f.at(std::uint64_t{1} << i);
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    const double expected = predict(w, x);
    const double actual = f.at(x);
    if (std::abs(actual - expected) > tol) {
      return ViolationWitness{{CubePoint(n, x)}, std::min(actual, expected), std::max(actual, expected), relation};
    }
  }
  return std::nullopt;
}

}  // namespace

CheckResult check_additive(const FunctionTable& f, double tol) {
  return check_against_singletons(
      f, tol,
      [](const std::vector<double>& w, std::uint64_t x) {
        double sum = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
          if ((x >> i) & 1U) sum += w[i];
        }
        return sum;
      },
      "f(x) == sum_{i:x_i=1} f(e_i)");
}

CheckResult check_unit_demand(const FunctionTable& f, double tol) {
  return check_against_singletons(
      f, tol,
      [](const std::vector<double>& w, std::uint64_t x) {
        double max = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
          if ((x >> i) & 1U) max = std::max(max, w[i]);
        }
        return max;
      },
      "f(x) == max_{i:x_i=1} f(e_i)");
}

bool has_checker(ValuationClass tag) {
  switch (tag) {
    case ValuationClass::additive:
    case ValuationClass::unit_demand:
    case ValuationClass::submodular:
    case ValuationClass::self_bounding:
    case ValuationClass::subadditive: return true;
    default: return false;
  }
}

CheckResult check_class(const FunctionTable& f, ValuationClass tag, double tol) {
  switch (tag) {
    case ValuationClass::additive: return check_additive(f, tol);
    case ValuationClass::unit_demand: return check_unit_demand(f, tol);
    case ValuationClass::submodular: return check_submodular(f, tol);
    case ValuationClass::self_bounding: return check_self_bounding(f, tol);
    case ValuationClass::subadditive: return check_subadditive(f, tol);
    default: throw UnsupportedClass("no membership checker for class '" + std::string(to_string(tag)) + "'");
  }
}

}  // namespace cubetest
