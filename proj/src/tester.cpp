#include "cubetest/tester.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cubetest/errors.hpp"
#include "cubetest/text_io.hpp"

namespace cubetest {

double lp_epsilon_map(double p, double epsilon) {
  if (!(p >= 1.0)) throw InputError("l_p testing needs p >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in (0,1)");
  return p > 2.0 ? std::pow(epsilon, p / 2.0) : epsilon;
}

std::string_view to_string(ScaleProfile profile) { return profile == ScaleProfile::paper ? "paper" : "desk"; }

ScaleProfile parse_scale_profile(std::string_view text) {
  if (text == "paper") return ScaleProfile::paper;
  if (text == "desk") return ScaleProfile::desk;
  throw InputError("unknown scale profile '" + std::string(text) + "'");
}

TesterConfig make_config(ScaleProfile profile, int k, double epsilon, double p, std::uint64_t seed) {
  if (k < 1) throw InputError("tester needs k >= 1");
  const double e = lp_epsilon_map(p, epsilon);
  TesterConfig c;
  c.epsilon = epsilon;
  c.k = k;
  c.p = p;
  c.seed = seed;
  c.scale_profile = profile;
  c.inf_threshold = e * e / 1000.0;
  c.accept_threshold = 0.35 * e;
  const double kk = k;
  if (profile == ScaleProfile::paper) {
    c.q = static_cast<std::size_t>(std::ceil(std::ldexp(1.0, k) / std::pow(e, 5)));
    c.m = static_cast<std::size_t>(std::ceil(std::pow(kk, 6) / std::pow(e, 5)));
    c.num_parts = static_cast<std::size_t>(100 * k * k * k * k);
    c.core_grid = e / 1000.0;
  } else {
    c.q = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(4.0 / (e * e))), 64, 1024);
    c.m = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(125.0 / (e * e))), 1000, 10000);
    c.num_parts = static_cast<std::size_t>(std::max(4 * k, 12));
    c.core_grid = 1.0 / std::ceil(1.0 / e - 1e-9);
  }
  return c;
}

void validate(const TesterConfig& c) {
  if (c.k < 1) throw InputError("k must be at least 1");
  if (!(c.p >= 1.0)) throw InputError("p must be at least 1");
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) throw InputError("epsilon must lie in (0,1)");
  if (c.q < 1 || c.m < 1 || c.num_parts < 1) throw InputError("q, m and num_parts must be at least 1");
  if (c.num_parts < static_cast<std::size_t>(c.k)) throw InputError("num_parts must be at least k");
  if (!(c.inf_threshold > 0.0) || !(c.accept_threshold > 0.0)) throw InputError("thresholds must be positive");
  if (!(c.core_grid > 0.0 && c.core_grid <= 1.0)) throw InputError("core_grid must lie in (0,1]");
}

void apply_config_line(TesterConfig& c, const std::string& key, const std::string& value) {
  auto size = [&] { return static_cast<std::size_t>(parse_uint(value)); };
  if (key == "epsilon") c.epsilon = parse_double(value);
  else if (key == "k") c.k = static_cast<int>(parse_int(value));
  else if (key == "p") c.p = parse_double(value);
  else if (key == "q") c.q = size();
  else if (key == "m") c.m = size();
  else if (key == "num_parts") c.num_parts = size();
  else if (key == "refine_rounds") c.refine_rounds = size();
  else if (key == "inf_threshold") c.inf_threshold = parse_double(value);
  else if (key == "accept_threshold") c.accept_threshold = parse_double(value);
  else if (key == "core_grid") c.core_grid = parse_double(value);
  else if (key == "seed") c.seed = parse_uint(value);
  else if (key == "scale_profile") c.scale_profile = parse_scale_profile(value);
  else if (key == "sqrt_statistic") c.sqrt_statistic = parse_bool(value);
  else if (key == "max_subsets") c.max_subsets = parse_uint(value);
  else throw InputError("unknown tester config key '" + key + "'");
}

TesterConfig parse_config(std::string_view text) {
  const auto doc = KeyValueDocument::parse(text);
  const auto profile = doc.has("scale_profile") ? parse_scale_profile(doc.string_value("scale_profile")) : ScaleProfile::desk;
  const int k = doc.has("k") ? static_cast<int>(doc.int_value("k")) : 2;
  const double epsilon = doc.has("epsilon") ? doc.double_value("epsilon") : 0.25;
  const double p = doc.has("p") ? doc.double_value("p") : 2.0;
  auto config = make_config(profile, k, epsilon, p);
  for (const auto& line : doc.lines()) {
    if (line.tokens.size() != 1) throw InputError("line " + std::to_string(line.line_number) + ": expected 'key value'");
    apply_config_line(config, line.key, line.tokens.front());
  }
  validate(config);
  return config;
}

std::string format_config(const TesterConfig& c) {
  std::string out;
  out += "epsilon " + format_double(c.epsilon) + "\n";
  out += "k " + std::to_string(c.k) + "\n";
  out += "p " + format_double(c.p) + "\n";
  out += "q " + std::to_string(c.q) + "\n";
  out += "m " + std::to_string(c.m) + "\n";
  out += "num_parts " + std::to_string(c.num_parts) + "\n";
  out += "refine_rounds " + std::to_string(c.refine_rounds) + "\n";
  out += "inf_threshold " + format_double(c.inf_threshold) + "\n";
  out += "accept_threshold " + format_double(c.accept_threshold) + "\n";
  out += "core_grid " + format_double(c.core_grid) + "\n";
  out += "seed " + std::to_string(c.seed) + "\n";
  out += "scale_profile " + std::string(to_string(c.scale_profile)) + "\n";
  out += "sqrt_statistic " + std::string(c.sqrt_statistic ? "true" : "false") + "\n";
  out += "max_subsets " + std::to_string(c.max_subsets) + "\n";
  return out;
}

CoordSet PatternBuckets::bucket(const Pattern& c) const {
  const auto it = buckets.find(c);
  return it == buckets.end() ? CoordSet::none(n) : it->second;
}

CoordSet PatternBuckets::coords_of(std::span<const Pattern> patterns) const {
  std::uint64_t mask = 0;
  for (const auto& c : patterns) mask |= bucket(c).mask();
  return CoordSet(n, mask);
}

PatternBuckets bucket_coordinates(std::span<const CubePoint> samples) {
  if (samples.empty()) throw InputError("bucketing needs at least one sample");
  PatternBuckets out;
  out.n = samples.front().dimension();
  out.q = samples.size();
  for (const auto& x : samples) {
    if (x.dimension() != out.n) throw InputError("samples differ in dimension");
  }
  for (int i = 1; i <= out.n; ++i) {
    Pattern c(out.q, '0');
    for (std::size_t t = 0; t < out.q; ++t) {
      if (samples[t].bit(i)) c[t] = '1';
    }
    auto [it, inserted] = out.buckets.try_emplace(c, CoordSet::none(out.n));
    it->second = it->second | CoordSet::of(out.n, {i});
  }
  return out;
}

SampleSet draw_samples(QueryOracle& oracle, std::size_t q, Rng& rng) {
  const int n = oracle.dimension();
  SampleSet samples;
  samples.points.reserve(q);
  samples.values.reserve(q);
  for (std::size_t t = 0; t < q; ++t) {
    samples.points.emplace_back(n, rng() & low_mask(n));
    samples.values.push_back(oracle.query(samples.points.back()));
  }
  return samples;
}

namespace {

CoordSet union_of(const PatternBuckets& buckets, std::span<const PatternPart* const> parts) {
  std::uint64_t mask = 0;
  for (const auto* part : parts) mask |= buckets.coords_of(*part).mask();
  return CoordSet(buckets.n, mask);
}

}  // namespace

InitialSelection select_initial_parts(QueryOracle& oracle, const PatternBuckets& buckets, const TesterConfig& config,
                                      Rng& rng, const InfluenceEstimator& estimator) {
  const auto k = static_cast<std::size_t>(config.k);
  if (config.num_parts < k) throw InputError("num_parts must be at least k");
  const auto subsets = binomial(config.num_parts, k);
  if (subsets > config.max_subsets) {
    throw BudgetError("initial sweep needs C(" + std::to_string(config.num_parts) + ", " + std::to_string(k) +
                      ") = " + std::to_string(subsets) + " estimates (budget " + std::to_string(config.max_subsets) +
                      ")");
  }
  PatternPart whole{pattern_space_size(buckets.q), {}};
  for (const auto& entry : buckets.buckets) whole.occupied.push_back(entry.first);

  InitialSelection out;
  out.parts = equi_split(whole, config.num_parts, rng);
  out.eta.reserve(subsets);
  double best = std::numeric_limits<double>::infinity();
  std::vector<const PatternPart*> chosen(k);
  for_each_combination(static_cast<int>(config.num_parts), config.k, [&](std::span<const int> pick) {
    for (std::size_t i = 0; i < k; ++i) chosen[i] = &out.parts[static_cast<std::size_t>(pick[i])];
    const CoordSet kept = union_of(buckets, chosen);
    const double eta = estimator(oracle, kept.complement(), config.m, rng);
    out.eta.push_back(eta);
    if (eta < best) {
      best = eta;
      out.selected.assign(pick.begin(), pick.end());
    }
  });
  return out;
}

std::size_t refine_rounds_for(const TesterConfig& config) {
  if (config.refine_rounds > 0) return config.refine_rounds;
  const SlotCount space = pattern_space_size(config.q);
  const SlotCount largest = (space + config.num_parts - 1) / config.num_parts;
  return rounds_to_singletons(largest);
}

Refinement refine_parts(QueryOracle& oracle, std::vector<PatternPart> selected, const PatternBuckets& buckets,
                        const TesterConfig& config, Rng& rng, const InfluenceEstimator& estimator) {
  const std::size_t k = selected.size();
  if (k != static_cast<std::size_t>(config.k)) throw InputError("refinement needs exactly k parts");
  Refinement out;
  out.rounds = refine_rounds_for(config);
  const std::uint64_t choices = std::uint64_t{1} << k;
  std::vector<std::vector<PatternPart>> halves(k);
  std::vector<const PatternPart*> chosen(k);
  for (std::size_t round = 0; round < out.rounds; ++round) {
    for (std::size_t i = 0; i < k; ++i) halves[i] = equi_split(selected[i], 2, rng);
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t best_z = 0;
    for (std::uint64_t z = 0; z < choices; ++z) {
      for (std::size_t i = 0; i < k; ++i) chosen[i] = &halves[i][(z >> (k - 1 - i)) & 1U];
      const CoordSet kept = union_of(buckets, chosen);
      const double eta = estimator(oracle, kept.complement(), config.m, rng);
      if (eta < best) {
        best = eta;
        best_z = z;
      }
    }
    for (std::size_t i = 0; i < k; ++i) selected[i] = std::move(halves[i][(best_z >> (k - 1 - i)) & 1U]);
    out.choices.push_back(best_z);
    out.eta.push_back(best);
  }
  out.parts = std::move(selected);
  return out;
}

std::string_view to_string(Verdict verdict) { return verdict == Verdict::accept ? "accept" : "reject"; }

std::string_view to_string(RejectStage stage) {
  switch (stage) {
    case RejectStage::none: return "none";
    case RejectStage::influence_check: return "influence_check";
    case RejectStage::core_search: return "core_search";
  }
  return "none";
}

TesterReport final_check_and_learn(QueryOracle& oracle, const SampleSet& samples, std::span<const PatternPart> parts,
                                   const PatternBuckets& buckets, const CoreSet& cores, const TesterConfig& config,
                                   Rng& rng, const InfluenceEstimator& estimator) {
  const std::size_t k = parts.size();
  if (cores.k != static_cast<int>(k)) throw InputError("core arity differs from the number of selected parts");
  TesterReport report;
  std::uint64_t kept = 0;
  std::vector<int> representative(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    const CoordSet bucket = buckets.coords_of(parts[i]);
    report.selected_buckets.push_back(bucket);
    report.empty_buckets.push_back(bucket.empty());
    if (!bucket.empty()) representative[i] = bucket.members().front();
    kept |= bucket.mask();
  }

  report.eta_final = estimator(oracle, CoordSet(buckets.n, kept).complement(), config.m, rng);
  if (report.eta_final > config.inf_threshold) {
    report.verdict = Verdict::reject;
    report.reject_stage = RejectStage::influence_check;
    return report;
  }

  // phi(x)_i = x at the lowest coordinate of S_{b_i}; empty buckets read 0.
  std::vector<std::uint64_t> inputs(samples.points.size(), 0);
  for (std::size_t t = 0; t < samples.points.size(); ++t) {
    for (std::size_t i = 0; i < k; ++i) {
      if (representative[i] != 0 && samples.points[t].bit(representative[i])) inputs[t] |= std::uint64_t{1} << i;
    }
  }
  const double q = static_cast<double>(samples.points.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : cores.members) {
    double sum = 0.0;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
      const double d = samples.values[t] - h.at(inputs[t]);
      sum += d * d;
    }
    double statistic = sum / q;
    if (config.sqrt_statistic) statistic = std::sqrt(statistic);
    best = std::min(best, statistic);
    if (statistic <= config.accept_threshold) {
      report.verdict = Verdict::accept;
      report.reject_stage = RejectStage::none;
      report.learned_core = h;
      report.empirical_distance = statistic;
      return report;
    }
  }
  report.verdict = Verdict::reject;
  report.reject_stage = RejectStage::core_search;
  if (std::isfinite(best)) report.empirical_distance = best;
  return report;
}

TesterReport run_tester(QueryOracle& oracle, const CoreSet& cores, const TesterConfig& config, Rng& rng,
                        const InfluenceEstimator& estimator) {
  validate(config);
  if (cores.k != config.k) throw InputError("core set arity differs from k");
  if (binomial(config.num_parts, static_cast<std::uint64_t>(config.k)) > config.max_subsets) {
    throw BudgetError("initial sweep exceeds max_subsets");
  }
  const std::uint64_t start = oracle.query_count();

  const auto samples = draw_samples(oracle, config.q, rng);
  const auto buckets = bucket_coordinates(samples.points);
  auto initial = select_initial_parts(oracle, buckets, config, rng, estimator);

  std::vector<PatternPart> selected;
  for (std::size_t j : initial.selected) selected.push_back(initial.parts[j]);
  auto refinement = refine_parts(oracle, std::move(selected), buckets, config, rng, estimator);

  auto report = final_check_and_learn(oracle, samples, refinement.parts, buckets, cores, config, rng, estimator);
  report.queries_used = oracle.query_count() - start;
  for (std::size_t j : initial.selected) report.selected_parts.push_back(j + 1);
  report.initial_part_of.assign(static_cast<std::size_t>(buckets.n), 0);
  for (std::size_t j = 0; j < initial.parts.size(); ++j) {
    for (int c : buckets.coords_of(initial.parts[j]).members()) {
      report.initial_part_of[static_cast<std::size_t>(c - 1)] = static_cast<int>(j + 1);
    }
  }
  report.eta_initial = std::move(initial.eta);
  report.eta_refine = std::move(refinement.eta);
  report.refine_rounds = refinement.rounds;
  return report;
}

TesterReport run_tester(QueryOracle& oracle, ValuationClass tag, const TesterConfig& config, Rng& rng) {
  validate(config);
  const auto cores = enumerate_cores(tag, config.k, config.core_grid);
  return run_tester(oracle, cores, config, rng);
}

std::uint64_t expected_queries(const TesterConfig& config) {
  const std::uint64_t estimates = binomial(config.num_parts, static_cast<std::uint64_t>(config.k)) +
                                  (std::uint64_t{1} << config.k) * refine_rounds_for(config) + 1;
  return config.q + 2 * config.m * estimates;
}

namespace {

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (double v : values) out += " " + format_double(v);
  return out;
}

}  // namespace

std::string format_report(const TesterReport& r) {
  std::string out = "report v1\n";
  out += "verdict " + std::string(to_string(r.verdict)) + "\n";
  out += "reject_stage " + std::string(to_string(r.reject_stage)) + "\n";
  out += "queries_used " + std::to_string(r.queries_used) + "\n";
  out += "refine_rounds " + std::to_string(r.refine_rounds) + "\n";
  out += "selected_parts";
  for (auto j : r.selected_parts) out += " " + std::to_string(j);
  out += "\nselected_buckets";
  for (const auto& s : r.selected_buckets) out += " " + s.to_string();
  out += "\nempty_buckets";
  for (bool e : r.empty_buckets) out += e ? " 1" : " 0";
  out += "\nlearned_core";
  if (r.learned_core) {
    out += join_doubles(std::vector<double>(r.learned_core->values().begin(), r.learned_core->values().end()));
  } else {
    out += " none";
  }
  out += "\nempirical_distance " + (r.empirical_distance ? format_double(*r.empirical_distance) : std::string("none"));
  out += "\neta_initial" + join_doubles(r.eta_initial);
  out += "\neta_refine" + join_doubles(r.eta_refine);
  out += "\neta_final " + format_double(r.eta_final);
  out += "\ninitial_part_of";
  for (int j : r.initial_part_of) out += " " + std::to_string(j);
  out += "\n";
  return out;
}

}  // namespace cubetest
