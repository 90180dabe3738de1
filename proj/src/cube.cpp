#include "cubetest/cube.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <string>

#include "cubetest/errors.hpp"
#include "cubetest/kernels.hpp"

namespace cubetest {

namespace {

void require_dimension(int n, int max) {
  if (n < 0 || n > max) {
    throw InputError("dimension " + std::to_string(n) + " outside [0, " + std::to_string(max) + "]");
  }
}

void require_same_dimension(int a, int b) {
  if (a != b) throw InputError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

CubePoint::CubePoint(int n, std::uint64_t bits) : n_(n), bits_(bits) {
  require_dimension(n, kMaxPointDimension);
  if ((bits & ~low_mask(n)) != 0) throw InputError("point has bits beyond its dimension");
}

CubePoint CubePoint::parse(std::string_view bitstring) {
  if (bitstring.size() > static_cast<std::size_t>(kMaxPointDimension)) throw InputError("bitstring too long");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < bitstring.size(); ++i) {
    const char c = bitstring[i];
    if (c == '1') {
      bits |= std::uint64_t{1} << i;
    } else if (c != '0') {
      throw InputError("invalid bitstring '" + std::string(bitstring) + "'");
    }
  }
  return CubePoint(static_cast<int>(bitstring.size()), bits);
}

std::string CubePoint::to_string() const {
  std::string out(static_cast<std::size_t>(n_), '0');
  for (int i = 0; i < n_; ++i) {
    if ((bits_ >> i) & 1U) out[static_cast<std::size_t>(i)] = '1';
  }
  return out;
}

CoordSet::CoordSet(int n, std::uint64_t mask) : n_(n), mask_(mask) {
  require_dimension(n, kMaxPointDimension);
  if ((mask & ~low_mask(n)) != 0) throw InputError("coordinate set exceeds [n]");
}

CoordSet CoordSet::of(int n, std::initializer_list<int> coords) {
  return of(n, std::span<const int>(coords.begin(), coords.size()));
}

CoordSet CoordSet::of(int n, std::span<const int> coords) {
  std::uint64_t mask = 0;
  for (int c : coords) {
    if (c < 1 || c > n) throw InputError("coordinate " + std::to_string(c) + " outside [1, " + std::to_string(n) + "]");
    mask |= std::uint64_t{1} << (c - 1);
  }
  return CoordSet(n, mask);
}

CoordSet CoordSet::parse(int n, std::string_view text) {
  std::vector<int> coords;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      int value = 0;
      const auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), value);
      if (ec != std::errc()) throw InputError("bad coordinate list '" + std::string(text) + "'");
      coords.push_back(value);
      i = static_cast<std::size_t>(ptr - text.data());
    } else if (c == '{' || c == '}' || c == ',' || c == ' ') {
      ++i;
    } else {
      throw InputError("bad coordinate list '" + std::string(text) + "'");
    }
  }
  return of(n, coords);
}

int CoordSet::size() const { return std::popcount(mask_); }

std::vector<int> CoordSet::members() const {
  std::vector<int> out;
  for (int i = 0; i < n_; ++i) {
    if ((mask_ >> i) & 1U) out.push_back(i + 1);
  }
  return out;
}

std::string CoordSet::to_string() const {
  std::string out = "{";
  bool first = true;
  for (int c : members()) {
    if (!first) out += ',';
    out += std::to_string(c);
    first = false;
  }
  return out + "}";
}

CoordSet CoordSet::operator|(const CoordSet& other) const {
  require_same_dimension(n_, other.n_);
  return CoordSet(n_, mask_ | other.mask_);
}

CoordSet CoordSet::operator&(const CoordSet& other) const {
  require_same_dimension(n_, other.n_);
  return CoordSet(n_, mask_ & other.mask_);
}

PartialAssignment PartialAssignment::from_values(const CoordSet& support, std::span<const int> values) {
  const auto coords = support.members();
  if (coords.size() != values.size()) throw InputError("assignment length does not match its support");
  std::uint64_t bits = 0;
  for (std::size_t j = 0; j < coords.size(); ++j) {
    if (values[j] != 0 && values[j] != 1) throw InputError("assignment values must be 0 or 1");
    if (values[j] == 1) bits |= std::uint64_t{1} << (coords[j] - 1);
  }
  return {support, bits};
}

std::tuple<CubePoint, CubePoint, CubePoint> meet_join_xor(const CubePoint& x, const CubePoint& y) {
  require_same_dimension(x.dimension(), y.dimension());
  const int n = x.dimension();
  return {CubePoint(n, x.bits() & y.bits()), CubePoint(n, x.bits() | y.bits()), CubePoint(n, x.bits() ^ y.bits())};
}

CubePoint combine(const PartialAssignment& x, const PartialAssignment& y) {
  const int n = x.support.dimension();
  require_same_dimension(n, y.support.dimension());
  if ((x.support.mask() & y.support.mask()) != 0) throw InputError("partial assignments overlap");
  if ((x.support.mask() | y.support.mask()) != low_mask(n)) throw InputError("partial assignments do not cover [n]");
  if ((x.bits & ~x.support.mask()) != 0 || (y.bits & ~y.support.mask()) != 0) {
    throw InputError("partial assignment sets bits outside its support");
  }
  return CubePoint(n, x.bits | y.bits);
}

FunctionTable::FunctionTable(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  require_dimension(n, kMaxTableDimension);
  if (values_.size() != (std::size_t{1} << n)) {
    throw InputError("table for n=" + std::to_string(n) + " needs " + std::to_string(std::size_t{1} << n) +
                     " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t x = 0; x < values_.size(); ++x) {
    const double v = values_[x];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InputError("value " + std::to_string(v) + " at " + CubePoint(n, x).to_string() + " outside [0,1]");
    }
  }
}

double FunctionTable::operator()(const CubePoint& x) const {
  require_same_dimension(n_, x.dimension());
  return values_[x.bits()];
}

FourierSpectrum walsh_hadamard(const FunctionTable& f) {
  std::vector<double> coeffs(f.values().begin(), f.values().end());
  parallel::walsh_hadamard_inplace(coeffs);
  const double scale = std::ldexp(1.0, -f.dimension());
  for (double& c : coeffs) c *= scale;
  return {f.dimension(), std::move(coeffs)};
}

std::vector<double> inverse_walsh_hadamard(const FourierSpectrum& spectrum) {
  std::vector<double> values = spectrum.coefficients;
  parallel::walsh_hadamard_inplace(values);
  return values;
}

double lp_distance(const FunctionTable& f, const FunctionTable& g, double p) {
  require_same_dimension(f.dimension(), g.dimension());
  if (!(p >= 1.0)) throw InputError("lp distance needs p >= 1");
  const double mean = parallel::power_distance_sum(f.values(), g.values(), p) / static_cast<double>(f.size());
  return std::pow(mean, 1.0 / p);
}

double hamming_distance(const FunctionTable& f, const FunctionTable& g) {
  require_same_dimension(f.dimension(), g.dimension());
  std::size_t differ = 0;
  for (std::size_t x = 0; x < f.size(); ++x) differ += f.at(x) != g.at(x) ? 1 : 0;
  return static_cast<double>(differ) / static_cast<double>(f.size());
}

double round_to_grid(double value, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("grid step must lie in (0,1]");
  // Exact reciprocal steps (1/N) round on the integer grid j/N so that grid
  // values are reproduced bit-for-bit.
  const double reciprocal = 1.0 / gamma;
  const double steps = std::round(reciprocal);
  const bool integral = std::abs(reciprocal - steps) < 1e-9 * steps;
  const double scaled = integral ? value * steps : value / gamma;
  double lower = std::floor(scaled);
  // Half-way ties go up; the slack absorbs representation error such as 0.25/0.1.
  if (scaled - lower >= 0.5 - 1e-9) lower += 1.0;
  const double rounded = integral ? lower / steps : lower * gamma;
  return std::clamp(rounded, 0.0, 1.0);
}

FunctionTable discretize(const FunctionTable& f, double gamma) {
  std::vector<double> values(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) values[x] = round_to_grid(f.at(x), gamma);
  return FunctionTable(f.dimension(), std::move(values));
}

QueryOracle::QueryOracle(int n, Evaluator evaluator) : n_(n), evaluator_(std::move(evaluator)) {
  require_dimension(n, kMaxPointDimension);
}

double QueryOracle::query(const CubePoint& x) {
  require_same_dimension(n_, x.dimension());
  count_.fetch_add(1, std::memory_order_relaxed);
  return evaluator_(x);
}

QueryOracle make_counting_oracle(FunctionTable f) {
  const int n = f.dimension();
  return QueryOracle(n, [table = std::move(f)](const CubePoint& x) { return table.at(x.bits()); });
}

}  // namespace cubetest
