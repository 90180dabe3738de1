#pragma once

// Points, coordinate sets and bounded functions on the Boolean hypercube
// {0,1}^n, together with exact Fourier analysis and counting query oracles.
//
// Conventions used throughout the library:
//  * coordinates are 1-indexed at every interface (1..n);
//  * coordinate i is stored in bit (i-1) of a 64-bit mask, so table index
//    `mask` holds the value at the point whose set coordinates are `mask`;
//  * Fourier characters are chi_T(x) = (-1)^{sum_{i in T} x_i}.

#include <atomic>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace cubetest {

inline constexpr int kMaxPointDimension = 64;
inline constexpr int kMaxTableDimension = 24;

constexpr std::uint64_t low_mask(int n) {
  return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
}

class CubePoint {
 public:
  CubePoint() = default;
  CubePoint(int n, std::uint64_t bits);

  // "101" -> x_1 = 1, x_2 = 0, x_3 = 1.
  static CubePoint parse(std::string_view bitstring);

  int dimension() const { return n_; }
  std::uint64_t bits() const { return bits_; }
  bool bit(int coord) const { return (bits_ >> (coord - 1)) & 1U; }
  std::string to_string() const;

  friend bool operator==(const CubePoint&, const CubePoint&) = default;

 private:
  int n_ = 0;
  std::uint64_t bits_ = 0;
};

class CoordSet {
 public:
  CoordSet() = default;
  CoordSet(int n, std::uint64_t mask);

  static CoordSet of(int n, std::initializer_list<int> coords);
  static CoordSet of(int n, std::span<const int> coords);
  static CoordSet all(int n) { return CoordSet(n, low_mask(n)); }
  static CoordSet none(int n) { return CoordSet(n, 0); }
  // "1,3" or "{1,3}" or "{}".
  static CoordSet parse(int n, std::string_view text);

  int dimension() const { return n_; }
  std::uint64_t mask() const { return mask_; }
  int size() const;
  bool empty() const { return mask_ == 0; }
  bool contains(int coord) const { return (mask_ >> (coord - 1)) & 1U; }
  std::vector<int> members() const;
  std::string to_string() const;

  CoordSet complement() const { return CoordSet(n_, low_mask(n_) & ~mask_); }
  CoordSet operator|(const CoordSet& other) const;
  CoordSet operator&(const CoordSet& other) const;

  friend bool operator==(const CoordSet&, const CoordSet&) = default;

 private:
  int n_ = 0;
  std::uint64_t mask_ = 0;
};

// An assignment to the coordinates of `support` only. Bits outside the
// support are always zero.
struct PartialAssignment {
  CoordSet support;
  std::uint64_t bits = 0;

  // `values[j]` is the bit of the j-th smallest coordinate in `support`.
  static PartialAssignment from_values(const CoordSet& support, std::span<const int> values);
};

// Returns (x AND y, x OR y, x XOR y).
std::tuple<CubePoint, CubePoint, CubePoint> meet_join_xor(const CubePoint& x, const CubePoint& y);

// Splices z with z_i = x_i on x.support and z_i = y_i on y.support. The two
// supports must partition [n].
CubePoint combine(const PartialAssignment& x, const PartialAssignment& y);

// Explicit table of a function {0,1}^n -> [0,1]. Immutable after construction.
class FunctionTable {
 public:
  FunctionTable() = default;
  // Throws InputError unless values.size() == 2^n and every value lies in [0,1].
  FunctionTable(int n, std::vector<double> values);

  template <typename F>
  static FunctionTable from_masks(int n, F&& value_at_mask) {
    std::vector<double> values(std::size_t{1} << n);
    for (std::size_t x = 0; x < values.size(); ++x) values[x] = value_at_mask(static_cast<std::uint64_t>(x));
    return FunctionTable(n, std::move(values));
  }

  int dimension() const { return n_; }
  std::size_t size() const { return values_.size(); }
  double at(std::uint64_t mask) const { return values_[mask]; }
  double operator()(const CubePoint& x) const;
  std::span<const double> values() const { return values_; }

 private:
  int n_ = 0;
  std::vector<double> values_;
};

// Coefficients \hat f(T), indexed by the mask of T.
struct FourierSpectrum {
  int dimension = 0;
  std::vector<double> coefficients;

  double coefficient(const CoordSet& t) const { return coefficients[t.mask()]; }
};

FourierSpectrum walsh_hadamard(const FunctionTable& f);
// Evaluates sum_T \hat f(T) chi_T(x) at every point.
std::vector<double> inverse_walsh_hadamard(const FourierSpectrum& spectrum);

// (E_x |f - g|^p)^{1/p}, exact over the full table. Requires p >= 1.
double lp_distance(const FunctionTable& f, const FunctionTable& g, double p);
// Pr_x[f(x) != g(x)].
double hamming_distance(const FunctionTable& f, const FunctionTable& g);

// Rounds every value to the nearest multiple of gamma (ties upward) and clamps
// the result to [0,1].
FunctionTable discretize(const FunctionTable& f, double gamma);
double round_to_grid(double value, double gamma);

// Query access to a black-box function. Every evaluation bumps the counter by
// exactly one; the counter is safe under concurrent queries.
class QueryOracle {
 public:
  using Evaluator = std::function<double(const CubePoint&)>;

  QueryOracle(int n, Evaluator evaluator);
  QueryOracle(const QueryOracle&) = delete;
  QueryOracle& operator=(const QueryOracle&) = delete;

  double query(const CubePoint& x);
  double query(std::uint64_t mask) { return query(CubePoint(n_, mask)); }

  int dimension() const { return n_; }
  std::uint64_t query_count() const { return count_.load(std::memory_order_relaxed); }

 private:
  int n_;
  Evaluator evaluator_;
  std::atomic<std::uint64_t> count_{0};
};

QueryOracle make_counting_oracle(FunctionTable f);

}  // namespace cubetest
