#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>

#include "hrsearch/errors.hpp"
#include "hrsearch/fixedpoint.hpp"

namespace hrsearch {

// Exact dyadic number num * 2^exp2.
struct ScaledReal {
  mpz_class num;
  long exp2 = 0;

  static ScaledReal from_double(double x);
  static ScaledReal pow2(long k) { return {mpz_class(1), k}; }
  double to_double() const;
  std::string to_string() const;
};

int compare(const ScaledReal& x, const ScaledReal& y);
inline bool operator<(const ScaledReal& x, const ScaledReal& y) { return compare(x, y) < 0; }
inline bool operator==(const ScaledReal& x, const ScaledReal& y) { return compare(x, y) == 0; }
ScaledReal operator+(const ScaledReal& x, const ScaledReal& y);
ScaledReal operator-(const ScaledReal& x, const ScaledReal& y);

// Precision p of the floating-point format and the hard-to-round threshold
// eps = 2^-eps_bits, measured in units of the last place.
struct FpFormat {
  int precision = 0;
  int eps_bits = 0;

  void validate() const;
  ScaledReal eps() const { return ScaledReal::pow2(-eps_bits); }
  // Rounding to nearest at precision p is hard exactly where directed
  // rounding at precision p + 1 is hard with twice the threshold.
  FpFormat to_nearest_equivalent() const { return {precision + 1, eps_bits - 1}; }
};

// x = m * 2^e with m in [1/2, 1). Requires x > 0.
struct MantissaExponent {
  ScaledReal mantissa;
  long exponent = 0;
};
MantissaExponent mantissa_exponent(const ScaledReal& x);

// Distance from 2^p * m(x) to the nearest integer, in [0, 1/2].
ScaledReal dist_p_exact(const ScaledReal& x, int p);
// Same, floored to 64 fractional bits.
UFrac dist_p(const ScaledReal& x, int p);

// dist_p(x) < eps, evaluated as the shifted one-sided test
//   0 < (frac(2^p m(x)) + eps) mod 1 < 2 eps.
bool is_hr_case(const ScaledReal& x, const FpFormat& fmt);
// Reference form of the same predicate.
bool is_hr_case_two_sided(const ScaledReal& x, const FpFormat& fmt);

// A precision-p float significand * 2^(exponent - p), significand in
// [2^(p-1), 2^p). Its mantissa exponent in the sense above is `exponent`.
struct PFloat {
  std::uint64_t significand = 0;
  int exponent = 0;

  ScaledReal value(int p) const { return {mpz_class(significand), long{exponent} - p}; }
  double to_double(int p) const;
  // IEEE binary64 encoding; requires p <= 53.
  std::uint64_t to_bits(int p) const;
  friend auto operator<=>(const PFloat&, const PFloat&) = default;
};

// Consecutive floats first, first + 1, ..., first + count - 1 (significands)
// sharing one exponent. `index` numbers the domain within its binade.
struct Domain {
  std::uint64_t first = 0;
  int exponent = 0;
  std::uint64_t count = 0;
  std::uint64_t index = 0;

  PFloat at(std::uint64_t i) const { return {first + i, exponent}; }
};

std::uint64_t arg_index(const PFloat& x, const Domain& d);
PFloat arg_unindex(std::uint64_t i, const Domain& d);

// The binade [2^E, 2^(E+1)) cut into domains of N consecutive floats.
// Domains are produced on demand so the count may be astronomically large.
class BinadeSplit {
 public:
  BinadeSplit(int binade, const FpFormat& fmt, std::uint64_t domain_size);

  std::uint64_t count() const { return count_; }
  std::uint64_t domain_size() const { return size_; }
  Domain at(std::uint64_t i) const;
  // The whole binade as one range.
  Domain whole() const { return {first_, exponent_, count_ * size_, 0}; }

 private:
  std::uint64_t first_;
  int exponent_;
  std::uint64_t size_;
  std::uint64_t count_;
};

inline BinadeSplit split_binade(int binade, const FpFormat& fmt, std::uint64_t domain_size) {
  return BinadeSplit(binade, fmt, domain_size);
}

// Threshold bookkeeping for the Boolean test:
//   eps'  = eps + eps_approx
//   eps'' = eps' + eps_trunc + eps_shift
// eps_trunc covers dropping terms above degree one; eps_shift covers
// rounding the test inputs to W bits.
template <FracWord Word>
struct ErrorBudget {
  Frac<Word> eps, eps_approx, eps_trunc, eps_shift;

  // Empty when the sum reaches 1/4, where the test 2 eps'' < 1/2 is void.
  std::optional<Frac<Word>> eps_prime() const { return sum({eps, eps_approx}); }
  std::optional<Frac<Word>> eps_second() const {
    return sum({eps, eps_approx, eps_trunc, eps_shift});
  }
  bool valid() const { return eps_second().has_value(); }

 private:
  static std::optional<Frac<Word>> sum(std::initializer_list<Frac<Word>> xs) {
    typename Frac<Word>::wide_type total = 0;
    for (auto x : xs) total += x.raw();
    if (total >= (typename Frac<Word>::wide_type{1} << (Frac<Word>::kBits - 2))) {
      return std::nullopt;
    }
    return Frac<Word>::from_raw(static_cast<Word>(total));
  }
};

}  // namespace hrsearch
