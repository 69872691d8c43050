#pragma once

#include <cstdint>
#include <vector>

#include "hrsearch/contfrac.hpp"
#include "hrsearch/fixedpoint.hpp"
#include "hrsearch/fpmodel.hpp"
#include "hrsearch/function.hpp"

namespace hrsearch {

// A hard-to-round argument. The distance is floor(dist * 2^distance_den_log2)
// as computed by the guarded evaluator; `domain` is the index of the domain
// within its binade.
struct HrCaseRecord {
  std::uint64_t arg_bits = 0;
  std::uint64_t distance_num = 0;
  int distance_den_log2 = 64;
  std::uint64_t domain = 0;
  // The evaluator could not decide this argument at the requested precision.
  bool undecided = false;

  friend auto operator<=>(const HrCaseRecord&, const HrCaseRecord&) = default;
};

// `representable`: f(x) is a precision-p float, which rounds trivially and is
// never reported even though its distance is zero.
enum class Decision { hr, not_hr, undecided, representable };

struct Evaluation {
  Decision decision = Decision::undecided;
  std::uint64_t distance_raw = 0;  // floor(dist * 2^64)
  bool exact = false;              // f(x) was representable, so dist is exact
  int guard_bits = 0;
};

// 2(p + p') + 16 bits.
int default_guard_bits(const FpFormat& fmt);

// Evaluate dist_p(f(x)) with f computed to `guard_bits` bits. The computed
// distance is within 2^(p - guard_bits) of the true one, and the decision is
// only made when that margin does not straddle eps.
Evaluation evaluate_distance(const Function& f, const PFloat& x, const FpFormat& fmt,
                             int guard_bits);

// Doubles the working precision until the decision is made. Throws
// UndecidedError past max_guard_bits.
Evaluation ziv_decide(const Function& f, const PFloat& x, const FpFormat& fmt, int guard_bits,
                      int max_guard_bits = 1 << 14);

inline constexpr std::uint64_t kExhaustiveLimit = std::uint64_t{1} << 22;

// Every argument of the domain, in increasing order. Undecided arguments
// are reported with undecided = true rather than silently dropped.
std::vector<HrCaseRecord> exhaustive_hr_search(const Function& f, const Domain& domain,
                                               const FpFormat& fmt, int guard_bits = 0);

// Undecided records re-evaluated with Ziv escalation; those that turn out
// not to be hard-to-round are dropped.
std::vector<HrCaseRecord> resolve_undecided(const std::vector<HrCaseRecord>& records,
                                            const Function& f, const FpFormat& fmt);

// The hardest-to-round records: all records are re-evaluated at doubling
// precision until the smallest distance is separated from every other one,
// or tied exactly. Throws UndecidedError past max_guard_bits.
std::vector<HrCaseRecord> ziv_refine(const std::vector<HrCaseRecord>& records,
                                     const Function& f, const FpFormat& fmt,
                                     int max_guard_bits = 1 << 12);

// The float whose binary64 encoding is `bits`, at precision p.
PFloat pfloat_from_bits(std::uint64_t bits, int p);

template <FracWord Word>
struct BruteMin {
  Frac<Word> min;
  std::uint64_t argmin = 0;
};

inline constexpr std::uint64_t kBruteMinLimit = std::uint64_t{1} << 26;

// min over x in [0, n) of (b - x a) mod 1, by enumeration.
template <FracWord Word>
BruteMin<Word> brute_min(Frac<Word> a, Frac<Word> b, std::uint64_t n) {
  if (n == 0 || n > kBruteMinLimit) throw ConfigError("brute_min: n out of range");
  BruteMin<Word> best{b, 0};
  Frac<Word> cur = b;
  for (std::uint64_t x = 1; x < n; ++x) {
    cur -= a;
    if (cur < best.min) best = {cur, x};
  }
  return best;
}

// Partial quotients k_1, k_2, ... of num / den by the Euclidean algorithm.
std::vector<Length> cf_quotients_ref(Length num, Length den);

}  // namespace hrsearch
