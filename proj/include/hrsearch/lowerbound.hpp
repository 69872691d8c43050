#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "hrsearch/fixedpoint.hpp"

namespace hrsearch {

// Decide whether min over x in [0, count) of (b - x a) mod 1 is >= eps.
template <FracWord Word>
struct SearchProblem {
  Frac<Word> a;
  Frac<Word> b;
  Frac<Word> eps;
  std::uint64_t count = 1;

  void validate() const;
};

enum class Verdict { success, failure };

template <FracWord Word>
struct SearchOutcome {
  Verdict verdict = Verdict::failure;
  // On success a lower bound of the minimum over x < count. On failure the
  // value below eps that stopped the search; the final quotient step may
  // place it past count, so failures are conservative.
  Frac<Word> d;
  std::uint64_t iterations = 0;
  // Euclidean division steps performed.
  std::uint64_t quotients = 0;
  // Number of points the final gap configuration accounts for.
  std::uint64_t points = 0;

  bool success() const { return verdict == Verdict::success; }
};

// One entry per loop iteration. Bit 0 records the main conditional (taken
// then-branch, swapped state, or p < q), bit 1 the secondary one (a swap at
// the end of the body, or the d >= p correction).
using BranchTrace = std::vector<std::uint8_t>;
inline constexpr std::uint8_t kBranchMain = 1;
inline constexpr std::uint8_t kBranchSecond = 2;

enum class LowerBoundAlgorithm { lefevre, lefevre_swap, regular, regular_unrolled };

std::string_view to_string(LowerBoundAlgorithm a);
std::optional<LowerBoundAlgorithm> parse_lower_bound_algorithm(std::string_view s);

// Subtractive mode is the plain algorithm. The other modes additionally
// collapse a run of consecutive single subtractions into one division.
template <FracWord Word>
SearchOutcome<Word> lefevre_lb(const SearchProblem<Word>& pr, DivisionMode mode,
                               BranchTrace* trace = nullptr);

// Same iterations as lefevre_lb with the two branches merged: the registers
// are swapped instead of branching, leaving two short conditional blocks.
template <FracWord Word>
SearchOutcome<Word> lefevre_swap_lb(const SearchProblem<Word>& pr, DivisionMode mode,
                                    BranchTrace* trace = nullptr);

// One continued-fraction quotient per iteration.
template <FracWord Word>
SearchOutcome<Word> regular_lb(const SearchProblem<Word>& pr, DivisionMode mode,
                               BranchTrace* trace = nullptr);

// regular_lb with the strictly alternating branches unrolled in pairs.
template <FracWord Word>
SearchOutcome<Word> regular_unrolled_lb(const SearchProblem<Word>& pr, DivisionMode mode,
                                        BranchTrace* trace = nullptr);

template <FracWord Word>
SearchOutcome<Word> run_lower_bound(LowerBoundAlgorithm algo, const SearchProblem<Word>& pr,
                                    DivisionMode mode, BranchTrace* trace = nullptr) {
  switch (algo) {
    case LowerBoundAlgorithm::lefevre: return lefevre_lb(pr, mode, trace);
    case LowerBoundAlgorithm::lefevre_swap: return lefevre_swap_lb(pr, mode, trace);
    case LowerBoundAlgorithm::regular: return regular_lb(pr, mode, trace);
    case LowerBoundAlgorithm::regular_unrolled: return regular_unrolled_lb(pr, mode, trace);
  }
  return regular_lb(pr, mode, trace);
}

}  // namespace hrsearch
