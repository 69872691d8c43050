#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hrsearch/lowerbound.hpp"

namespace hrsearch {

// max - mean of the per-lane iteration counts.
double mdm(std::span<const std::uint64_t> iterations);
// 1 - mean / max, in [0, 1]; zero when every count is zero.
double nmdm(std::span<const std::uint64_t> iterations);

// A conditional block of a loop body: when the lanes of a warp disagree on
// `bit` both paths are issued, otherwise only the taken one. A nested block
// only involves the lanes whose parent bit equals parent_value.
struct ConditionalScope {
  std::uint8_t bit = kBranchMain;
  std::uint8_t parent_bit = 0;  // 0: not nested
  bool parent_value = false;
  unsigned then_instructions = 0;
  unsigned else_instructions = 0;
};

// Instructions issued for one if/else: both paths when the warp diverged,
// otherwise only the path taken.
constexpr unsigned branch_serialization_estimate(unsigned n_then, unsigned n_else, bool diverged,
                                                 bool taken = true) {
  return diverged ? n_then + n_else : (taken ? n_then : n_else);
}

// Instruction counts of the conditional parts of each loop body.
std::vector<ConditionalScope> conditional_scopes(LowerBoundAlgorithm algo);

// Instructions issued inside conditional blocks by a warp running the lanes
// in lockstep; a lane drops out after its last iteration.
std::uint64_t branch_serialized_instructions(std::span<const BranchTrace> lanes,
                                             std::span<const ConditionalScope> scopes);

struct WarpStats {
  std::uint64_t warp_id = 0;
  std::uint64_t lanes = 0;
  std::uint64_t min_iter = 0;
  std::uint64_t max_iter = 0;
  double mean_iter = 0;
  double mdm = 0;
  double nmdm = 0;
  std::uint64_t serialized_instructions = 0;
};

// Consecutive problems are packed into warps of warp_size lanes.
template <FracWord Word>
std::vector<WarpStats> simulate_warps(std::span<const SearchProblem<Word>> problems,
                                      LowerBoundAlgorithm algo, DivisionMode mode,
                                      unsigned warp_size = 32);

struct DivergenceSummary {
  std::string label;
  std::uint64_t warps = 0;
  std::uint64_t lanes = 0;
  double mean_iter = 0;
  std::uint64_t min_iter = 0;
  std::uint64_t max_iter = 0;
  double mean_mdm = 0;
  double mean_nmdm = 0;
  // Fraction of warps whose per-lane iteration counts span at most 2.
  double tight_warps = 0;
  std::uint64_t serialized_instructions = 0;
};

template <FracWord Word>
DivergenceSummary summarize_divergence(std::string label,
                                       std::span<const SearchProblem<Word>> problems,
                                       LowerBoundAlgorithm algo, DivisionMode mode,
                                       unsigned warp_size = 32);

}  // namespace hrsearch
