#include "hrsearch/divergence.hpp"

#include <algorithm>
#include <numeric>

#include "hrsearch/errors.hpp"

namespace hrsearch {

namespace {

double mean_of(std::span<const std::uint64_t> xs) {
  if (xs.empty()) return 0;
  long double sum = std::accumulate(xs.begin(), xs.end(), 0.0L);
  return static_cast<double>(sum / static_cast<long double>(xs.size()));
}

}  // namespace

double mdm(std::span<const std::uint64_t> iterations) {
  if (iterations.empty()) return 0;
  return static_cast<double>(*std::max_element(iterations.begin(), iterations.end())) -
         mean_of(iterations);
}

double nmdm(std::span<const std::uint64_t> iterations) {
  if (iterations.empty()) return 0;
  auto mx = *std::max_element(iterations.begin(), iterations.end());
  if (mx == 0) return 0;
  return 1.0 - mean_of(iterations) / static_cast<double>(mx);
}

std::vector<ConditionalScope> conditional_scopes(LowerBoundAlgorithm algo) {
  switch (algo) {
    case LowerBoundAlgorithm::lefevre:
      return {{kBranchMain, 0, false, 6, 8}};
    case LowerBoundAlgorithm::lefevre_swap:
      return {{kBranchMain, 0, false, 2, 0}, {kBranchSecond, 0, false, 3, 0}};
    case LowerBoundAlgorithm::regular:
      return {{kBranchMain, 0, false, 4, 5}, {kBranchSecond, kBranchMain, false, 1, 0}};
    case LowerBoundAlgorithm::regular_unrolled:
      return {{kBranchSecond, 0, false, 1, 0}};
  }
  return {};
}

std::uint64_t branch_serialized_instructions(std::span<const BranchTrace> lanes,
                                             std::span<const ConditionalScope> scopes) {
  std::size_t longest = 0;
  for (const auto& l : lanes) longest = std::max(longest, l.size());
  std::uint64_t total = 0;
  for (std::size_t it = 0; it < longest; ++it) {
    for (const auto& sc : scopes) {
      bool any_then = false, any_else = false;
      for (const auto& l : lanes) {
        if (it >= l.size()) continue;
        std::uint8_t b = l[it];
        if (sc.parent_bit != 0 && ((b & sc.parent_bit) != 0) != sc.parent_value) continue;
        ((b & sc.bit) != 0 ? any_then : any_else) = true;
      }
      if (any_then) total += sc.then_instructions;
      if (any_else) total += sc.else_instructions;
    }
  }
  return total;
}

template <FracWord Word>
std::vector<WarpStats> simulate_warps(std::span<const SearchProblem<Word>> problems,
                                      LowerBoundAlgorithm algo, DivisionMode mode,
                                      unsigned warp_size) {
  if (warp_size == 0) throw ConfigError("warp size must be positive");
  const auto scopes = conditional_scopes(algo);
  std::vector<WarpStats> out;
  for (std::size_t start = 0; start < problems.size(); start += warp_size) {
    const std::size_t end = std::min(problems.size(), start + warp_size);
    std::vector<std::uint64_t> iters;
    std::vector<BranchTrace> traces(end - start);
    for (std::size_t i = start; i < end; ++i) {
      auto o = run_lower_bound(algo, problems[i], mode, &traces[i - start]);
      iters.push_back(o.iterations);
    }
    WarpStats w;
    w.warp_id = start / warp_size;
    w.lanes = iters.size();
    w.min_iter = *std::min_element(iters.begin(), iters.end());
    w.max_iter = *std::max_element(iters.begin(), iters.end());
    w.mean_iter = mean_of(iters);
    w.mdm = mdm(iters);
    w.nmdm = nmdm(iters);
    w.serialized_instructions = branch_serialized_instructions(traces, scopes);
    out.push_back(w);
  }
  return out;
}

template <FracWord Word>
DivergenceSummary summarize_divergence(std::string label,
                                       std::span<const SearchProblem<Word>> problems,
                                       LowerBoundAlgorithm algo, DivisionMode mode,
                                       unsigned warp_size) {
  DivergenceSummary s;
  s.label = std::move(label);
  auto warps = simulate_warps(problems, algo, mode, warp_size);
  s.warps = warps.size();
  s.lanes = problems.size();
  if (warps.empty()) return s;
  long double iter_sum = 0;
  std::uint64_t tight = 0;
  s.min_iter = ~std::uint64_t{0};
  for (const auto& w : warps) {
    s.min_iter = std::min(s.min_iter, w.min_iter);
    s.max_iter = std::max(s.max_iter, w.max_iter);
    if (w.max_iter - w.min_iter <= 2) ++tight;
    iter_sum += static_cast<long double>(w.mean_iter) * w.lanes;
    s.mean_mdm += w.mdm;
    s.mean_nmdm += w.nmdm;
    s.serialized_instructions += w.serialized_instructions;
  }
  s.mean_mdm /= static_cast<double>(warps.size());
  s.mean_nmdm /= static_cast<double>(warps.size());
  s.mean_iter = static_cast<double>(iter_sum / static_cast<long double>(problems.size()));
  s.tight_warps = static_cast<double>(tight) / static_cast<double>(warps.size());
  return s;
}

#define HRSEARCH_INSTANTIATE(W)                                                               \
  template std::vector<WarpStats> simulate_warps(std::span<const SearchProblem<W>>,            \
                                                 LowerBoundAlgorithm, DivisionMode, unsigned); \
  template DivergenceSummary summarize_divergence(std::string,                                \
                                                  std::span<const SearchProblem<W>>,           \
                                                  LowerBoundAlgorithm, DivisionMode, unsigned);

HRSEARCH_INSTANTIATE(std::uint32_t)
HRSEARCH_INSTANTIATE(std::uint64_t)

#undef HRSEARCH_INSTANTIATE

}  // namespace hrsearch
