#include <gtest/gtest.h>

#include <algorithm>

#include "hrsearch/divergence.hpp"
#include "hrsearch/pipeline.hpp"
#include "support.hpp"

using namespace hrsearch;
using hrsearch::test::make_rng;

namespace {

TEST(Divergence, MeanDeviationExamples) {
  std::vector<std::uint64_t> v{10, 20, 30, 40};
  EXPECT_DOUBLE_EQ(mdm(v), 15.0);
  EXPECT_DOUBLE_EQ(nmdm(v), 0.375);
  std::vector<std::uint64_t> same(32, 7);
  EXPECT_DOUBLE_EQ(mdm(same), 0.0);
  EXPECT_DOUBLE_EQ(nmdm(same), 0.0);
  std::vector<std::uint64_t> zeros(8, 0);
  EXPECT_DOUBLE_EQ(nmdm(zeros), 0.0);
  std::vector<std::uint64_t> one{9};
  EXPECT_DOUBLE_EQ(nmdm(one), 0.0);
}

TEST(Divergence, NmdmMatchesRationalComputation) {
  auto rng = make_rng(70);
  for (int n = 0; n < 2000; ++n) {
    std::vector<std::uint64_t> v(1 + rng() % 64);
    for (auto& x : v) x = rng() % 1000;
    std::uint64_t mx = *std::max_element(v.begin(), v.end());
    std::uint64_t sum = 0;
    for (auto x : v) sum += x;
    mpq_class mean(static_cast<unsigned long>(sum), static_cast<unsigned long>(v.size()));
    mean.canonicalize();
    double expect_mdm = mpq_class(mpq_class(static_cast<unsigned long>(mx)) - mean).get_d();
    EXPECT_NEAR(mdm(v), expect_mdm, 1e-9);
    if (mx == 0) {
      EXPECT_EQ(nmdm(v), 0.0);
    } else {
      mpq_class r = 1 - mean / mpq_class(static_cast<unsigned long>(mx));
      EXPECT_NEAR(nmdm(v), r.get_d(), 1e-12);
      EXPECT_GE(nmdm(v), 0.0);
      EXPECT_LE(nmdm(v), 1.0);
    }
  }
}

TEST(Divergence, BranchSerialization) {
  static_assert(branch_serialization_estimate(5, 7, true) == 12);
  static_assert(branch_serialization_estimate(5, 7, false) == 5);
  static_assert(branch_serialization_estimate(5, 7, false, false) == 7);
}

// One warp, lanes given as traces, for a single top-level scope of 5/7.
TEST(Divergence, SerializedInstructionsPerIteration) {
  std::vector<ConditionalScope> scopes{{kBranchMain, 0, false, 5, 7}};
  // Lanes agree on every iteration: only the taken path.
  std::vector<BranchTrace> agree{{1, 0, 1}, {1, 0, 1}};
  EXPECT_EQ(branch_serialized_instructions(agree, scopes), 5u + 7u + 5u);
  // Disagreement on the first iteration costs both paths there.
  std::vector<BranchTrace> split{{1, 0}, {0, 0}};
  EXPECT_EQ(branch_serialized_instructions(split, scopes), 12u + 7u);
  // A lane that finished no longer votes.
  std::vector<BranchTrace> ragged{{1}, {0, 1}};
  EXPECT_EQ(branch_serialized_instructions(ragged, scopes), 12u + 5u);
}

std::vector<SearchProblem<std::uint64_t>> random_problems(std::uint64_t salt, std::size_t n) {
  auto rng = make_rng(salt);
  std::vector<SearchProblem<std::uint64_t>> out(n);
  for (auto& pr : out) {
    pr.a = UFrac::from_raw(rng());
    pr.b = UFrac::from_raw(rng());
    pr.eps = UFrac::from_raw(rng() >> 30);
    pr.count = std::uint64_t{1} << 12;
  }
  return out;
}

TEST(Divergence, WarpsReproduceStandaloneRuns) {
  auto problems = random_problems(71, 200);
  const LowerBoundAlgorithm algos[] = {LowerBoundAlgorithm::lefevre, LowerBoundAlgorithm::lefevre_swap,
                                       LowerBoundAlgorithm::regular,
                                       LowerBoundAlgorithm::regular_unrolled};
  for (auto algo : algos) {
    auto warps = simulate_warps<std::uint64_t>(problems, algo, DivisionMode::hybrid, 32);
    ASSERT_EQ(warps.size(), 7u);
    EXPECT_EQ(warps.back().lanes, 200u - 6 * 32);
    for (std::size_t w = 0; w < warps.size(); ++w) {
      std::vector<std::uint64_t> iters;
      std::vector<BranchTrace> traces;
      for (std::size_t i = w * 32; i < std::min<std::size_t>(problems.size(), (w + 1) * 32); ++i) {
        traces.emplace_back();
        auto o = run_lower_bound(algo, problems[i], DivisionMode::hybrid, &traces.back());
        iters.push_back(o.iterations);
        EXPECT_EQ(traces.back().size(), o.iterations);
      }
      EXPECT_EQ(warps[w].serialized_instructions,
                branch_serialized_instructions(traces, conditional_scopes(algo)));
      EXPECT_EQ(warps[w].warp_id, w);
      EXPECT_EQ(warps[w].min_iter, *std::min_element(iters.begin(), iters.end()));
      EXPECT_EQ(warps[w].max_iter, *std::max_element(iters.begin(), iters.end()));
      EXPECT_DOUBLE_EQ(warps[w].nmdm, nmdm(iters));
      EXPECT_DOUBLE_EQ(warps[w].mdm, mdm(iters));
    }
  }
}

TEST(Divergence, SingleLaneWarpHasNoDivergence) {
  auto problems = random_problems(72, 1);
  for (auto algo : {LowerBoundAlgorithm::lefevre, LowerBoundAlgorithm::regular}) {
    auto warps = simulate_warps<std::uint64_t>(problems, algo, DivisionMode::hybrid, 32);
    ASSERT_EQ(warps.size(), 1u);
    EXPECT_EQ(warps[0].nmdm, 0.0);
    EXPECT_EQ(warps[0].mdm, 0.0);
    EXPECT_EQ(warps[0].lanes, 1u);
  }
  EXPECT_THROW(simulate_warps<std::uint64_t>(problems, LowerBoundAlgorithm::regular,
                                             DivisionMode::hybrid, 0),
               ConfigError);
}

TEST(Divergence, RegularIsMoreUniformThanLefevre) {
  SearchPlan plan;
  plan.function = make_function("exp");
  plan.format = {24, 10};
  plan.domain_count = 2048;
  auto problems = phase1_problems<std::uint64_t>(plan);
  ASSERT_GE(problems.size(), 1024u);
  auto reg = summarize_divergence<std::uint64_t>("regular", problems, LowerBoundAlgorithm::regular,
                                                 DivisionMode::subtractive);
  auto lef = summarize_divergence<std::uint64_t>("lefevre", problems, LowerBoundAlgorithm::lefevre,
                                                 DivisionMode::subtractive);
  auto swp = summarize_divergence<std::uint64_t>(
      "swap", problems, LowerBoundAlgorithm::lefevre_swap, DivisionMode::subtractive);
  EXPECT_LT(reg.mean_nmdm, lef.mean_nmdm);
  EXPECT_LT(reg.serialized_instructions, lef.serialized_instructions);
  // Merging the branches only shortens the serialized blocks.
  EXPECT_LT(swp.serialized_instructions, lef.serialized_instructions);
  EXPECT_EQ(reg.lanes, problems.size());
  EXPECT_EQ(reg.warps, (problems.size() + 31) / 32);
  EXPECT_GE(reg.tight_warps, 0.0);
  EXPECT_LE(reg.tight_warps, 1.0);
}

}  // namespace
