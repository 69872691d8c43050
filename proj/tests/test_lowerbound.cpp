#include <gtest/gtest.h>

#include "hrsearch/lowerbound.hpp"
#include "hrsearch/oracle.hpp"
#include "support.hpp"

using namespace hrsearch;
using hrsearch::test::make_rng;

namespace {

constexpr LowerBoundAlgorithm kAlgos[] = {
    LowerBoundAlgorithm::lefevre, LowerBoundAlgorithm::lefevre_swap, LowerBoundAlgorithm::regular,
    LowerBoundAlgorithm::regular_unrolled};
constexpr DivisionMode kModes[] = {DivisionMode::subtractive, DivisionMode::hardware,
                                   DivisionMode::hybrid};

// Minimum by plain enumeration, written independently of brute_min.
template <FracWord Word>
Frac<Word> enumerate_min(Frac<Word> a, Frac<Word> b, std::uint64_t n) {
  Frac<Word> best = b;
  for (std::uint64_t x = 1; x < n; ++x) {
    Frac<Word> v = Frac<Word>::from_raw(static_cast<Word>(b.raw() - static_cast<Word>(x * a.raw())));
    if (v < best) best = v;
  }
  return best;
}

template <FracWord Word>
SearchProblem<Word> random_problem(std::mt19937_64& rng, std::uint64_t max_n) {
  SearchProblem<Word> pr;
  pr.a = Frac<Word>::from_raw(static_cast<Word>(rng()));
  pr.b = Frac<Word>::from_raw(static_cast<Word>(rng()));
  // eps spread over many scales so both verdicts occur.
  int shift = 1 + static_cast<int>(rng() % (Frac<Word>::kBits / 2));
  pr.eps = Frac<Word>::from_raw(static_cast<Word>(rng() >> (64 - Frac<Word>::kBits + shift)));
  pr.count = test::uniform(rng, 1, max_n);
  return pr;
}

SearchProblem<std::uint64_t> example_45() {
  return {UFrac::from_ratio(14, 45), UFrac::from_ratio(10, 45), UFrac::from_ratio(1, 45), 4};
}

TEST(LowerBound, WorkedExampleLefevreFamily) {
  auto pr = example_45();
  ASSERT_EQ(brute_min(pr.a, pr.b, 4).min, pr.b);
  for (auto algo : {LowerBoundAlgorithm::lefevre, LowerBoundAlgorithm::lefevre_swap}) {
    for (auto m : kModes) {
      auto o = run_lower_bound(algo, pr, m);
      EXPECT_TRUE(o.success());
      EXPECT_EQ(o.d, pr.b);
      EXPECT_GE(o.points, 4u);
    }
  }
}

TEST(LowerBound, WorkedExampleRegularFamily) {
  auto pr = example_45();
  for (auto algo : {LowerBoundAlgorithm::regular, LowerBoundAlgorithm::regular_unrolled}) {
    for (auto m : kModes) {
      auto o = run_lower_bound(algo, pr, m);
      EXPECT_TRUE(o.success());
      EXPECT_LE(o.d, pr.b);
      EXPECT_GE(o.points, 4u);
      EXPECT_GE(o.d, enumerate_min(pr.a, pr.b, o.points));
    }
  }
}

TEST(LowerBound, SmallBIsImmediateFailure) {
  auto pr = example_45();
  pr.b = UFrac::from_ratio(1, 90);
  for (auto algo : kAlgos) {
    auto o = run_lower_bound(algo, pr, DivisionMode::hybrid);
    EXPECT_FALSE(o.success());
    EXPECT_EQ(o.d, pr.b);
    EXPECT_EQ(o.iterations, 0u);
  }
}

TEST(LowerBound, SinglePoint) {
  auto rng = make_rng(40);
  for (int i = 0; i < 1000; ++i) {
    auto pr = random_problem<std::uint64_t>(rng, 1);
    for (auto algo : kAlgos) {
      auto o = run_lower_bound(algo, pr, DivisionMode::hybrid);
      EXPECT_EQ(o.success(), pr.b >= pr.eps);
      EXPECT_EQ(o.d, pr.b);
    }
  }
}

TEST(LowerBound, ZeroSlopeKeepsB) {
  SearchProblem<std::uint64_t> pr{UFrac{}, UFrac::pow2(2), UFrac::pow2(4), 1000};
  for (auto algo : kAlgos) {
    auto o = run_lower_bound(algo, pr, DivisionMode::hardware);
    EXPECT_TRUE(o.success());
    EXPECT_EQ(o.d, pr.b);
  }
}

TEST(LowerBound, InvalidProblemsRejected) {
  SearchProblem<std::uint64_t> pr = example_45();
  pr.count = 0;
  EXPECT_THROW(regular_lb(pr, DivisionMode::hybrid), ConfigError);
  pr.count = 4;
  pr.eps = UFrac::pow2(1);
  EXPECT_THROW(lefevre_lb(pr, DivisionMode::hybrid), ConfigError);
}

TEST(LowerBound, ExhaustiveSoundnessSmallDenominator) {
  // All (a, b) on the 2^-8 grid, embedded in 32-bit words.
  const std::uint32_t unit = 1u << 24;
  for (std::uint64_t n : {3u, 16u, 100u}) {
    for (std::uint32_t ai = 0; ai < 256; ++ai) {
      for (std::uint32_t bi = 0; bi < 256; ++bi) {
        SearchProblem<std::uint32_t> pr{UFrac32::from_raw(ai * unit), UFrac32::from_raw(bi * unit),
                                        UFrac32::from_raw(3 * unit), n};
        auto truth = enumerate_min(pr.a, pr.b, n);
        for (auto algo : kAlgos) {
          auto o = run_lower_bound(algo, pr, DivisionMode::hybrid);
          if (o.success()) {
            ASSERT_GE(o.d, pr.eps);
            ASSERT_LE(o.d, truth) << ai << " " << bi << " " << n;
          } else {
            ASSERT_LT(o.d, pr.eps);
          }
        }
      }
    }
  }
}

TEST(LowerBound, RandomSoundness) {
  auto rng = make_rng(41);
  for (int i = 0; i < 30000; ++i) {
    auto pr = random_problem<std::uint64_t>(rng, 1 << 12);
    auto truth = enumerate_min(pr.a, pr.b, pr.count);
    for (auto algo : kAlgos) {
      for (auto m : kModes) {
        auto o = run_lower_bound(algo, pr, m);
        if (o.success()) {
          ASSERT_GE(o.d, pr.eps);
          ASSERT_LE(o.d, truth);
          ASSERT_GE(o.points, pr.count);
        } else {
          ASSERT_LT(o.d, pr.eps);
          // The failing value is a genuine point of the sequence. The
          // regular family may look one configuration step ahead, which
          // adds at most n more points.
          if (o.points <= (1u << 16)) {
            ASSERT_LE(enumerate_min(pr.a, pr.b, 2 * o.points), o.d)
                << to_string(algo) << " " << to_string(m) << " n=" << o.points;
          }
        }
      }
    }
  }
}

TEST(LowerBound, SwapMatchesLefevre) {
  auto rng = make_rng(42);
  for (int i = 0; i < 100000; ++i) {
    auto pr = random_problem<std::uint64_t>(rng, std::uint64_t{1} << (1 + rng() % 40));
    for (auto m : kModes) {
      auto x = lefevre_lb(pr, m);
      auto y = lefevre_swap_lb(pr, m);
      ASSERT_EQ(x.verdict, y.verdict);
      ASSERT_EQ(x.d, y.d);
      ASSERT_EQ(x.iterations, y.iterations);
    }
  }
}

TEST(LowerBound, UnrolledMatchesRegular) {
  auto rng = make_rng(43);
  for (int i = 0; i < 100000; ++i) {
    auto pr = random_problem<std::uint64_t>(rng, std::uint64_t{1} << (1 + rng() % 40));
    for (auto m : kModes) {
      auto x = regular_lb(pr, m);
      auto y = regular_unrolled_lb(pr, m);
      ASSERT_EQ(x.verdict, y.verdict);
      ASSERT_EQ(x.d, y.d);
      ASSERT_EQ(x.points, y.points);
    }
  }
}

TEST(LowerBound, DivisionModesAgree) {
  auto rng = make_rng(44);
  for (int i = 0; i < 30000; ++i) {
    auto pr = random_problem<std::uint64_t>(rng, std::uint64_t{1} << (1 + rng() % 30));
    for (auto algo : kAlgos) {
      auto sub = run_lower_bound(algo, pr, DivisionMode::subtractive);
      for (auto m : {DivisionMode::hardware, DivisionMode::hybrid}) {
        auto o = run_lower_bound(algo, pr, m);
        ASSERT_EQ(o.verdict, sub.verdict) << to_string(algo);
        ASSERT_EQ(o.d, sub.d) << to_string(algo);
        ASSERT_LE(o.iterations, sub.iterations);
      }
    }
  }
}

TEST(LowerBound, WordSizesAgreeOnSharedGrid) {
  // A 32-bit problem shifted into 64-bit words describes the same reals.
  auto rng = make_rng(45);
  for (int i = 0; i < 20000; ++i) {
    auto pr = random_problem<std::uint32_t>(rng, 1 << 14);
    SearchProblem<std::uint64_t> wide{UFrac::from_raw(std::uint64_t{pr.a.raw()} << 32),
                                      UFrac::from_raw(std::uint64_t{pr.b.raw()} << 32),
                                      UFrac::from_raw(std::uint64_t{pr.eps.raw()} << 32), pr.count};
    for (auto algo : kAlgos) {
      auto x = run_lower_bound(algo, pr, DivisionMode::hybrid);
      auto y = run_lower_bound(algo, wide, DivisionMode::hybrid);
      ASSERT_EQ(x.verdict, y.verdict);
      ASSERT_EQ(std::uint64_t{x.d.raw()} << 32, y.d.raw());
    }
  }
}

TEST(LowerBound, LefevrePointCountBelowTwiceN) {
  auto rng = make_rng(46);
  for (int i = 0; i < 20000; ++i) {
    auto pr = random_problem<std::uint64_t>(rng, std::uint64_t{1} << (1 + rng() % 30));
    pr.eps = UFrac{};
    for (auto m : kModes) {
      auto o = lefevre_lb(pr, m);
      ASSERT_LT(o.points, 2 * pr.count);
    }
  }
}

// The regular algorithm computes one quotient per iteration: count the
// convergent denominators q_j needed before q_j + q_(j-1) reaches N.
std::uint64_t expected_regular_iterations(const SearchProblem<std::uint64_t>& pr) {
  if (pr.a.is_zero() || pr.count == 1 || pr.b < pr.eps) return 0;
  auto ks = cf_quotients_ref(pr.a.raw(), Length{1} << 64);
  Length q_prev = 0, q = 1;
  std::uint64_t it = 0;
  for (Length k : ks) {
    ++it;
    Length next = k * q + q_prev;
    q_prev = q;
    q = next;
    if (q + q_prev >= pr.count) break;
  }
  return it;
}

TEST(LowerBound, RegularIterationLaw) {
  auto rng = make_rng(47);
  for (int i = 0; i < 20000; ++i) {
    auto pr = random_problem<std::uint64_t>(rng, std::uint64_t{1} << (1 + rng() % 40));
    if (rng() % 8 == 0) pr.a = UFrac::from_raw(pr.a.raw() >> 40);
    auto o = regular_lb(pr, DivisionMode::hybrid);
    ASSERT_EQ(o.iterations, expected_regular_iterations(pr));
    ASSERT_EQ(o.quotients, o.iterations);
  }
}

TEST(LowerBound, BranchTracesHaveOneEntryPerIteration) {
  auto rng = make_rng(48);
  for (int i = 0; i < 2000; ++i) {
    auto pr = random_problem<std::uint64_t>(rng, 1 << 15);
    for (auto algo : kAlgos) {
      BranchTrace t;
      auto o = run_lower_bound(algo, pr, DivisionMode::hybrid, &t);
      ASSERT_EQ(t.size(), o.iterations);
    }
    // The unrolled body starts with the p < q half.
    BranchTrace t;
    regular_unrolled_lb(pr, DivisionMode::hybrid, &t);
    for (auto bits : t) ASSERT_TRUE(bits & kBranchMain);
  }
}

TEST(LowerBound, NamesRoundTrip) {
  for (auto algo : kAlgos) EXPECT_EQ(parse_lower_bound_algorithm(to_string(algo)), algo);
  EXPECT_FALSE(parse_lower_bound_algorithm("auto").has_value());
}

}  // namespace
