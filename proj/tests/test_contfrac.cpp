#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "hrsearch/contfrac.hpp"
#include "hrsearch/oracle.hpp"
#include "support.hpp"

using namespace hrsearch;
using hrsearch::test::make_rng;

namespace {

struct Row {
  int i, t;
  unsigned q_prev, q_cur, theta_prev, theta_cur, k;
};

// The worked example a = 14/45, lengths scaled by 45.
const Row kTable[] = {
    {0, 0, 0, 1, 45, 14, 3},  {0, 1, 1, 1, 31, 14, 3}, {0, 2, 2, 1, 17, 14, 3},
    {1, 0, 1, 3, 14, 3, 4},   {1, 1, 4, 3, 11, 3, 4},  {1, 2, 7, 3, 8, 3, 4},
    {1, 3, 10, 3, 5, 3, 4},   {2, 0, 3, 13, 3, 2, 1},  {3, 0, 13, 16, 2, 1, 2},
    {3, 1, 29, 16, 1, 1, 2},  {4, 0, 16, 45, 1, 0, 0},
};

void expect_row(const CFConfig& c, const Row& r) {
  EXPECT_EQ(c.i, r.i);
  EXPECT_EQ(c.t, r.t);
  EXPECT_EQ(c.q_prev, r.q_prev);
  EXPECT_EQ(c.q_cur, r.q_cur);
  EXPECT_EQ(c.theta_prev, r.theta_prev);
  EXPECT_EQ(c.theta_cur, r.theta_cur);
  EXPECT_EQ(c.k_next, r.k);
}

TEST(ContFrac, WorkedExampleRowByRow) {
  CFConfig c = cf_init(14, 45);
  for (std::size_t r = 0; r < std::size(kTable); ++r) {
    SCOPED_TRACE(r);
    expect_row(c, kTable[r]);
    EXPECT_TRUE(two_length_identity_holds(c));
    auto n = cf_next(c);
    if (r + 1 == std::size(kTable)) {
      EXPECT_FALSE(n.has_value());
    } else {
      ASSERT_TRUE(n.has_value());
      c = *n;
    }
  }
}

TEST(ContFrac, InitExamples) {
  auto half = cf_init(1, 2);
  EXPECT_EQ(half.theta_prev, 2u);
  EXPECT_EQ(half.theta_cur, 1u);
  auto c31 = cf_init(31, 45);
  EXPECT_EQ(c31.theta_prev, 45u);
  EXPECT_EQ(c31.theta_cur, 31u);
  EXPECT_EQ(c31.q_prev, 0u);
  EXPECT_EQ(c31.q_cur, 1u);
  EXPECT_THROW(cf_init(0, 45), ConfigError);
  auto w = cf_init(UFrac::pow2(1));
  EXPECT_EQ(w.theta_prev, Length{1} << 64);
  EXPECT_EQ(w.theta_cur, Length{1} << 63);
}

TEST(ContFrac, DivisionStepsOnExample) {
  auto s1 = cf_next_div(cf_init(14, 45));
  ASSERT_TRUE(s1);
  EXPECT_EQ(s1->quotient, 3u);
  EXPECT_EQ(s1->config.theta_cur, 3u);
  EXPECT_EQ(s1->config.q_cur, 3u);
  auto s2 = cf_next_div(s1->config);
  ASSERT_TRUE(s2);
  EXPECT_EQ(s2->quotient, 4u);
  EXPECT_EQ(s2->config.theta_cur, 2u);
  EXPECT_EQ(s2->config.q_cur, 13u);
  CFConfig mid = *cf_next(cf_init(14, 45));
  EXPECT_THROW(cf_next_div(mid), ConfigError);
}

TEST(ContFrac, DivisionStepEqualsUnitSteps) {
  auto rng = make_rng(30);
  for (int n = 0; n < 2000; ++n) {
    Length den = test::uniform(rng, 2, 1u << 20);
    Length num = test::uniform(rng, 1, static_cast<std::uint64_t>(den - 1));
    CFConfig c = cf_init(num, den);
    while (true) {
      auto d = cf_next_div(c);
      if (!d) break;
      EXPECT_EQ(d->quotient, c.k_next);
      CFConfig s = c;
      for (Length k = 0; k < d->quotient; ++k) s = *cf_next(s);
      EXPECT_EQ(s, d->config);
      c = d->config;
    }
  }
}

TEST(ContFrac, QuotientsMatchEuclid) {
  auto rng = make_rng(31);
  for (int n = 0; n < 5000; ++n) {
    std::uint32_t raw = static_cast<std::uint32_t>(rng());
    if (raw == 0) raw = 1;
    auto ref = cf_quotients_ref(raw, Length{1} << 32);
    std::vector<Length> got;
    CFConfig c = cf_init(UFrac32::from_raw(raw));
    while (auto d = cf_next_div(c)) {
      got.push_back(d->quotient);
      c = d->config;
    }
    EXPECT_EQ(got, ref);
  }
}

TEST(ContFrac, TwoLengthIdentityAlongRandomExpansions) {
  auto rng = make_rng(32);
  std::size_t configs = 0;
  while (configs < 20000) {
    CFConfig c = cf_init(UFrac::from_raw(rng() | 1));
    for (int steps = 0; steps < 400; ++steps) {
      ASSERT_TRUE(two_length_identity_holds(c));
      mpz_class lhs = mpz_class(static_cast<unsigned long>(c.q_cur)) *
                          mpz_class(static_cast<unsigned long>(c.theta_prev >> 1)) * 2 +
                      mpz_class(static_cast<unsigned long>(c.q_cur)) *
                          mpz_class(static_cast<unsigned long>(c.theta_prev & 1)) +
                      mpz_class(static_cast<unsigned long>(c.q_prev)) *
                          mpz_class(static_cast<unsigned long>(c.theta_cur));
      ASSERT_EQ(lhs, mpz_class(1) << 64);
      ++configs;
      auto n = cf_next(c);
      if (!n || n->q_cur > (Length{1} << 62)) break;
      c = *n;
    }
  }
}

// Gaps between the sorted points {k num mod den}, k < n, as a multiset.
std::map<Length, Length> gap_multiset(Length num, Length den, Length n) {
  std::vector<Length> pts;
  for (Length k = 0; k < n; ++k) pts.push_back(k * num % den);
  std::sort(pts.begin(), pts.end());
  std::map<Length, Length> gaps;
  for (std::size_t j = 0; j + 1 < pts.size(); ++j) ++gaps[pts[j + 1] - pts[j]];
  ++gaps[den - pts.back() + pts.front()];
  return gaps;
}

void check_gaps(Length num, Length den) {
  CFConfig c = cf_init(num, den);
  // Once the short gap vanishes the points start repeating.
  while (!c.terminal()) {
    std::map<Length, Length> expect;
    if (c.q_cur) expect[c.theta_prev] += c.q_cur;
    if (c.q_prev && c.theta_cur) expect[c.theta_cur] += c.q_prev;
    ASSERT_EQ(gap_multiset(num, den, c.points()), expect)
        << "a=" << to_string(num) << "/" << to_string(den) << " i=" << c.i << " t=" << to_string(c.t);
    auto n = cf_next(c);
    if (!n) break;
    c = *n;
  }
}

TEST(ContFrac, GapMultisetsExhaustiveSmallDenominators) {
  for (Length den = 2; den <= 256; ++den) {
    for (Length num = 1; num < den; ++num) check_gaps(num, den);
  }
}

TEST(ContFrac, GapMultisetsSampledLargerDenominators) {
  auto rng = make_rng(33);
  for (int n = 0; n < 300; ++n) {
    Length den = test::uniform(rng, 257, 4096);
    Length num = test::uniform(rng, 1, static_cast<std::uint64_t>(den - 1));
    check_gaps(num, den);
  }
}

TEST(ContFrac, SplitDirectionMatchesGeometry) {
  // The next point n splits a long gap; its left neighbour distance is the
  // short length on even levels and the long remainder on odd ones.
  for (Length den = 3; den <= 200; ++den) {
    for (Length num = 1; num < den; ++num) {
      CFConfig c = cf_init(num, den);
      while (c.points() <= 16) {
        auto nxt = cf_next(c);
        if (!nxt || nxt->terminal()) break;
        Length n = c.points();
        Length pos = n * num % den;
        Length left = 0;
        for (Length k = 0; k < n; ++k) {
          Length p = k * num % den;
          if (p < pos) left = std::max(left, p);
        }
        Length d_left = pos - left;
        Length piece2 = c.theta_prev - c.theta_cur;
        if (piece2 != c.theta_cur) {
          auto dir = split_direction(c);
          EXPECT_EQ(d_left == c.theta_cur, dir == SplitOrder::short_left)
              << to_string(num) << "/" << to_string(den) << " n=" << to_string(n);
        }
        c = *nxt;
      }
    }
  }
}

TEST(ContFrac, ParityAlternatesPerLevel) {
  CFConfig c = cf_init(14, 45);
  EXPECT_EQ(split_direction(c), SplitOrder::short_left);
  auto s = cf_next_div(c);
  EXPECT_EQ(split_direction(s->config), SplitOrder::short_right);
}

}  // namespace
