#include "hrsearch/lowerbound.hpp"

#include <algorithm>
#include <utility>

#include "hrsearch/errors.hpp"

namespace hrsearch {

std::string_view to_string(LowerBoundAlgorithm a) {
  switch (a) {
    case LowerBoundAlgorithm::lefevre: return "lefevre";
    case LowerBoundAlgorithm::lefevre_swap: return "lefevre-swap";
    case LowerBoundAlgorithm::regular: return "regular";
    case LowerBoundAlgorithm::regular_unrolled: return "regular-unrolled";
  }
  return "?";
}

std::optional<LowerBoundAlgorithm> parse_lower_bound_algorithm(std::string_view s) {
  if (s == "lefevre") return LowerBoundAlgorithm::lefevre;
  if (s == "lefevre-swap") return LowerBoundAlgorithm::lefevre_swap;
  if (s == "regular") return LowerBoundAlgorithm::regular;
  if (s == "regular-unrolled") return LowerBoundAlgorithm::regular_unrolled;
  return std::nullopt;
}

template <FracWord Word>
void SearchProblem<Word>::validate() const {
  if (count == 0) throw ConfigError("search problem needs at least one point");
  if (count > (std::uint64_t{1} << 62)) throw ConfigError("search problem count too large");
  if (eps >= Frac<Word>::pow2(1)) throw ConfigError("eps must be below 1/2");
}

namespace {

template <FracWord Word>
using F = Frac<Word>;

template <FracWord Word>
SearchOutcome<Word> finish(F<Word> d, F<Word> eps, std::uint64_t points,
                           const SearchOutcome<Word>& progress) {
  SearchOutcome<Word> out = progress;
  out.verdict = d >= eps ? Verdict::success : Verdict::failure;
  out.d = d;
  out.points = points;
  return out;
}

// Smallest base + k * inc >= n over k >= 0.
std::uint64_t reach(std::uint64_t base, std::uint64_t inc, std::uint64_t n) {
  if (base >= n) return base;
  std::uint64_t k = (n - base + inc - 1) / inc;
  return sat_add(base, sat_mul(k, inc));
}

// Cases that need no loop. Empty when the main loop has to run.
template <FracWord Word>
std::optional<SearchOutcome<Word>> trivial(const SearchProblem<Word>& pr) {
  pr.validate();
  SearchOutcome<Word> out;
  // Every point sits on b.
  if (pr.a.is_zero()) return finish(pr.b, pr.eps, pr.count, out);
  if (pr.count == 1 || pr.b < pr.eps) return finish(pr.b, pr.eps, 1, out);
  return std::nullopt;
}

template <FracWord Word>
void record(BranchTrace* trace, std::uint8_t bits) {
  if (trace) trace->push_back(bits);
}

// Once one of the gap lengths is zero the configuration repeats itself with
// period g, so reducing d modulo g yields the exact minimum.
template <FracWord Word>
SearchOutcome<Word> terminate(F<Word> d, F<Word> p, F<Word> q, F<Word> eps, std::uint64_t points,
                              DivisionMode mode, const SearchOutcome<Word>& progress) {
  F<Word> g = p.is_zero() ? q : p;
  return finish(frac_div(d, g, mode).remainder, eps, points, progress);
}

enum class RunEnd { none, failure, success, applied };

// J consecutive steps  d -= step; len -= step; grow += fixed  with the
// single-step quotient equal to zero, computed with a few divisions.
// The step that would drop d below eps ends in failure; the one where
// grow + fixed reaches n ends in success; otherwise the run stops when d or
// len no longer exceeds step.
template <FracWord Word>
RunEnd subtraction_run(F<Word>& d, F<Word> step, F<Word>& len, std::uint64_t& grow,
                       std::uint64_t fixed, F<Word> eps, std::uint64_t n,
                       std::uint64_t& points) {
  using W = Word;
  W s = step.raw();
  W m_run = std::min<W>(d.raw() / s, (len.raw() - 1) / s);
  if (m_run == 0) return RunEnd::none;
  W j_fail = (d.raw() - eps.raw()) / s + 1;
  std::uint64_t j_succ = grow >= n ? 1 : (n - grow + fixed - 1) / fixed;
  std::uint64_t j = std::min<std::uint64_t>({m_run, j_fail, j_succ});
  d = F<Word>::from_raw(static_cast<W>(d.raw() - static_cast<W>(j) * s));
  if (j == j_fail || j == j_succ) {
    points = sat_add(grow, sat_mul(j, fixed));
    return j == j_fail ? RunEnd::failure : RunEnd::success;
  }
  len = F<Word>::from_raw(static_cast<W>(len.raw() - static_cast<W>(j) * s));
  grow += j * fixed;
  return RunEnd::applied;
}

}  // namespace

template <FracWord Word>
SearchOutcome<Word> lefevre_lb(const SearchProblem<Word>& pr, DivisionMode mode,
                               BranchTrace* trace) {
  if (auto t = trivial(pr)) return *t;
  const F<Word> eps = pr.eps;
  const std::uint64_t n = pr.count;
  const bool batch = mode != DivisionMode::subtractive;
  SearchOutcome<Word> out;
  F<Word> d = pr.b, p = pr.a, q = F<Word>() - pr.a;
  std::uint64_t u = 1, v = 1;
  while (true) {
    if (p.is_zero() || q.is_zero()) return terminate(d, p, q, eps, u + v, mode, out);
    ++out.iterations;
    if (d < p) {
      record<Word>(trace, kBranchMain);
      auto [k, r] = frac_div(q, p, mode);
      ++out.quotients;
      if (sat_add(u, sat_mul(k + 1, v)) >= n) return finish(d, eps, reach(u + v, v, n), out);
      q = r;
      u += k * v;
      p -= q;
      v += u;
    } else {
      record<Word>(trace, 0);
      if (batch && p < q) {
        std::uint64_t points = 0;
        switch (subtraction_run(d, p, q, u, v, eps, n, points)) {
          case RunEnd::failure:
          case RunEnd::success: return finish(d, eps, points, out);
          case RunEnd::applied: continue;
          case RunEnd::none: break;
        }
      }
      d -= p;
      if (d < eps) return finish(d, eps, u + v, out);
      auto [k, r] = frac_div(p, q, mode);
      ++out.quotients;
      if (sat_add(v, sat_mul(k + 1, u)) >= n) return finish(d, eps, reach(u + v, u, n), out);
      p = r;
      v += k * u;
      q -= p;
      u += v;
    }
  }
}

template <FracWord Word>
SearchOutcome<Word> lefevre_swap_lb(const SearchProblem<Word>& pr, DivisionMode mode,
                                    BranchTrace* trace) {
  if (auto t = trivial(pr)) return *t;
  const F<Word> eps = pr.eps;
  const std::uint64_t n = pr.count;
  const bool batch = mode != DivisionMode::subtractive;
  SearchOutcome<Word> out;
  F<Word> d = pr.b, p = pr.a, q = F<Word>() - pr.a;
  std::uint64_t u = 1, v = 1;
  // While swapped, (p, q, u, v) hold what the two-branch form calls
  // (q, p, v, u), so the shared body below is that form's else-branch.
  bool swapped = false;
  auto swap_all = [&] {
    std::swap(p, q);
    std::swap(u, v);
    swapped = !swapped;
  };
  if (d >= p) swap_all();
  while (true) {
    if (p.is_zero() || q.is_zero()) return terminate(d, p, q, eps, u + v, mode, out);
    ++out.iterations;
    std::uint8_t bits = swapped ? kBranchMain : 0;
    if (swapped) {
      if (batch && q < p) {
        std::uint64_t points = 0;
        switch (subtraction_run(d, q, p, v, u, eps, n, points)) {
          case RunEnd::failure:
          case RunEnd::success: record<Word>(trace, bits); return finish(d, eps, points, out);
          case RunEnd::applied:
            if (d < q) {
              swap_all();
              bits |= kBranchSecond;
            }
            record<Word>(trace, bits);
            continue;
          case RunEnd::none: break;
        }
      }
      d -= q;
      if (d < eps) {
        record<Word>(trace, bits);
        return finish(d, eps, u + v, out);
      }
    }
    auto [k, r] = frac_div(q, p, mode);
    ++out.quotients;
    if (sat_add(u, sat_mul(k + 1, v)) >= n) {
      record<Word>(trace, bits);
      return finish(d, eps, reach(u + v, v, n), out);
    }
    q = r;
    u += k * v;
    p -= q;
    v += u;
    F<Word> ref = swapped ? q : p;
    if (swapped != (d >= ref)) {
      swap_all();
      bits |= kBranchSecond;
    }
    record<Word>(trace, bits);
  }
}

template <FracWord Word>
SearchOutcome<Word> regular_lb(const SearchProblem<Word>& pr, DivisionMode mode,
                               BranchTrace* trace) {
  if (auto t = trivial(pr)) return *t;
  const F<Word> eps = pr.eps;
  const std::uint64_t n = pr.count;
  SearchOutcome<Word> out;
  F<Word> d = pr.b, p = pr.a, q;
  bool q_is_one = true;  // q starts at 1, which has no W-bit encoding
  // u + v is the point count q_i + q_(i-1) of the configuration (i, 0)
  // reached; the p < q branch advances the one paired with q.
  std::uint64_t u = 1, v = 0;
  while (true) {
    ++out.iterations;
    ++out.quotients;
    if (q_is_one || p < q) {
      std::uint64_t k;
      if (q_is_one) {
        auto r = unit_div(p, mode);
        // A quotient of 2^W saturates the count, which ends the loop anyway.
        k = static_cast<std::uint64_t>(std::min<typename F<Word>::wide_type>(r.quotient, ~0ull));
        q = r.remainder;
        q_is_one = false;
      } else {
        auto r = frac_div(q, p, mode);
        k = r.quotient;
        q = r.remainder;
      }
      v = sat_add(v, sat_mul(k, u));
      d = frac_div(d, p, mode).remainder;
      record<Word>(trace, kBranchMain);
      if (sat_add(u, v) >= n || q.is_zero()) return finish(d, eps, sat_add(u, v), out);
    } else {
      auto [k, r] = frac_div(p, q, mode);
      p = r;
      u = sat_add(u, sat_mul(k, v));
      std::uint8_t bits = 0;
      if (d >= p) {
        d = frac_div(d - p, q, mode).remainder;
        bits |= kBranchSecond;
      }
      record<Word>(trace, bits);
      if (sat_add(u, v) >= n || p.is_zero()) return finish(d, eps, sat_add(u, v), out);
    }
  }
}

template <FracWord Word>
SearchOutcome<Word> regular_unrolled_lb(const SearchProblem<Word>& pr, DivisionMode mode,
                                        BranchTrace* trace) {
  if (auto t = trivial(pr)) return *t;
  const F<Word> eps = pr.eps;
  const std::uint64_t n = pr.count;
  SearchOutcome<Word> out;
  F<Word> d = pr.b, p = pr.a, q;
  bool q_is_one = true;
  std::uint64_t u = 1, v = 0;
  while (true) {
    ++out.iterations;
    // First half: p < q always holds here.
    std::uint64_t k;
    if (q_is_one) {
      auto r = unit_div(p, mode);
      k = static_cast<std::uint64_t>(std::min<typename F<Word>::wide_type>(r.quotient, ~0ull));
      q = r.remainder;
      q_is_one = false;
    } else {
      auto r = frac_div(q, p, mode);
      k = r.quotient;
      q = r.remainder;
    }
    ++out.quotients;
    v = sat_add(v, sat_mul(k, u));
    d = frac_div(d, p, mode).remainder;
    if (sat_add(u, v) >= n || q.is_zero()) {
      record<Word>(trace, kBranchMain);
      return finish(d, eps, sat_add(u, v), out);
    }
    // Second half: now q < p.
    auto r = frac_div(p, q, mode);
    ++out.quotients;
    p = r.remainder;
    u = sat_add(u, sat_mul(r.quotient, v));
    std::uint8_t bits = kBranchMain;
    if (d >= p) {
      d = frac_div(d - p, q, mode).remainder;
      bits |= kBranchSecond;
    }
    record<Word>(trace, bits);
    if (sat_add(u, v) >= n || p.is_zero()) return finish(d, eps, sat_add(u, v), out);
  }
}

#define HRSEARCH_INSTANTIATE(W)                                                                  \
  template struct SearchProblem<W>;                                                              \
  template SearchOutcome<W> lefevre_lb(const SearchProblem<W>&, DivisionMode, BranchTrace*);      \
  template SearchOutcome<W> lefevre_swap_lb(const SearchProblem<W>&, DivisionMode, BranchTrace*); \
  template SearchOutcome<W> regular_lb(const SearchProblem<W>&, DivisionMode, BranchTrace*);      \
  template SearchOutcome<W> regular_unrolled_lb(const SearchProblem<W>&, DivisionMode,           \
                                                BranchTrace*);

HRSEARCH_INSTANTIATE(std::uint32_t)
HRSEARCH_INSTANTIATE(std::uint64_t)

#undef HRSEARCH_INSTANTIATE

}  // namespace hrsearch
