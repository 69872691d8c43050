#include "hrsearch/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "hrsearch/errors.hpp"

namespace hrsearch {

int default_guard_bits(const FpFormat& fmt) { return 2 * (fmt.precision + fmt.eps_bits) + 16; }

namespace {

// dist_p(f(x)) computed at `guard_bits`; exact when the evaluation was.
struct Distance {
  BigFloat value;
  bool exact;
};

Distance compute_distance(const Function& f, const PFloat& x, const FpFormat& fmt,
                          int guard_bits) {
  const int p = fmt.precision;
  if (guard_bits < p + fmt.eps_bits + 2) throw ConfigError("guard precision too small");
  BigFloat xv(64);
  mpfr_set_ui_2exp(xv.get(), x.significand, x.exponent - p, MPFR_RNDN);
  BigFloat y(guard_bits);
  int ternary = f.evaluate(y.get(), xv.get(), MPFR_RNDN);
  if (mpfr_zero_p(y.get()) || !mpfr_number_p(y.get())) {
    throw DomainError(f.name() + " has no nonzero finite value at the argument");
  }
  mpfr_abs(y.get(), y.get(), MPFR_RNDN);
  // V = 2^p m(y), exact.
  mpfr_set_exp(y.get(), p);
  BigFloat fr(guard_bits + 2);
  mpfr_frac(fr.get(), y.get(), MPFR_RNDN);
  if (mpfr_cmp_ui_2exp(fr.get(), 1, -1) > 0) mpfr_ui_sub(fr.get(), 1, fr.get(), MPFR_RNDN);
  return {std::move(fr), ternary == 0};
}

}  // namespace

Evaluation evaluate_distance(const Function& f, const PFloat& x, const FpFormat& fmt,
                             int guard_bits) {
  const int p = fmt.precision;
  auto [fr, exact] = compute_distance(f, x, fmt, guard_bits);
  Evaluation ev;
  ev.exact = exact;
  ev.guard_bits = guard_bits;
  BigFloat scaled(guard_bits + 2);
  mpfr_mul_2si(scaled.get(), fr.get(), 64, MPFR_RNDN);
  ev.distance_raw = mpfr_get_uj(scaled.get(), MPFR_RNDZ);

  BigFloat eps(8);
  mpfr_set_ui_2exp(eps.get(), 1, -fmt.eps_bits, MPFR_RNDN);
  if (ev.exact) {
    if (mpfr_zero_p(fr.get())) {
      ev.decision = Decision::representable;
    } else {
      ev.decision = mpfr_less_p(fr.get(), eps.get()) ? Decision::hr : Decision::not_hr;
    }
    return ev;
  }
  // |y - f(x)| <= 2^(e - g - 1) turns into 2^(p - g - 1) after scaling.
  BigFloat lo(guard_bits + 8), hi(guard_bits + 8), margin(8);
  mpfr_set_ui_2exp(margin.get(), 1, p - guard_bits, MPFR_RNDN);
  mpfr_sub(lo.get(), fr.get(), margin.get(), MPFR_RNDD);
  mpfr_add(hi.get(), fr.get(), margin.get(), MPFR_RNDU);
  if (mpfr_less_p(hi.get(), eps.get())) {
    ev.decision = Decision::hr;
  } else if (mpfr_greaterequal_p(lo.get(), eps.get())) {
    ev.decision = Decision::not_hr;
  } else {
    ev.decision = Decision::undecided;
  }
  return ev;
}

Evaluation ziv_decide(const Function& f, const PFloat& x, const FpFormat& fmt, int guard_bits,
                      int max_guard_bits) {
  int g = guard_bits > 0 ? guard_bits : default_guard_bits(fmt);
  while (true) {
    Evaluation ev = evaluate_distance(f, x, fmt, g);
    if (ev.decision != Decision::undecided) return ev;
    if (g >= max_guard_bits) throw UndecidedError("precision cap reached");
    g = std::min(2 * g, max_guard_bits);
  }
}

std::vector<HrCaseRecord> exhaustive_hr_search(const Function& f, const Domain& domain,
                                               const FpFormat& fmt, int guard_bits) {
  fmt.validate();
  if (domain.count > kExhaustiveLimit) throw ConfigError("domain too large for exhaustive search");
  const int g = guard_bits > 0 ? guard_bits : default_guard_bits(fmt);
  std::vector<HrCaseRecord> out;
  for (std::uint64_t i = 0; i < domain.count; ++i) {
    PFloat x = domain.at(i);
    Evaluation ev = evaluate_distance(f, x, fmt, g);
    if (ev.decision == Decision::not_hr || ev.decision == Decision::representable) continue;
    out.push_back({x.to_bits(fmt.precision), ev.distance_raw, 64, domain.index,
                   ev.decision == Decision::undecided});
  }
  return out;
}

PFloat pfloat_from_bits(std::uint64_t bits, int p) {
  int e;
  double m = std::frexp(std::bit_cast<double>(bits), &e);
  return {static_cast<std::uint64_t>(std::ldexp(m, p)), e};
}

std::vector<HrCaseRecord> resolve_undecided(const std::vector<HrCaseRecord>& records,
                                            const Function& f, const FpFormat& fmt) {
  std::vector<HrCaseRecord> out;
  for (const auto& r : records) {
    if (!r.undecided) {
      out.push_back(r);
      continue;
    }
    Evaluation ev = ziv_decide(f, pfloat_from_bits(r.arg_bits, fmt.precision), fmt, 0);
    if (ev.decision == Decision::hr) out.push_back({r.arg_bits, ev.distance_raw, 64, r.domain, false});
  }
  return out;
}

std::vector<HrCaseRecord> ziv_refine(const std::vector<HrCaseRecord>& records,
                                     const Function& f, const FpFormat& fmt,
                                     int max_guard_bits) {
  if (records.empty()) throw ConfigError("ziv_refine needs at least one record");
  const int p = fmt.precision;
  struct Entry {
    const HrCaseRecord* rec;
    BigFloat mid, lo, hi;  // the true distance lies in [lo, hi]
    bool exact;
  };
  std::vector<const HrCaseRecord*> contenders;
  for (const auto& r : records) contenders.push_back(&r);
  int g = default_guard_bits(fmt);
  while (true) {
    std::vector<Entry> es;
    for (const auto* r : contenders) {
      auto [fr, exact] = compute_distance(f, pfloat_from_bits(r->arg_bits, p), fmt, g);
      Entry e{r, std::move(fr), BigFloat(g + 8), BigFloat(g + 8), exact};
      mpfr_set(e.lo.get(), e.mid.get(), MPFR_RNDD);
      mpfr_set(e.hi.get(), e.mid.get(), MPFR_RNDU);
      if (!exact) {
        BigFloat margin(8);
        mpfr_set_ui_2exp(margin.get(), 1, p - g, MPFR_RNDN);
        mpfr_sub(e.lo.get(), e.lo.get(), margin.get(), MPFR_RNDD);
        mpfr_add(e.hi.get(), e.hi.get(), margin.get(), MPFR_RNDU);
      }
      es.push_back(std::move(e));
    }
    auto best = std::min_element(es.begin(), es.end(), [](const Entry& a, const Entry& b) {
      return mpfr_less_p(a.hi.get(), b.hi.get());
    });
    // Contenders: every record that might still be the closest.
    std::vector<const Entry*> next;
    bool exact_tie = true;
    for (const auto& e : es) {
      if (mpfr_lessequal_p(e.lo.get(), best->hi.get())) {
        next.push_back(&e);
        exact_tie &= e.exact && mpfr_equal_p(e.lo.get(), best->lo.get());
      }
    }
    if (next.size() == 1 || exact_tie) {
      std::vector<HrCaseRecord> out;
      for (const Entry* e : next) {
        BigFloat scaled(g + 72);
        mpfr_mul_2si(scaled.get(), e->mid.get(), 64, MPFR_RNDN);
        out.push_back({e->rec->arg_bits, mpfr_get_uj(scaled.get(), MPFR_RNDZ), 64,
                       e->rec->domain, false});
      }
      return out;
    }
    if (g >= max_guard_bits) throw UndecidedError("distances not separated at the precision cap");
    contenders.clear();
    for (const Entry* e : next) contenders.push_back(e->rec);
    g = std::min(2 * g, max_guard_bits);
  }
}

std::vector<Length> cf_quotients_ref(Length num, Length den) {
  if (den == 0) throw DivisionByZero("cf_quotients_ref: zero denominator");
  std::vector<Length> ks;
  Length a = den, b = num;
  while (b != 0) {
    ks.push_back(a / b);
    Length r = a % b;
    a = b;
    b = r;
  }
  return ks;
}

}  // namespace hrsearch
