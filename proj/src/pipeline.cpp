#include "hrsearch/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <climits>

#include "hrsearch/errors.hpp"
#include "hrsearch/mpint_gmp.hpp"
#include "hrsearch/parallel.hpp"

namespace hrsearch {

std::string_view to_string(AlgorithmChoice a) {
  switch (a) {
    case AlgorithmChoice::lefevre: return "lefevre";
    case AlgorithmChoice::lefevre_swap: return "lefevre-swap";
    case AlgorithmChoice::regular: return "regular";
    case AlgorithmChoice::regular_unrolled: return "regular-unrolled";
    case AlgorithmChoice::automatic: return "auto";
  }
  return "?";
}

std::optional<AlgorithmChoice> parse_algorithm_choice(std::string_view s) {
  if (s == "auto") return AlgorithmChoice::automatic;
  if (auto a = parse_lower_bound_algorithm(s)) {
    switch (*a) {
      case LowerBoundAlgorithm::lefevre: return AlgorithmChoice::lefevre;
      case LowerBoundAlgorithm::lefevre_swap: return AlgorithmChoice::lefevre_swap;
      case LowerBoundAlgorithm::regular: return AlgorithmChoice::regular;
      case LowerBoundAlgorithm::regular_unrolled: return AlgorithmChoice::regular_unrolled;
    }
  }
  return std::nullopt;
}

void PhaseConfig::validate() const {
  if (word_bits != 32 && word_bits != 64) throw ConfigError("word size must be 32 or 64");
  if (split == 0 || !std::has_single_bit(split)) throw ConfigError("split must be a power of two");
  if (workers == 0) throw ConfigError("at least one worker is needed");
  if (!(auto_threshold >= 0)) throw ConfigError("auto threshold must be nonnegative");
}

int default_domain_bits(int precision) { return std::max(2, (precision - 4) / 3); }

namespace {

long bitlen(const mpz_class& z) {
  return sgn(z) == 0 ? 0 : static_cast<long>(mpz_sizeinbase(z.get_mpz_t(), 2));
}

// ceil(q * 2^shift) for q >= 0.
mpz_class scale_ceil(const mpz_class& q, long shift) {
  mpz_class r;
  if (shift >= 0) {
    mpz_mul_2exp(r.get_mpz_t(), q.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
  } else {
    mpz_cdiv_q_2exp(r.get_mpz_t(), q.get_mpz_t(), static_cast<mp_bitcnt_t>(-shift));
  }
  return r;
}

// |c_j| binom(n - 1, j) summed over j >= from.
mpz_class spread(const BinomialPoly& poly, std::uint64_t n, std::size_t from) {
  mpz_class total = 0, b;
  for (std::size_t j = from; j < poly.coeffs.size(); ++j) {
    mpz_bin_uiui(b.get_mpz_t(), n - 1, static_cast<unsigned long>(j));
    total += abs(to_mpz(poly.coeffs[j])) * b;
  }
  return total;
}

LowerBoundAlgorithm fixed_algorithm(AlgorithmChoice c) {
  switch (c) {
    case AlgorithmChoice::lefevre: return LowerBoundAlgorithm::lefevre;
    case AlgorithmChoice::lefevre_swap: return LowerBoundAlgorithm::lefevre_swap;
    case AlgorithmChoice::regular_unrolled: return LowerBoundAlgorithm::regular_unrolled;
    default: return LowerBoundAlgorithm::regular;
  }
}

template <FracWord Word>
bool passes(const DomainPoly& dp, const PhaseContext& ctx, LowerBoundAlgorithm algo) {
  auto pr = boolean_test<Word>(dp, ctx.format);
  return pr && run_lower_bound(algo, *pr, ctx.division).success();
}

bool domain_passes(const DomainPoly& dp, const PhaseContext& ctx, LowerBoundAlgorithm algo) {
  return ctx.word_bits == 32 ? passes<std::uint32_t>(dp, ctx, algo)
                             : passes<std::uint64_t>(dp, ctx, algo);
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

template <FracWord Word>
std::optional<SearchProblem<Word>> boolean_test(const DomainPoly& dp, const FpFormat& fmt) {
  constexpr int W = Frac<Word>::kBits;
  const auto& c = dp.poly.coeffs;
  if (c.size() < 2) throw ConfigError("domain polynomial must have degree at least one");
  const int F = dp.poly.frac_bits;
  const int p = fmt.precision;
  const mpz_class c0 = to_mpz(c[0]);
  const mpz_class range = spread(dp.poly, dp.count, 1);
  const mpz_class lo = c0 - range, hi = c0 + range;
  if (sgn(lo) <= 0) throw ConfigError("the function must be positive on the search range");
  // Output exponent offset s: 2^(p - 1 + s) <= P(x) < 2^(p + s) everywhere.
  const long s = bitlen(lo) - F - p;
  if (bitlen(hi) - F - p != s) return std::nullopt;
  // Bit position of one output ulp at that exponent.
  const long K = F + s;

  const mpz_class limit = mpz_class(1) << (W - 2);
  auto raw = [&](const mpz_class& q) -> std::optional<Word> {
    mpz_class r = scale_ceil(q, W - K);
    if (r >= limit) return std::nullopt;
    return static_cast<Word>(r.get_ui());
  };
  ErrorBudget<Word> budget;
  budget.eps = fmt.eps_bits >= W ? Frac<Word>::from_raw(1) : Frac<Word>::pow2(fmt.eps_bits);
  auto approx = raw(dp.approx_error);
  auto trunc = raw(spread(dp.poly, dp.count, 2));
  if (!approx || !trunc || dp.count + 1 >= (std::uint64_t{1} << (W - 2))) return std::nullopt;
  budget.eps_approx = Frac<Word>::from_raw(*approx);
  budget.eps_trunc = Frac<Word>::from_raw(*trunc);
  // a and b are each truncated to W bits: x a is off by less than x units.
  budget.eps_shift = Frac<Word>::from_raw(static_cast<Word>(dp.count + 1));
  auto eps2 = budget.eps_second();
  if (!eps2) return std::nullopt;

  const int pos = static_cast<int>(K - W);
  SearchProblem<Word> pr;
  pr.a = Frac<Word>() - Frac<Word>::from_raw(static_cast<Word>(c[1].bits(pos, W)));
  pr.b = Frac<Word>::from_raw(static_cast<Word>(c[0].bits(pos, W))) + *eps2;
  pr.eps = *eps2 + *eps2;
  pr.count = dp.count;
  return pr;
}

std::vector<std::size_t> phase1(std::span<const DomainPoly> domains, const PhaseContext& ctx,
                                LowerBoundAlgorithm algo) {
  std::vector<char> ok(domains.size());
  parallel_for(domains.size(), ctx.workers,
               [&](std::size_t i) { ok[i] = domain_passes(domains[i], ctx, algo); });
  std::vector<std::size_t> failing;
  for (std::size_t i = 0; i < domains.size(); ++i) {
    if (!ok[i]) failing.push_back(i);
  }
  return failing;
}

std::vector<DomainPoly> phase2(std::span<const DomainPoly> domains, const PhaseContext& ctx,
                               LowerBoundAlgorithm algo, std::uint64_t* tested) {
  std::vector<DomainPoly> pieces;
  for (const auto& d : domains) {
    const std::uint64_t parts = std::min(ctx.split, d.count);
    const std::uint64_t m = d.count / parts;
    for (std::uint64_t k = 0; k < parts; ++k) {
      pieces.push_back({d.domain, d.offset + k * m, m, straightforward_shift(d.poly, k * m),
                        d.approx_error});
    }
  }
  if (tested) *tested = pieces.size();
  std::vector<char> ok(pieces.size());
  parallel_for(pieces.size(), ctx.workers,
               [&](std::size_t i) { ok[i] = domain_passes(pieces[i], ctx, algo); });
  std::vector<DomainPoly> failing;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!ok[i]) failing.push_back(std::move(pieces[i]));
  }
  return failing;
}

std::vector<Candidate> phase3_exhaustive(std::span<const DomainPoly> domains,
                                         const PhaseContext& ctx) {
  const int p = ctx.format.precision;
  std::vector<std::vector<Candidate>> found(domains.size());
  parallel_for(domains.size(), ctx.workers, [&](std::size_t di) {
    const DomainPoly& d = domains[di];
    std::vector<MPInt> col = d.poly.coeffs;
    long cached_k = LONG_MIN;
    std::uint64_t window = 0;
    bool everything = false;
    for (std::uint64_t x = 0; x < d.count; ++x) {
      const MPInt& v = col.front();
      if (v.is_negative() || v.is_zero()) {
        throw ConfigError("the function must be positive on the search range");
      }
      const long K = static_cast<long>(v.bit_length()) - p;
      if (K != cached_k) {
        // eps + approximation error + one unit for the truncation of v,
        // in 64-bit units of the output ulp at this exponent.
        cached_k = K;
        mpz_class w = scale_ceil(d.approx_error, 64 - K) + 1;
        w += mpz_class(1) << (64 - ctx.format.eps_bits);
        everything = w >= (mpz_class(1) << 62);
        window = everything ? 0 : w.get_ui();
      }
      std::uint64_t r = v.bits(static_cast<int>(K - 64), 64);
      if (everything || r + window < 2 * window) found[di].push_back({d.domain, d.offset + x});
      if (x + 1 < d.count) tabulated_shift_step(col);
    }
  });
  std::vector<Candidate> out;
  for (auto& f : found) out.insert(out.end(), f.begin(), f.end());
  return out;
}

std::vector<HrCaseRecord> confirm(std::span<const Candidate> candidates, const Function& f,
                                  const FpFormat& fmt, int binade, unsigned workers) {
  const std::uint64_t first = std::uint64_t{1} << (fmt.precision - 1);
  std::vector<std::optional<HrCaseRecord>> slots(candidates.size());
  parallel_for(candidates.size(), workers, [&](std::size_t i) {
    PFloat x{first + candidates[i].offset, binade + 1};
    Evaluation ev = ziv_decide(f, x, fmt, default_guard_bits(fmt));
    if (ev.decision == Decision::hr) {
      slots[i] = HrCaseRecord{x.to_bits(fmt.precision), ev.distance_raw, 64,
                              candidates[i].domain, false};
    }
  });
  std::vector<HrCaseRecord> out;
  for (auto& s : slots) {
    if (s) out.push_back(*s);
  }
  return out;
}

void PhaseStats::merge(const PhaseStats& other) {
  auto add = [](PhaseRow& a, const PhaseRow& b) {
    a.domains_in += b.domains_in;
    a.domains_out += b.domains_out;
    a.arguments_covered += b.arguments_covered;
    a.wall_ms += b.wall_ms;
  };
  add(phase1, other.phase1);
  add(phase2, other.phase2);
  add(phase3, other.phase3);
  add(confirm, other.confirm);
  choices.insert(choices.end(), other.choices.begin(), other.choices.end());
}

SearchPlan resolve_plan(SearchPlan plan) {
  if (!plan.function) throw ConfigError("no function given");
  plan.format.validate();
  plan.phases.validate();
  auto& g = plan.polygen;
  if (g.domain_size == 0) g.domain_size = std::uint64_t{1} << default_domain_bits(plan.format.precision);
  if (g.domain_size < 2) throw ConfigError("domains need at least two arguments");
  BinadeSplit split(plan.binade, plan.format, g.domain_size);
  if (plan.first_domain >= split.count()) throw ConfigError("first domain outside the binade");
  if (plan.domain_count == 0) plan.domain_count = split.count() - plan.first_domain;
  if (plan.domain_count > split.count() - plan.first_domain) {
    throw ConfigError("domain range exceeds the binade");
  }
  if (g.budget_bits == 0) g.budget_bits = plan.format.eps_bits + 2;
  if (g.tau == 0) {
    // Largest power of two up to 256 dividing the domain count whose
    // remainder bound uses at most half the budget on both ends of the
    // range; the derivatives of the supported functions are monotone.
    std::uint64_t tau = std::bit_floor(std::min<std::uint64_t>(256, plan.domain_count));
    while (tau > 1 && plan.domain_count % tau != 0) tau /= 2;
    const ScaledReal half = ScaledReal::pow2(-g.budget_bits - 1);
    auto fits = [&](std::uint64_t t) {
      const std::uint64_t supers = plan.domain_count / t;
      for (std::uint64_t k : {std::uint64_t{0}, supers - 1}) {
        Domain sd{split.at(plan.first_domain).first + k * t * g.domain_size,
                  plan.binade + 1, t * g.domain_size, k};
        BigFloat y(64), x(64);
        mpfr_set_ui_2exp(x.get(), sd.first, sd.exponent - plan.format.precision, MPFR_RNDN);
        plan.function->evaluate(y.get(), x.get(), MPFR_RNDN);
        if (mpfr_sgn(y.get()) <= 0) throw ConfigError(plan.function->name() + " must be positive on the search range");
        int e = static_cast<int>(mpfr_get_exp(y.get()));
        if (half < taylor_remainder_bound(*plan.function, sd, plan.format, g, e)) return false;
      }
      return true;
    };
    while (tau > 1 && !fits(tau)) tau /= 2;
    g.tau = tau;
    g.nu = 0;
    g.mu = 0;
  }
  if (g.nu == 0) g.nu = std::min<std::uint64_t>(16, g.tau);
  if (g.mu == 0) g.mu = g.tau / g.nu;
  g.validate();
  if (plan.domain_count % g.tau != 0) throw ConfigError("tau must divide the number of domains");
  plan.phases.split = std::min(plan.phases.split, g.domain_size);
  return plan;
}

std::vector<DomainPoly> interval_polys(const SearchPlan& plan, std::uint64_t t) {
  const auto& g = plan.polygen;
  BinadeSplit split(plan.binade, plan.format, g.domain_size);
  const std::uint64_t first = plan.first_domain + t * g.tau;
  Domain super{split.at(first).first, plan.binade + 1, g.tau * g.domain_size, t};
  TaylorApprox ta = taylor_approx(*plan.function, super, plan.format, g);
  mpz_class err = scale_ceil(ta.error_bound.num, ta.error_bound.exp2 + g.frac_bits);
  auto parts = hierarchical_split(ta.poly, g.domain_size);
  auto polys = domain_polys(parts, g, plan.phases.workers);
  std::vector<DomainPoly> out;
  out.reserve(polys.size());
  for (std::uint64_t i = 0; i < polys.size(); ++i) {
    out.push_back({first + i, (first + i) * g.domain_size, g.domain_size, std::move(polys[i]), err});
  }
  return out;
}

LowerBoundAlgorithm select_algorithm(const PhaseStats* prev, double threshold) {
  if (!prev || prev->phase1.domains_in == 0) return LowerBoundAlgorithm::regular;
  double ratio = static_cast<double>(prev->phase3.domains_in) /
                 static_cast<double>(prev->phase1.domains_in);
  return ratio > 0 && ratio >= threshold ? LowerBoundAlgorithm::lefevre
                                         : LowerBoundAlgorithm::regular;
}

PipelineResult run_pipeline(const SearchPlan& in) {
  const SearchPlan plan = resolve_plan(in);
  const auto& g = plan.polygen;
  const PhaseContext ctx{plan.format, plan.phases.word_bits, plan.phases.division,
                         plan.phases.split, plan.phases.workers};
  PipelineResult result;
  std::optional<PhaseStats> prev;
  const std::uint64_t intervals = plan.domain_count / g.tau;
  for (std::uint64_t t = 0; t < intervals; ++t) {
    LowerBoundAlgorithm algo = fixed_algorithm(plan.phases.algorithm);
    if (plan.phases.algorithm == AlgorithmChoice::automatic) {
      algo = select_algorithm(prev ? &*prev : nullptr, plan.phases.auto_threshold);
    }
    PhaseStats st;
    st.choices.push_back({t, algo});
    auto clock = std::chrono::steady_clock::now();
    std::vector<DomainPoly> polys = interval_polys(plan, t);
    auto failing_idx = phase1(polys, ctx, algo);
    std::vector<DomainPoly> failing;
    for (auto i : failing_idx) failing.push_back(std::move(polys[i]));
    st.phase1 = {"phase1", polys.size(), failing.size(), polys.size() * g.domain_size,
                 plan.timing ? elapsed_ms(clock) : 0};

    clock = std::chrono::steady_clock::now();
    std::uint64_t tested = 0;
    auto pieces = phase2(failing, ctx, algo, &tested);
    st.phase2 = {"phase2", tested, pieces.size(), failing.size() * g.domain_size,
                 plan.timing ? elapsed_ms(clock) : 0};

    clock = std::chrono::steady_clock::now();
    auto candidates = phase3_exhaustive(pieces, ctx);
    std::uint64_t enumerated = 0;
    for (const auto& p : pieces) enumerated += p.count;
    st.phase3 = {"phase3", pieces.size(), candidates.size(), enumerated,
                 plan.timing ? elapsed_ms(clock) : 0};

    clock = std::chrono::steady_clock::now();
    auto records = confirm(candidates, *plan.function, plan.format, plan.binade, ctx.workers);
    st.confirm = {"confirm", candidates.size(), records.size(), candidates.size(),
                  plan.timing ? elapsed_ms(clock) : 0};

    prev = st;
    result.records.insert(result.records.end(), records.begin(), records.end());
    result.stats.merge(st);
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const HrCaseRecord& a, const HrCaseRecord& b) { return a.arg_bits < b.arg_bits; });
  return result;
}

template <FracWord Word>
std::vector<SearchProblem<Word>> phase1_problems(const SearchPlan& in) {
  const SearchPlan plan = resolve_plan(in);
  std::vector<SearchProblem<Word>> out;
  for (std::uint64_t t = 0; t < plan.domain_count / plan.polygen.tau; ++t) {
    for (const auto& dp : interval_polys(plan, t)) {
      if (auto pr = boolean_test<Word>(dp, plan.format)) out.push_back(*pr);
    }
  }
  return out;
}

template std::optional<SearchProblem<std::uint32_t>> boolean_test(const DomainPoly&, const FpFormat&);
template std::optional<SearchProblem<std::uint64_t>> boolean_test(const DomainPoly&, const FpFormat&);
template std::vector<SearchProblem<std::uint32_t>> phase1_problems(const SearchPlan&);
template std::vector<SearchProblem<std::uint64_t>> phase1_problems(const SearchPlan&);

}  // namespace hrsearch
