#include "hrsearch/polygen.hpp"

#include <bit>
#include <climits>

#include "hrsearch/errors.hpp"
#include "hrsearch/mpint_gmp.hpp"
#include "hrsearch/parallel.hpp"

namespace hrsearch {

MPInt binomial(std::uint64_t n, unsigned k, std::size_t limbs) {
  MPInt r(1, limbs);
  if (k > n) return MPInt(0, limbs);
  for (unsigned i = 0; i < k; ++i) {
    r = mp_divexact_small(mp_mul_small(r, n - i), i + 1);
  }
  return r;
}

std::vector<std::vector<MPInt>> forward_differences(std::span<const MPInt> values) {
  std::vector<std::vector<MPInt>> rows;
  rows.emplace_back(values.begin(), values.end());
  while (rows.back().size() > 1) {
    const auto& prev = rows.back();
    std::vector<MPInt> next;
    next.reserve(prev.size() - 1);
    for (std::size_t i = 0; i + 1 < prev.size(); ++i) next.push_back(prev[i + 1] - prev[i]);
    rows.push_back(std::move(next));
  }
  return rows;
}

BinomialPoly newton_interpolate(std::span<const MPInt> values, int frac_bits) {
  if (values.empty()) throw ConfigError("newton_interpolate: no values");
  BinomialPoly p;
  p.frac_bits = frac_bits;
  for (const auto& row : forward_differences(values)) p.coeffs.push_back(row.front());
  return p;
}

MPInt evaluate(const BinomialPoly& poly, std::uint64_t x) {
  MPInt acc(0, poly.limbs());
  for (std::size_t j = 0; j < poly.coeffs.size(); ++j) {
    acc = acc + poly.coeffs[j] * binomial(x, static_cast<unsigned>(j), poly.limbs());
  }
  return acc;
}

BinomialPoly straightforward_shift(const BinomialPoly& poly, std::uint64_t shift) {
  const std::size_t n = poly.coeffs.size();
  std::vector<MPInt> b;
  for (std::size_t m = 0; m < n; ++m) b.push_back(binomial(shift, static_cast<unsigned>(m), poly.limbs()));
  BinomialPoly out;
  out.frac_bits = poly.frac_bits;
  for (std::size_t l = 0; l < n; ++l) {
    MPInt acc(0, poly.limbs());
    for (std::size_t m = l; m < n; ++m) acc = acc + poly.coeffs[m] * b[m - l];
    out.coeffs.push_back(std::move(acc));
  }
  return out;
}

void tabulated_shift_step(std::span<MPInt> column) {
  for (std::size_t l = 0; l + 1 < column.size(); ++l) column[l] = column[l] + column[l + 1];
}

std::vector<BinomialPoly> hierarchical_split(const BinomialPoly& r, std::uint64_t stride) {
  const int deg = r.degree();
  std::vector<BinomialPoly> out;
  for (int j = 0; j <= deg; ++j) {
    std::vector<MPInt> values;
    for (int i = 0; i <= deg - j; ++i) {
      MPInt acc(0, r.limbs());
      for (int l = j; l <= deg; ++l) {
        acc = acc + r.coeffs[static_cast<std::size_t>(l)] *
                        binomial(static_cast<std::uint64_t>(i) * stride, static_cast<unsigned>(l - j),
                                 r.limbs());
      }
      values.push_back(std::move(acc));
    }
    out.push_back(newton_interpolate(values, r.frac_bits));
  }
  return out;
}

void PolyGenConfig::validate() const {
  if (domain_size == 0 || !std::has_single_bit(domain_size)) {
    throw ConfigError("domain size must be a power of two");
  }
  if (tau == 0 || mu == 0 || nu == 0) throw ConfigError("tau, mu and nu must be positive");
  if (mu * nu != tau || tau / nu != mu) throw ConfigError("tau must equal mu * nu");
  if (degree < 1 || degree > 8) throw ConfigError("approximation degree must be in [1, 8]");
  if (limbs < 2 || limbs > 64) throw ConfigError("limb count must be in [2, 64]");
  if (frac_bits < 64 || static_cast<std::size_t>(frac_bits) + 64 > limbs * 32) {
    throw ConfigError("fraction bits must be at least 64 and leave 64 integer bits");
  }
  if (budget_bits < 0 || budget_bits > 120) throw ConfigError("budget bits out of range");
}

namespace {

struct SuperRange {
  BigFloat lo{64}, hi{64};
  long ulp_exp;
};

SuperRange range_of(const Domain& super, const FpFormat& fmt) {
  SuperRange r;
  r.ulp_exp = long{super.exponent} - fmt.precision;
  mpfr_set_ui_2exp(r.lo.get(), super.first, r.ulp_exp, MPFR_RNDN);
  mpfr_set_ui_2exp(r.hi.get(), super.first + super.count - 1, r.ulp_exp, MPFR_RNDN);
  return r;
}

ScaledReal to_scaled_up(mpfr_srcptr v) {
  if (mpfr_zero_p(v)) return {0, 0};
  mpz_class z;
  mpfr_exp_t e = mpfr_get_z_2exp(z.get_mpz_t(), v);
  return {z, static_cast<long>(e)};
}

}  // namespace

ScaledReal taylor_remainder_bound(const Function& f, const Domain& super, const FpFormat& fmt,
                                  const PolyGenConfig& cfg, int output_exponent) {
  if (f.is_polynomial_of_degree(cfg.degree)) return {0, 0};
  SuperRange r = range_of(super, fmt);
  f.check_range(r.lo.get(), r.hi.get());
  const std::uint64_t xc = super.count / 2;
  const std::uint64_t h = std::max(xc, super.count - 1 - xc);
  BigFloat b(128), t(128);
  f.derivative_bound(b.get(), r.lo.get(), r.hi.get(), cfg.degree + 1);
  // (h ulp)^(d+1) / (d+1)!
  mpfr_set_ui(t.get(), h, MPFR_RNDU);
  mpfr_mul_2si(t.get(), t.get(), r.ulp_exp, MPFR_RNDU);
  mpfr_pow_ui(t.get(), t.get(), static_cast<unsigned long>(cfg.degree + 1), MPFR_RNDU);
  mpfr_mul(b.get(), b.get(), t.get(), MPFR_RNDU);
  mpfr_fac_ui(t.get(), static_cast<unsigned long>(cfg.degree + 1), MPFR_RNDD);
  mpfr_div(b.get(), b.get(), t.get(), MPFR_RNDU);
  mpfr_mul_2si(b.get(), b.get(), fmt.precision - output_exponent, MPFR_RNDU);
  return to_scaled_up(b.get());
}

TaylorApprox taylor_approx(const Function& f, const Domain& super, const FpFormat& fmt,
                           const PolyGenConfig& cfg) {
  const int p = fmt.precision;
  const int F = cfg.frac_bits;
  const int deg = cfg.degree;
  if (super.count < 2) throw ConfigError("super-domain needs at least two arguments");
  SuperRange range = range_of(super, fmt);
  f.check_range(range.lo.get(), range.hi.get());
  const mpfr_prec_t prec = F + p + 256;

  BigFloat y0(prec);
  f.evaluate(y0.get(), range.lo.get(), MPFR_RNDN);
  if (mpfr_sgn(y0.get()) <= 0 || !mpfr_number_p(y0.get())) {
    throw ConfigError(f.name() + " must be positive on the search range");
  }
  TaylorApprox out;
  out.output_exponent = static_cast<int>(mpfr_get_exp(y0.get()));
  const long scale = long{p} - out.output_exponent;

  std::vector<MPInt> samples;
  bool rounded = false;
  BigFloat v(prec);
  mpz_class z;
  if (f.is_polynomial_of_degree(deg)) {
    // Exact samples of the function itself.
    BigFloat x(64);
    for (int i = 0; i <= deg; ++i) {
      mpfr_set_ui_2exp(x.get(), super.first + static_cast<std::uint64_t>(i), range.ulp_exp, MPFR_RNDN);
      rounded |= f.evaluate(v.get(), x.get(), MPFR_RNDN) != 0;
      mpfr_mul_2si(v.get(), v.get(), scale + F, MPFR_RNDN);
      rounded |= !mpfr_integer_p(v.get());
      mpfr_get_z(z.get_mpz_t(), v.get(), MPFR_RNDN);
      samples.push_back(from_mpz(z, cfg.limbs));
    }
  } else {
    // Samples of the Taylor polynomial at the centre xc:
    //   T(x) = sum_j f^(j)(Xc) / j! * ((x - xc) ulp)^j,  in output ulps.
    const std::uint64_t xc = super.count / 2;
    BigFloat xcv(64);
    mpfr_set_ui_2exp(xcv.get(), super.first + xc, range.ulp_exp, MPFR_RNDN);
    std::vector<BigFloat> c;
    long max_exp = LONG_MIN;
    for (int j = 0; j <= deg; ++j) {
      BigFloat cj(prec), fac(prec);
      f.derivative(cj.get(), xcv.get(), j);
      mpfr_fac_ui(fac.get(), static_cast<unsigned long>(j), MPFR_RNDN);
      mpfr_div(cj.get(), cj.get(), fac.get(), MPFR_RNDN);
      mpfr_mul_2si(cj.get(), cj.get(), scale + j * range.ulp_exp, MPFR_RNDN);
      if (!mpfr_zero_p(cj.get())) {
        long h = static_cast<long>(std::bit_width(std::max(xc, super.count - xc)));
        max_exp = std::max(max_exp, static_cast<long>(mpfr_get_exp(cj.get())) + j * h);
      }
      c.push_back(std::move(cj));
    }
    // Every term must be small enough that prec bits leave 2^-(F+64) absolute accuracy.
    if (max_exp != LONG_MIN && max_exp > p + 64) {
      throw ConfigError("Taylor terms too large for the working precision");
    }
    for (int i = 0; i <= deg; ++i) {
      long dx = static_cast<long>(i) - static_cast<long>(xc);
      mpfr_set_zero(v.get(), 1);
      for (int j = deg; j >= 0; --j) {
        mpfr_mul_si(v.get(), v.get(), dx, MPFR_RNDN);
        mpfr_add(v.get(), v.get(), c[static_cast<std::size_t>(j)].get(), MPFR_RNDN);
      }
      mpfr_mul_2si(v.get(), v.get(), F, MPFR_RNDN);
      mpfr_get_z(z.get_mpz_t(), v.get(), MPFR_RNDN);
      samples.push_back(from_mpz(z, cfg.limbs));
    }
    rounded = true;
  }
  out.poly = newton_interpolate(samples, F);

  // Lagrange remainder plus the rounding of the samples carried through the
  // differences: a sample error e becomes 2^j e in coefficient j and
  // binom(x, j) 2^j e in the value at x.
  ScaledReal lag = taylor_remainder_bound(f, super, fmt, cfg, out.output_exponent);
  BigFloat total(256), term(256);
  mpfr_set_z_2exp(total.get(), lag.num.get_mpz_t(), lag.exp2, MPFR_RNDU);
  if (rounded) {
    for (int j = 0; j <= deg; ++j) {
      mpz_class bj;
      mpz_bin_uiui(bj.get_mpz_t(), super.count - 1, static_cast<unsigned long>(j));
      mpfr_set_z_2exp(term.get(), bj.get_mpz_t(), j - F, MPFR_RNDU);
      mpfr_add(total.get(), total.get(), term.get(), MPFR_RNDU);
    }
  }
  out.error_bound = to_scaled_up(total.get());
  if (cfg.budget_bits > 0 && ScaledReal::pow2(-cfg.budget_bits) < out.error_bound) {
    throw ConfigError("approximation error exceeds the budget; use smaller super-domains "
                      "or a higher degree");
  }
  return out;
}

void generate_packets(const std::vector<BinomialPoly>& split, const PolyGenConfig& cfg,
                      unsigned workers, const std::function<void(const Packet&)>& sink) {
  const std::size_t streams = split.size();
  std::vector<std::vector<MPInt>> packets(streams * cfg.mu);
  parallel_for(packets.size(), workers, [&](std::size_t slot) {
    const std::size_t j = slot / cfg.mu;
    const std::uint64_t u = slot % cfg.mu;
    BinomialPoly start = straightforward_shift(split[j], u * cfg.nu);
    auto& col = start.coeffs;
    auto& out = packets[slot];
    out.reserve(cfg.nu);
    for (std::uint64_t i = 0; i < cfg.nu; ++i) {
      out.push_back(col.front());
      if (i + 1 < cfg.nu) tabulated_shift_step(col);
    }
  });
  for (std::size_t j = 0; j < streams; ++j) {
    for (std::uint64_t u = 0; u < cfg.mu; ++u) {
      const auto& vals = packets[j * cfg.mu + u];
      for (std::uint64_t i = 0; i < cfg.nu; ++i) sink({static_cast<int>(j), u, i, vals[i]});
    }
  }
}

std::vector<BinomialPoly> domain_polys(const std::vector<BinomialPoly>& split,
                                       const PolyGenConfig& cfg, unsigned workers) {
  std::vector<BinomialPoly> out(cfg.tau);
  for (auto& p : out) {
    p.frac_bits = split.empty() ? 0 : split.front().frac_bits;
    p.coeffs.resize(split.size());
  }
  generate_packets(split, cfg, workers, [&](const Packet& pk) {
    out[pk.u * cfg.nu + pk.i].coeffs[static_cast<std::size_t>(pk.j)] = pk.value;
  });
  return out;
}

}  // namespace hrsearch
