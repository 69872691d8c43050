#pragma once

#include <cstdint>
#include <random>

#include <gmpxx.h>

#include "hrsearch/fixedpoint.hpp"

namespace hrsearch::test {

// Fixed seeds: every generator in the tests is reproducible.
inline std::mt19937_64 make_rng(std::uint64_t salt = 0) { return std::mt19937_64(0x5eed1234u + salt); }

inline std::uint64_t uniform(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

// floor(num * 2^W / den), computed independently of Frac::from_ratio.
template <FracWord Word>
Frac<Word> frac_oracle(const mpq_class& x) {
  constexpr int w = Frac<Word>::kBits;
  mpz_class scaled = x.get_num();
  scaled <<= w;
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), x.get_den().get_mpz_t());
  mpz_class mod = mpz_class(1) << w;
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), q.get_mpz_t(), mod.get_mpz_t());
  return Frac<Word>::from_raw(static_cast<Word>(mpz_get_ui(r.get_mpz_t())));
}

template <FracWord Word>
mpq_class to_rational(Frac<Word> x) {
  mpq_class q(mpz_class(static_cast<unsigned long>(x.raw())), mpz_class(1) << Frac<Word>::kBits);
  q.canonicalize();
  return q;
}

}  // namespace hrsearch::test
