#include "hrsearch/fpmodel.hpp"

#include <bit>
#include <cmath>

namespace hrsearch {

namespace {

// Both operands brought to the smaller exponent.
void align(const ScaledReal& x, const ScaledReal& y, mpz_class& a, mpz_class& b, long& e) {
  e = std::min(x.exp2, y.exp2);
  mpz_mul_2exp(a.get_mpz_t(), x.num.get_mpz_t(), static_cast<mp_bitcnt_t>(x.exp2 - e));
  mpz_mul_2exp(b.get_mpz_t(), y.num.get_mpz_t(), static_cast<mp_bitcnt_t>(y.exp2 - e));
}

long bit_length(const mpz_class& n) {
  return sgn(n) == 0 ? 0 : static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 2));
}

}  // namespace

ScaledReal ScaledReal::from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("from_double: non-finite value");
  int e;
  double m = std::frexp(x, &e);
  // m has at most 53 significant bits.
  auto scaled = static_cast<std::int64_t>(std::ldexp(m, 53));
  return {mpz_class(static_cast<long>(scaled)), static_cast<long>(e) - 53};
}

double ScaledReal::to_double() const {
  long e;
  double d = mpz_get_d_2exp(&e, num.get_mpz_t());
  return std::ldexp(d, static_cast<int>(e + exp2));
}

std::string ScaledReal::to_string() const {
  return num.get_str() + "*2^" + std::to_string(exp2);
}

int compare(const ScaledReal& x, const ScaledReal& y) {
  mpz_class a, b;
  long e;
  align(x, y, a, b, e);
  return cmp(a, b);
}

ScaledReal operator+(const ScaledReal& x, const ScaledReal& y) {
  mpz_class a, b;
  long e;
  align(x, y, a, b, e);
  return {a + b, e};
}

ScaledReal operator-(const ScaledReal& x, const ScaledReal& y) {
  mpz_class a, b;
  long e;
  align(x, y, a, b, e);
  return {a - b, e};
}

void FpFormat::validate() const {
  if (precision < 2 || precision > 63) throw ConfigError("precision must be in [2, 63]");
  if (eps_bits < 1 || eps_bits > 62) throw ConfigError("eps-bits must be in [1, 62]");
}

MantissaExponent mantissa_exponent(const ScaledReal& x) {
  if (sgn(x.num) <= 0) throw DomainError("mantissa_exponent requires x > 0");
  long b = bit_length(x.num);
  return {{x.num, -b}, b + x.exp2};
}

ScaledReal dist_p_exact(const ScaledReal& x, int p) {
  long b = bit_length(x.num);
  if (b == 0) throw DomainError("dist_p of zero");
  // 2^p m(x) = |num| * 2^(p - b)
  long frac_bits = b - p;
  if (frac_bits <= 0) return {0, 0};
  mpz_class n = abs(x.num);
  mpz_class unit = mpz_class(1) << static_cast<mp_bitcnt_t>(frac_bits);
  mpz_class r;
  mpz_fdiv_r_2exp(r.get_mpz_t(), n.get_mpz_t(), static_cast<mp_bitcnt_t>(frac_bits));
  mpz_class other = unit - r;
  return {r < other ? r : other, -frac_bits};
}

UFrac dist_p(const ScaledReal& x, int p) {
  ScaledReal d = dist_p_exact(x, p);
  mpz_class raw;
  long shift = d.exp2 + 64;
  if (shift >= 0) {
    raw = d.num << static_cast<mp_bitcnt_t>(shift);
  } else {
    mpz_fdiv_q_2exp(raw.get_mpz_t(), d.num.get_mpz_t(), static_cast<mp_bitcnt_t>(-shift));
  }
  return UFrac::from_raw(raw.get_ui());
}

bool is_hr_case(const ScaledReal& x, const FpFormat& fmt) {
  long b = bit_length(x.num);
  if (b == 0) throw DomainError("is_hr_case of zero");
  long frac_bits = b - fmt.precision;
  // Work in units of 2^-k with k covering both the fraction and eps.
  long k = std::max<long>(frac_bits, fmt.eps_bits);
  mpz_class one = mpz_class(1) << static_cast<mp_bitcnt_t>(k);
  mpz_class f;  // frac(2^p m(x)) * 2^k
  mpz_class n = abs(x.num);
  if (frac_bits <= 0) {
    f = 0;
  } else {
    mpz_fdiv_r_2exp(f.get_mpz_t(), n.get_mpz_t(), static_cast<mp_bitcnt_t>(frac_bits));
    f <<= static_cast<mp_bitcnt_t>(k - frac_bits);
  }
  mpz_class eps = mpz_class(1) << static_cast<mp_bitcnt_t>(k - fmt.eps_bits);
  mpz_class t = f + eps;
  if (t >= one) t -= one;
  return t > 0 && t < 2 * eps;
}

bool is_hr_case_two_sided(const ScaledReal& x, const FpFormat& fmt) {
  return dist_p_exact(x, fmt.precision) < fmt.eps();
}

double PFloat::to_double(int p) const {
  return std::ldexp(static_cast<double>(significand), exponent - p);
}

std::uint64_t PFloat::to_bits(int p) const {
  if (p > 53) throw ConfigError("binary64 encoding needs p <= 53");
  return std::bit_cast<std::uint64_t>(to_double(p));
}

std::uint64_t arg_index(const PFloat& x, const Domain& d) {
  if (x.exponent != d.exponent || x.significand < d.first ||
      x.significand - d.first >= d.count) {
    throw DomainError("argument outside domain");
  }
  return x.significand - d.first;
}

PFloat arg_unindex(std::uint64_t i, const Domain& d) {
  if (i >= d.count) throw DomainError("index outside domain");
  return d.at(i);
}

BinadeSplit::BinadeSplit(int binade, const FpFormat& fmt, std::uint64_t domain_size)
    : first_(std::uint64_t{1} << (fmt.precision - 1)),
      exponent_(binade + 1),
      size_(domain_size) {
  fmt.validate();
  if (domain_size == 0 || !std::has_single_bit(domain_size) || domain_size > first_) {
    throw ConfigError("domain size must be a power of two dividing 2^(p-1)");
  }
  count_ = first_ / domain_size;
}

Domain BinadeSplit::at(std::uint64_t i) const {
  if (i >= count_) throw DomainError("domain index outside binade");
  return {first_ + i * size_, exponent_, size_, i};
}

}  // namespace hrsearch
