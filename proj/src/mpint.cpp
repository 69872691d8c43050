#include "hrsearch/mpint.hpp"

#include <algorithm>
#include <bit>

#include "hrsearch/errors.hpp"
#include "hrsearch/mpint_gmp.hpp"

namespace hrsearch {

namespace {

void require_same_width(const MPInt& x, const MPInt& y) {
  if (x.limb_count() != y.limb_count() || x.limb_count() == 0) {
    throw ConfigError("MPInt operands have different limb counts");
  }
}

bool sign_of(const std::vector<MPInt::Limb>& v) { return (v.back() >> 31) != 0; }

// Two's complement negation of the raw bit pattern, no range check.
std::vector<MPInt::Limb> negate_bits(std::vector<MPInt::Limb> v) {
  std::uint64_t carry = 1;
  for (auto& l : v) {
    std::uint64_t s = static_cast<std::uint64_t>(static_cast<MPInt::Limb>(~l)) + carry;
    l = static_cast<MPInt::Limb>(s);
    carry = s >> 32;
  }
  return v;
}

// Unsigned magnitude limbs plus the sign. The magnitude of -2^(w-1) is
// 2^(w-1), which still fits in w unsigned bits.
std::vector<MPInt::Limb> magnitude(const MPInt& x, bool& negative) {
  negative = x.is_negative();
  return negative ? negate_bits(x.limbs()) : x.limbs();
}

MPInt apply_sign(std::vector<MPInt::Limb> mag, bool negative) {
  if (!sign_of(mag)) {
    return MPInt::from_limbs(negative ? negate_bits(std::move(mag)) : std::move(mag));
  }
  // Top bit set: only -2^(w-1) is representable.
  bool is_min = negative && mag.back() == 0x80000000u &&
                std::all_of(mag.begin(), mag.end() - 1, [](MPInt::Limb l) { return l == 0; });
  if (!is_min) throw OverflowError("MPInt overflow");
  return MPInt::from_limbs(std::move(mag));
}

}  // namespace

MPInt::MPInt(std::int64_t value, std::size_t limbs) : limbs_(limbs, 0) {
  if (limbs == 0) throw ConfigError("MPInt needs at least one limb");
  auto u = static_cast<std::uint64_t>(value);
  Limb fill = value < 0 ? ~Limb{0} : 0;
  for (std::size_t i = 0; i < limbs; ++i) {
    limbs_[i] = i < 2 ? static_cast<Limb>(u >> (32 * i)) : fill;
  }
  if (limbs == 1 && (value > INT32_MAX || value < INT32_MIN)) {
    throw OverflowError("value does not fit in one limb");
  }
}

bool MPInt::is_zero() const {
  return std::all_of(limbs_.begin(), limbs_.end(), [](Limb l) { return l == 0; });
}

std::uint64_t MPInt::bits(int pos, int count) const {
  if (count < 0 || count > 64) throw ConfigError("bits: count out of range");
  std::uint64_t out = 0;
  const Limb fill = is_negative() ? ~Limb{0} : 0;
  for (int i = 0; i < count; ++i) {
    int b = pos + i;
    std::uint64_t bit;
    if (b < 0) {
      bit = 0;
    } else if (b >= width()) {
      bit = fill & 1u;
    } else {
      bit = (limbs_[b / 32] >> (b % 32)) & 1u;
    }
    out |= bit << i;
  }
  return out;
}

int MPInt::bit_length() const {
  if (is_negative()) throw ConfigError("bit_length of a negative value");
  for (std::size_t i = limbs_.size(); i-- > 0;) {
    if (limbs_[i] != 0) return static_cast<int>(i) * 32 + 32 - std::countl_zero(limbs_[i]);
  }
  return 0;
}

MPInt MPInt::negated() const {
  MPInt r = from_limbs(negate_bits(limbs_));
  // -(-2^(w-1)) is not representable.
  if (is_negative() && r.is_negative()) throw OverflowError("MPInt negation overflow");
  return r;
}

std::string MPInt::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (std::size_t i = limbs_.size(); i-- > 0;) {
    for (int sh = 28; sh >= 0; sh -= 4) s.push_back(digits[(limbs_[i] >> sh) & 0xf]);
  }
  return s;
}

std::string MPInt::to_string() const { return to_mpz(*this).get_str(); }

std::strong_ordering operator<=>(const MPInt& x, const MPInt& y) {
  require_same_width(x, y);
  bool nx = x.is_negative(), ny = y.is_negative();
  if (nx != ny) return nx ? std::strong_ordering::less : std::strong_ordering::greater;
  for (std::size_t i = x.limb_count(); i-- > 0;) {
    if (x.limbs()[i] != y.limbs()[i]) {
      return x.limbs()[i] < y.limbs()[i] ? std::strong_ordering::less
                                         : std::strong_ordering::greater;
    }
  }
  return std::strong_ordering::equal;
}

MPInt mp_add(const MPInt& x, const MPInt& y) {
  require_same_width(x, y);
  std::vector<MPInt::Limb> r(x.limb_count());
  std::uint64_t carry = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::uint64_t s = std::uint64_t{x.limbs()[i]} + y.limbs()[i] + carry;
    r[i] = static_cast<MPInt::Limb>(s);
    carry = s >> 32;
  }
  bool sx = x.is_negative(), sy = y.is_negative(), sr = sign_of(r);
  if (sx == sy && sr != sx) throw OverflowError("MPInt addition overflow");
  return MPInt::from_limbs(std::move(r));
}

MPInt mp_sub(const MPInt& x, const MPInt& y) {
  require_same_width(x, y);
  std::vector<MPInt::Limb> r(x.limb_count());
  std::int64_t borrow = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::int64_t d = std::int64_t{x.limbs()[i]} - y.limbs()[i] - borrow;
    borrow = d < 0 ? 1 : 0;
    r[i] = static_cast<MPInt::Limb>(d);
  }
  bool sx = x.is_negative(), sy = y.is_negative(), sr = sign_of(r);
  if (sx != sy && sr != sx) throw OverflowError("MPInt subtraction overflow");
  return MPInt::from_limbs(std::move(r));
}

MPInt mp_mul(const MPInt& x, const MPInt& y) {
  require_same_width(x, y);
  bool nx, ny;
  auto a = magnitude(x, nx);
  auto b = magnitude(y, ny);
  const std::size_t n = a.size();
  std::vector<std::uint32_t> prod(2 * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t carry = 0;
    for (std::size_t j = 0; j < n; ++j) {
      std::uint64_t t = std::uint64_t{a[i]} * b[j] + prod[i + j] + carry;
      prod[i + j] = static_cast<std::uint32_t>(t);
      carry = t >> 32;
    }
    prod[i + n] = static_cast<std::uint32_t>(carry);
  }
  for (std::size_t i = n; i < 2 * n; ++i) {
    if (prod[i] != 0) throw OverflowError("MPInt multiplication overflow");
  }
  prod.resize(n);
  return apply_sign(std::move(prod), nx != ny);
}

MPInt mp_mul_small(const MPInt& x, std::uint64_t k) {
  bool nx;
  auto a = magnitude(x, nx);
  std::vector<MPInt::Limb> r(a.size());
  unsigned __int128 carry = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    unsigned __int128 t = static_cast<unsigned __int128>(a[i]) * k + carry;
    r[i] = static_cast<MPInt::Limb>(t);
    carry = t >> 32;
  }
  if (carry != 0) throw OverflowError("MPInt multiplication overflow");
  return apply_sign(std::move(r), nx);
}

MPInt mp_divexact_small(const MPInt& x, std::uint64_t k) {
  if (k == 0) throw DivisionByZero("mp_divexact_small by zero");
  bool nx;
  auto a = magnitude(x, nx);
  std::vector<MPInt::Limb> r(a.size());
  unsigned __int128 rem = 0;
  for (std::size_t i = a.size(); i-- > 0;) {
    unsigned __int128 cur = (rem << 32) | a[i];
    r[i] = static_cast<MPInt::Limb>(cur / k);
    rem = cur % k;
  }
  if (rem != 0) throw ConfigError("mp_divexact_small: divisor does not divide value");
  return apply_sign(std::move(r), nx);
}

MPInt mp_shl(const MPInt& x, int k) {
  if (k < 0) throw ConfigError("mp_shl: negative shift");
  MPInt r = x;
  while (k > 0) {
    int step = k < 62 ? k : 62;
    r = mp_mul_small(r, std::uint64_t{1} << step);
    k -= step;
  }
  return r;
}

mpz_class to_mpz(const MPInt& x) {
  bool neg;
  auto mag = magnitude(x, neg);
  mpz_class r;
  mpz_import(r.get_mpz_t(), mag.size(), -1, sizeof(MPInt::Limb), 0, 0, mag.data());
  if (neg) r = -r;
  return r;
}

MPInt from_mpz(const mpz_class& x, std::size_t limbs) {
  if (limbs == 0) throw ConfigError("MPInt needs at least one limb");
  mpz_class mag = abs(x);
  if (mpz_sizeinbase(mag.get_mpz_t(), 2) > limbs * 32) {
    throw OverflowError("value does not fit in MPInt");
  }
  std::vector<MPInt::Limb> r(limbs, 0);
  std::size_t count = 0;
  mpz_export(r.data(), &count, -1, sizeof(MPInt::Limb), 0, 0, mag.get_mpz_t());
  return apply_sign(std::move(r), sgn(x) < 0);
}

}  // namespace hrsearch
