#pragma once

#include <bit>
#include <cmath>
#include <compare>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

#include "hrsearch/errors.hpp"

namespace hrsearch {

template <typename T>
concept FracWord = std::same_as<T, std::uint32_t> || std::same_as<T, std::uint64_t>;

template <FracWord Word>
struct WideOf;
template <>
struct WideOf<std::uint32_t> {
  using type = std::uint64_t;
};
template <>
struct WideOf<std::uint64_t> {
  using type = unsigned __int128;
};

// A number in [0, 1) stored as floor(x * 2^W). Addition and subtraction wrap
// around, which is exactly arithmetic modulo 1.
template <FracWord Word>
class Frac {
 public:
  using word_type = Word;
  using wide_type = typename WideOf<Word>::type;
  static constexpr int kBits = std::numeric_limits<Word>::digits;

  constexpr Frac() = default;

  static constexpr Frac from_raw(Word raw) {
    Frac f;
    f.raw_ = raw;
    return f;
  }

  // floor(num * 2^W / den). Requires num < den.
  static constexpr Frac from_ratio(std::uint64_t num, std::uint64_t den) {
    if (den == 0) throw DivisionByZero("from_ratio: zero denominator");
    if (num >= den) throw ConfigError("from_ratio: value not in [0, 1)");
    unsigned __int128 scaled = static_cast<unsigned __int128>(num) << kBits;
    return from_raw(static_cast<Word>(scaled / den));
  }

  // 2^-k for 1 <= k <= W.
  static constexpr Frac pow2(int k) {
    if (k < 1 || k > kBits) throw ConfigError("pow2: exponent out of range");
    return from_raw(static_cast<Word>(Word{1} << (kBits - k)));
  }

  static constexpr Frac max() { return from_raw(std::numeric_limits<Word>::max()); }

  constexpr Word raw() const { return raw_; }
  constexpr bool is_zero() const { return raw_ == 0; }
  double to_double() const { return std::ldexp(static_cast<double>(raw_), -kBits); }

  friend constexpr Frac operator+(Frac x, Frac y) {
    return from_raw(static_cast<Word>(x.raw_ + y.raw_));
  }
  friend constexpr Frac operator-(Frac x, Frac y) {
    return from_raw(static_cast<Word>(x.raw_ - y.raw_));
  }
  Frac& operator+=(Frac y) { return *this = *this + y; }
  Frac& operator-=(Frac y) { return *this = *this - y; }

  friend constexpr auto operator<=>(Frac, Frac) = default;

 private:
  Word raw_ = 0;
};

using UFrac = Frac<std::uint64_t>;
using UFrac32 = Frac<std::uint32_t>;

template <FracWord Word>
constexpr Frac<Word> frac_add_mod1(Frac<Word> x, Frac<Word> y) {
  return x + y;
}

template <FracWord Word>
constexpr Frac<Word> frac_sub_mod1(Frac<Word> x, Frac<Word> y) {
  return x - y;
}

// How a quotient floor(q / p) is obtained.
//   subtractive: repeated subtraction only
//   hardware:    the machine divide instruction
//   hybrid:      one subtraction, then a divide if the remainder is still >= p
enum class DivisionMode { subtractive, hardware, hybrid };

constexpr std::string_view to_string(DivisionMode m) {
  switch (m) {
    case DivisionMode::subtractive: return "subtractive";
    case DivisionMode::hardware: return "hardware";
    case DivisionMode::hybrid: return "hybrid";
  }
  return "?";
}

inline std::optional<DivisionMode> parse_division_mode(std::string_view s) {
  if (s == "subtractive") return DivisionMode::subtractive;
  if (s == "hardware") return DivisionMode::hardware;
  if (s == "hybrid") return DivisionMode::hybrid;
  return std::nullopt;
}

template <typename Q, typename R>
struct Division {
  Q quotient;
  R remainder;
  friend bool operator==(const Division&, const Division&) = default;
};

namespace detail {

template <typename T>
constexpr int clz(T x) {
  if constexpr (sizeof(T) == 16) {
    auto hi = static_cast<std::uint64_t>(x >> 64);
    return hi != 0 ? std::countl_zero(hi) : 64 + std::countl_zero(static_cast<std::uint64_t>(x));
  } else {
    return std::countl_zero(x);
  }
}

template <typename T>
constexpr Division<T, T> divide(T num, T den, DivisionMode mode) {
  if (den == 0) throw DivisionByZero("division by a zero length");
  switch (mode) {
    case DivisionMode::subtractive: {
      // Shift-and-subtract long division: no divide instruction, and at most
      // W steps even for huge quotients.
      T k = 0;
      if (num < den) return {0, num};
      int shift = clz(den) - clz(num);
      for (; shift >= 0; --shift) {
        T d = den << shift;
        k <<= 1;
        if (num >= d) {
          num -= d;
          k |= 1;
        }
      }
      return {k, num};
    }
    case DivisionMode::hybrid:
      if (num < den) return {0, num};
      num -= den;
      if (num < den) return {1, num};
      return {num / den + 1, num % den};
    case DivisionMode::hardware:
      break;
  }
  return {num / den, num % den};
}

}  // namespace detail

template <FracWord Word>
using FracDivision = Division<std::uint64_t, Frac<Word>>;

// floor(q / p) and q mod p.
template <FracWord Word>
constexpr FracDivision<Word> frac_div(Frac<Word> q, Frac<Word> p, DivisionMode mode) {
  auto r = detail::divide<Word>(q.raw(), p.raw(), mode);
  return {static_cast<std::uint64_t>(r.quotient), Frac<Word>::from_raw(r.remainder)};
}

// floor(1 / p) and 1 mod p. The quotient can reach 2^W so it is returned wide.
template <FracWord Word>
constexpr Division<typename Frac<Word>::wide_type, Frac<Word>> unit_div(Frac<Word> p,
                                                                        DivisionMode mode) {
  using Wide = typename Frac<Word>::wide_type;
  Wide one = Wide{1} << Frac<Word>::kBits;
  auto r = detail::divide<Wide>(one, p.raw(), mode);
  return {r.quotient, Frac<Word>::from_raw(static_cast<Word>(r.remainder))};
}

// Saturating counter arithmetic. Point counts never need to exceed the
// domain size, so clamping at the top only ever delays nothing.
constexpr std::uint64_t sat_add(std::uint64_t x, std::uint64_t y) {
  std::uint64_t r;
  return __builtin_add_overflow(x, y, &r) ? std::numeric_limits<std::uint64_t>::max() : r;
}

template <typename T>
constexpr std::uint64_t sat_mul(T k, std::uint64_t y) {
  if (y == 0 || k == 0) return 0;
  if (k > std::numeric_limits<std::uint64_t>::max() / y) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(k) * y;
}

}  // namespace hrsearch
