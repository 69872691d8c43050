#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace hrsearch {

// Fixed-width signed integer of L 32-bit limbs in two's complement, least
// significant limb first. L is chosen at run time but every operand of an
// operation must share it. Arithmetic that leaves the representable range
// throws OverflowError instead of wrapping.
class MPInt {
 public:
  using Limb = std::uint32_t;
  static constexpr int kLimbBits = 32;

  MPInt() = default;
  explicit MPInt(std::size_t limbs) : limbs_(limbs, 0) {}
  MPInt(std::int64_t value, std::size_t limbs);

  static MPInt from_limbs(std::vector<Limb> limbs) {
    MPInt r;
    r.limbs_ = std::move(limbs);
    return r;
  }

  std::size_t limb_count() const { return limbs_.size(); }
  int width() const { return static_cast<int>(limbs_.size()) * kLimbBits; }
  const std::vector<Limb>& limbs() const { return limbs_; }

  bool is_negative() const { return !limbs_.empty() && (limbs_.back() >> 31) != 0; }
  bool is_zero() const;

  // Bits [pos, pos + count) of the infinite two's complement expansion,
  // count <= 64. For a value scaled by 2^F, bits(F - 64, 64) is the
  // fractional part floored to 64 bits, for either sign.
  std::uint64_t bits(int pos, int count) const;

  // Number of significant bits of a nonnegative value; 0 for zero.
  int bit_length() const;

  MPInt negated() const;
  MPInt abs() const { return is_negative() ? negated() : *this; }

  // Hex in two's complement, most significant limb first.
  std::string to_hex() const;
  // Signed decimal.
  std::string to_string() const;

  friend bool operator==(const MPInt&, const MPInt&) = default;
  friend std::strong_ordering operator<=>(const MPInt& x, const MPInt& y);

 private:
  std::vector<Limb> limbs_;
};

MPInt mp_add(const MPInt& x, const MPInt& y);
MPInt mp_sub(const MPInt& x, const MPInt& y);
MPInt mp_mul(const MPInt& x, const MPInt& y);
MPInt mp_mul_small(const MPInt& x, std::uint64_t k);
// x / k where k divides x exactly.
MPInt mp_divexact_small(const MPInt& x, std::uint64_t k);
// x * 2^k, checked.
MPInt mp_shl(const MPInt& x, int k);

inline MPInt operator+(const MPInt& x, const MPInt& y) { return mp_add(x, y); }
inline MPInt operator-(const MPInt& x, const MPInt& y) { return mp_sub(x, y); }
inline MPInt operator*(const MPInt& x, const MPInt& y) { return mp_mul(x, y); }

}  // namespace hrsearch
