#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hrsearch/fixedpoint.hpp"

namespace hrsearch {

// Lengths and point counts in units of 1/modulus. 128 bits hold the modulus
// 2^64 of a 64-bit fraction as well as the final point count.
using Length = unsigned __int128;

std::string to_string(Length x);

// One configuration (i, t) of the three-distance placement of the points
// {k a}, k = 0..n-1, with n = q_cur + q_prev. Gaps come in two lengths,
// theta_cur (short) and theta_prev (long, already reduced t times).
struct CFConfig {
  int i = 0;
  Length t = 0;
  Length theta_cur = 0;
  Length theta_prev = 0;
  Length q_cur = 0;
  Length q_prev = 0;
  Length k_next = 0;  // partial quotient governing the steps within level i
  Length modulus = 0;

  Length points() const { return q_cur + q_prev; }
  int parity() const { return i & 1; }
  // a is rational, so the expansion ends once the short gap vanishes.
  bool terminal() const { return theta_cur == 0; }
  friend bool operator==(const CFConfig&, const CFConfig&) = default;
};

// Configuration (0, 0) for a = numerator / modulus, 0 < a < 1.
CFConfig cf_init(Length numerator, Length modulus);

template <FracWord Word>
CFConfig cf_init(Frac<Word> a) {
  return cf_init(a.raw(), Length{1} << Frac<Word>::kBits);
}

// Next configuration, one point added per step inside a level. Empty once
// the configuration is terminal.
std::optional<CFConfig> cf_next(const CFConfig& c);

// Jump straight to configuration (i + 1, 0) using one division. Requires
// t == 0; empty once terminal.
struct CFDivStep {
  CFConfig config;
  Length quotient;
};
std::optional<CFDivStep> cf_next_div(const CFConfig& c);

// Where the short piece lands when the next point splits a long gap. On even
// levels the new short gap sits on the left of the split gap.
enum class SplitOrder { short_left, short_right };
SplitOrder split_direction(const CFConfig& c);

// q_cur * theta_prev + q_prev * theta_cur == modulus, with overflow checked.
bool two_length_identity_holds(const CFConfig& c);

}  // namespace hrsearch
