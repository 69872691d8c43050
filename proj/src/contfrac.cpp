#include "hrsearch/contfrac.hpp"

#include <algorithm>

#include "hrsearch/errors.hpp"

namespace hrsearch {

std::string to_string(Length x) {
  if (x == 0) return "0";
  std::string s;
  while (x != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(x % 10)));
    x /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

CFConfig cf_init(Length numerator, Length modulus) {
  if (numerator == 0 || numerator >= modulus) throw ConfigError("cf_init requires 0 < a < 1");
  CFConfig c;
  c.theta_prev = modulus;
  c.theta_cur = numerator;
  c.q_prev = 0;
  c.q_cur = 1;
  c.k_next = modulus / numerator;
  c.modulus = modulus;
  return c;
}

std::optional<CFConfig> cf_next(const CFConfig& c) {
  if (c.terminal()) return std::nullopt;
  CFConfig n = c;
  if (c.t + 1 < c.k_next) {
    n.theta_prev = c.theta_prev - c.theta_cur;
    n.q_prev = c.q_prev + c.q_cur;
    n.t = c.t + 1;
    return n;
  }
  // The long gap has shrunk below the short one: the roles swap.
  n.i = c.i + 1;
  n.t = 0;
  n.theta_prev = c.theta_cur;
  n.theta_cur = c.theta_prev - c.theta_cur;
  n.q_prev = c.q_cur;
  n.q_cur = c.q_prev + c.q_cur;
  n.k_next = n.theta_cur == 0 ? 0 : n.theta_prev / n.theta_cur;
  return n;
}

std::optional<CFDivStep> cf_next_div(const CFConfig& c) {
  if (c.t != 0) throw ConfigError("cf_next_div requires t == 0");
  if (c.terminal()) return std::nullopt;
  Length k = c.theta_prev / c.theta_cur;
  CFConfig n = c;
  n.i = c.i + 1;
  n.theta_prev = c.theta_cur;
  n.theta_cur = c.theta_prev % c.theta_cur;
  n.q_prev = c.q_cur;
  n.q_cur = c.q_prev + k * c.q_cur;
  n.k_next = n.theta_cur == 0 ? 0 : n.theta_prev / n.theta_cur;
  return CFDivStep{n, k};
}

SplitOrder split_direction(const CFConfig& c) {
  return c.parity() == 0 ? SplitOrder::short_left : SplitOrder::short_right;
}

bool two_length_identity_holds(const CFConfig& c) {
  Length x, y, s;
  if (__builtin_mul_overflow(c.q_cur, c.theta_prev, &x)) return false;
  if (__builtin_mul_overflow(c.q_prev, c.theta_cur, &y)) return false;
  if (__builtin_add_overflow(x, y, &s)) return false;
  return s == c.modulus;
}

}  // namespace hrsearch
