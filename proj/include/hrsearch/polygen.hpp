#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hrsearch/fpmodel.hpp"
#include "hrsearch/function.hpp"
#include "hrsearch/mpint.hpp"

namespace hrsearch {

// sum_j coeffs[j] * binom(x, j), every coefficient scaled by 2^frac_bits.
// Coefficient j is the j-th forward difference of the polynomial at 0.
struct BinomialPoly {
  std::vector<MPInt> coeffs;
  int frac_bits = 0;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  std::size_t limbs() const { return coeffs.empty() ? 0 : coeffs.front().limb_count(); }
  friend bool operator==(const BinomialPoly&, const BinomialPoly&) = default;
};

// binom(n, k) as an MPInt.
MPInt binomial(std::uint64_t n, unsigned k, std::size_t limbs);

// Rows of the difference table: row 0 is the input, row j has the j-th
// differences.
std::vector<std::vector<MPInt>> forward_differences(std::span<const MPInt> values);

// The unique polynomial of degree < values.size() through (x, values[x]).
BinomialPoly newton_interpolate(std::span<const MPInt> values, int frac_bits);

// P(x) by summing the basis directly.
MPInt evaluate(const BinomialPoly& poly, std::uint64_t x);

// Coefficients of P(x + shift): c'_l = sum_{m >= l} c_m binom(shift, m - l).
BinomialPoly straightforward_shift(const BinomialPoly& poly, std::uint64_t shift);

// Advances a difference column by one: c_l += c_{l+1}, additions only.
void tabulated_shift_step(std::span<MPInt> column);

// The j-th differences of R at stride N, Delta^j[R](i N) as a polynomial in
// i, for j = 0..degree: sum_l c_l binom(i N, l - j).
std::vector<BinomialPoly> hierarchical_split(const BinomialPoly& r, std::uint64_t stride);

// Layout of one super-domain of tau = mu * nu domains of N arguments each.
struct PolyGenConfig {
  std::uint64_t tau = 0;  // 0 picks a value automatically
  std::uint64_t mu = 0;
  std::uint64_t nu = 0;
  std::uint64_t domain_size = 0;
  int degree = 2;
  std::size_t limbs = 8;
  int frac_bits = 128;
  // The approximation error may use at most 2^-budget_bits of an output ulp.
  int budget_bits = 0;

  // Checks the arithmetic relations only; nothing is allocated, so the large
  // production layouts validate too.
  void validate() const;
};

// A polynomial standing in for 2^(p - output_exponent) f on a super-domain,
// with an upper bound on its error in output ulps.
struct TaylorApprox {
  BinomialPoly poly;
  int output_exponent = 0;
  ScaledReal error_bound;
};

// Upper bound of the Lagrange remainder of the degree-`degree` expansion at
// the centre, in output ulps.
ScaledReal taylor_remainder_bound(const Function& f, const Domain& super, const FpFormat& fmt,
                                  const PolyGenConfig& cfg, int output_exponent);

// Throws ConfigError if the total error bound exceeds the budget.
TaylorApprox taylor_approx(const Function& f, const Domain& super, const FpFormat& fmt,
                           const PolyGenConfig& cfg);

// One coefficient value: stream j, packet u, index i within the packet.
struct Packet {
  int j;
  std::uint64_t u;
  std::uint64_t i;
  MPInt value;
};

// Coefficient streams for the tau domains of a super-domain. Packet u of
// stream j is started by a straightforward shift to u * nu and continued
// with tabulated steps. Packets are built with up to `workers` threads; the
// callback sees them in (j, u, i) order.
void generate_packets(const std::vector<BinomialPoly>& split, const PolyGenConfig& cfg,
                      unsigned workers, const std::function<void(const Packet&)>& sink);

// The polynomials of the tau domains, assembled from the streams.
std::vector<BinomialPoly> domain_polys(const std::vector<BinomialPoly>& split,
                                       const PolyGenConfig& cfg, unsigned workers);

}  // namespace hrsearch
