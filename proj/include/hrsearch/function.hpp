#pragma once

#include <mpfr.h>

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace hrsearch {

// RAII holder for an MPFR number.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  BigFloat(mpfr_prec_t prec, mpfr_srcptr x, mpfr_rnd_t rnd = MPFR_RNDN) : BigFloat(prec) {
    mpfr_set(v_, x, rnd);
  }
  ~BigFloat() { mpfr_clear(v_); }
  BigFloat(const BigFloat&) = delete;
  BigFloat& operator=(const BigFloat&) = delete;
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

 private:
  mpfr_t v_;
};

// A univariate real function with the evaluations the search needs.
class Function {
 public:
  virtual ~Function() = default;

  virtual std::string name() const = 0;

  // Correctly rounded f(x) at y's precision; returns the MPFR ternary value,
  // zero meaning y is exact.
  virtual int evaluate(mpfr_ptr y, mpfr_srcptr x, mpfr_rnd_t rnd = MPFR_RNDN) const = 0;

  // f^(k)(x) at y's precision with relative error at most 2^(4 - prec(y)).
  virtual void derivative(mpfr_ptr y, mpfr_srcptr x, int k) const = 0;

  // An upper bound on |f^(k)| over [lo, hi], rounded upwards.
  virtual void derivative_bound(mpfr_ptr y, mpfr_srcptr lo, mpfr_srcptr hi, int k) const = 0;

  // Throws DomainError unless f is defined on [lo, hi].
  virtual void check_range(mpfr_srcptr lo, mpfr_srcptr hi) const = 0;

  // True when every derivative above `degree` vanishes identically.
  virtual bool is_polynomial_of_degree(int /*degree*/) const { return false; }
};

std::unique_ptr<Function> make_exp();
std::unique_ptr<Function> make_exp2();
std::unique_ptr<Function> make_log();
// Coefficients c_0, c_1, ... of sum c_i x^i. Each must be a finite dyadic
// number, so evaluation can be carried out exactly.
std::unique_ptr<Function> make_polynomial(const std::vector<std::string>& coefficients);
// One coefficient per line (blank lines and '#' comments ignored).
std::unique_ptr<Function> load_polynomial_file(const std::string& path);

// "exp", "exp2", "log".
std::unique_ptr<Function> make_function(std::string_view name);

}  // namespace hrsearch
