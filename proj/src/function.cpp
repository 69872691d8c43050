#include "hrsearch/function.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "hrsearch/errors.hpp"

namespace hrsearch {

namespace {

mpfr_prec_t guard_prec(mpfr_srcptr y) { return mpfr_get_prec(y) + 32; }

class Exp : public Function {
 public:
  std::string name() const override { return "exp"; }
  int evaluate(mpfr_ptr y, mpfr_srcptr x, mpfr_rnd_t rnd) const override {
    return mpfr_exp(y, x, rnd);
  }
  void derivative(mpfr_ptr y, mpfr_srcptr x, int) const override { mpfr_exp(y, x, MPFR_RNDN); }
  void derivative_bound(mpfr_ptr y, mpfr_srcptr, mpfr_srcptr hi, int) const override {
    mpfr_exp(y, hi, MPFR_RNDU);
  }
  void check_range(mpfr_srcptr, mpfr_srcptr) const override {}
};

class Exp2 : public Function {
 public:
  std::string name() const override { return "exp2"; }
  int evaluate(mpfr_ptr y, mpfr_srcptr x, mpfr_rnd_t rnd) const override {
    return mpfr_exp2(y, x, rnd);
  }
  // ln(2)^k 2^x
  void derivative(mpfr_ptr y, mpfr_srcptr x, int k) const override {
    BigFloat l(guard_prec(y)), e(guard_prec(y));
    mpfr_const_log2(l.get(), MPFR_RNDN);
    mpfr_pow_ui(l.get(), l.get(), static_cast<unsigned long>(k), MPFR_RNDN);
    mpfr_exp2(e.get(), x, MPFR_RNDN);
    mpfr_mul(y, l.get(), e.get(), MPFR_RNDN);
  }
  void derivative_bound(mpfr_ptr y, mpfr_srcptr, mpfr_srcptr hi, int k) const override {
    BigFloat l(guard_prec(y)), e(guard_prec(y));
    mpfr_const_log2(l.get(), MPFR_RNDU);
    mpfr_pow_ui(l.get(), l.get(), static_cast<unsigned long>(k), MPFR_RNDU);
    mpfr_exp2(e.get(), hi, MPFR_RNDU);
    mpfr_mul(y, l.get(), e.get(), MPFR_RNDU);
  }
  void check_range(mpfr_srcptr, mpfr_srcptr) const override {}
};

class Log : public Function {
 public:
  std::string name() const override { return "log"; }
  int evaluate(mpfr_ptr y, mpfr_srcptr x, mpfr_rnd_t rnd) const override {
    return mpfr_log(y, x, rnd);
  }
  // (-1)^(k-1) (k-1)! / x^k
  void derivative(mpfr_ptr y, mpfr_srcptr x, int k) const override {
    if (k == 0) {
      mpfr_log(y, x, MPFR_RNDN);
      return;
    }
    BigFloat f(guard_prec(y)), p(guard_prec(y));
    mpfr_fac_ui(f.get(), static_cast<unsigned long>(k - 1), MPFR_RNDN);
    mpfr_pow_ui(p.get(), x, static_cast<unsigned long>(k), MPFR_RNDN);
    mpfr_div(y, f.get(), p.get(), MPFR_RNDN);
    if (k % 2 == 0) mpfr_neg(y, y, MPFR_RNDN);
  }
  void derivative_bound(mpfr_ptr y, mpfr_srcptr lo, mpfr_srcptr hi, int k) const override {
    if (k == 0) {
      BigFloat a(guard_prec(y)), b(guard_prec(y));
      mpfr_log(a.get(), lo, MPFR_RNDD);
      mpfr_log(b.get(), hi, MPFR_RNDU);
      mpfr_abs(a.get(), a.get(), MPFR_RNDU);
      mpfr_abs(b.get(), b.get(), MPFR_RNDU);
      mpfr_max(y, a.get(), b.get(), MPFR_RNDU);
      return;
    }
    BigFloat f(guard_prec(y)), p(guard_prec(y));
    mpfr_fac_ui(f.get(), static_cast<unsigned long>(k - 1), MPFR_RNDU);
    mpfr_pow_ui(p.get(), lo, static_cast<unsigned long>(k), MPFR_RNDD);
    mpfr_div(y, f.get(), p.get(), MPFR_RNDU);
  }
  void check_range(mpfr_srcptr lo, mpfr_srcptr) const override {
    if (mpfr_sgn(lo) <= 0) throw DomainError("log is only defined for positive arguments");
  }
};

class Polynomial : public Function {
 public:
  explicit Polynomial(std::vector<BigFloat> c) : c_(std::move(c)) {}

  std::string name() const override { return "poly"; }

  int evaluate(mpfr_ptr y, mpfr_srcptr x, mpfr_rnd_t rnd) const override {
    BigFloat exact = exact_value(x, 0);
    return mpfr_set(y, exact.get(), rnd);
  }

  void derivative(mpfr_ptr y, mpfr_srcptr x, int k) const override {
    BigFloat exact = exact_value(x, k);
    mpfr_set(y, exact.get(), MPFR_RNDN);
  }

  // sum |c_i| i!/(i-k)! max(|lo|, |hi|)^(i-k)
  void derivative_bound(mpfr_ptr y, mpfr_srcptr lo, mpfr_srcptr hi, int k) const override {
    const mpfr_prec_t prec = guard_prec(y);
    BigFloat m(prec), term(prec), acc(prec), fall(prec);
    mpfr_abs(m.get(), lo, MPFR_RNDU);
    mpfr_abs(term.get(), hi, MPFR_RNDU);
    mpfr_max(m.get(), m.get(), term.get(), MPFR_RNDU);
    mpfr_set_zero(acc.get(), 1);
    for (std::size_t i = static_cast<std::size_t>(k); i < c_.size(); ++i) {
      falling(fall.get(), static_cast<long>(i), k, MPFR_RNDU);
      mpfr_abs(term.get(), c_[i].get(), MPFR_RNDU);
      mpfr_mul(term.get(), term.get(), fall.get(), MPFR_RNDU);
      BigFloat pw(prec);
      mpfr_pow_ui(pw.get(), m.get(), i - static_cast<std::size_t>(k), MPFR_RNDU);
      mpfr_mul(term.get(), term.get(), pw.get(), MPFR_RNDU);
      mpfr_add(acc.get(), acc.get(), term.get(), MPFR_RNDU);
    }
    mpfr_set(y, acc.get(), MPFR_RNDU);
  }

  void check_range(mpfr_srcptr, mpfr_srcptr) const override {}

  bool is_polynomial_of_degree(int degree) const override {
    for (std::size_t i = static_cast<std::size_t>(std::max(degree + 1, 0)); i < c_.size(); ++i) {
      if (!mpfr_zero_p(c_[i].get())) return false;
    }
    return true;
  }

 private:
  // f^(k)(x) exactly: Horner's rule is retried at doubled precision until
  // no operation rounds.
  BigFloat exact_value(mpfr_srcptr x, int k) const {
    mpfr_prec_t prec = 2 * mpfr_get_prec(x) + 128;
    for (const auto& c : c_) prec = std::max(prec, c.prec() + 128);
    while (true) {
      BigFloat r(prec);
      if (horner(r.get(), x, k)) return r;
      prec *= 2;
    }
  }

  static void falling(mpfr_ptr r, long i, int k, mpfr_rnd_t rnd) {
    mpfr_set_ui(r, 1, rnd);
    for (int j = 0; j < k; ++j) mpfr_mul_si(r, r, i - j, rnd);
  }

  // Returns false if any step rounded.
  bool horner(mpfr_ptr r, mpfr_srcptr x, int k) const {
    mpfr_set_zero(r, 1);
    if (static_cast<std::size_t>(k) >= c_.size()) return true;
    BigFloat coef(mpfr_get_prec(r));
    bool exact = true;
    for (std::size_t i = c_.size(); i-- > static_cast<std::size_t>(k);) {
      falling(coef.get(), static_cast<long>(i), k, MPFR_RNDN);
      exact &= mpfr_mul(coef.get(), coef.get(), c_[i].get(), MPFR_RNDN) == 0;
      exact &= mpfr_mul(r, r, x, MPFR_RNDN) == 0;
      exact &= mpfr_add(r, r, coef.get(), MPFR_RNDN) == 0;
    }
    return exact;
  }

  std::vector<BigFloat> c_;
};

}  // namespace

std::unique_ptr<Function> make_exp() { return std::make_unique<Exp>(); }
std::unique_ptr<Function> make_exp2() { return std::make_unique<Exp2>(); }
std::unique_ptr<Function> make_log() { return std::make_unique<Log>(); }

std::unique_ptr<Function> make_polynomial(const std::vector<std::string>& coefficients) {
  if (coefficients.empty()) throw ConfigError("polynomial needs at least one coefficient");
  std::vector<BigFloat> c;
  for (const auto& s : coefficients) {
    BigFloat v(4096);
    char* end = nullptr;
    int t = mpfr_strtofr(v.get(), s.c_str(), &end, 0, MPFR_RNDN);
    if (end == s.c_str() || *end != '\0') throw ConfigError("bad polynomial coefficient: " + s);
    if (t != 0 || !mpfr_number_p(v.get())) {
      throw ConfigError("polynomial coefficient is not a finite dyadic number: " + s);
    }
    // Shrink to the bits actually used.
    mpfr_prec_t used = mpfr_zero_p(v.get()) ? MPFR_PREC_MIN
                                             : std::max<mpfr_prec_t>(MPFR_PREC_MIN, mpfr_min_prec(v.get()));
    mpfr_prec_round(v.get(), used, MPFR_RNDN);
    c.push_back(std::move(v));
  }
  return std::make_unique<Polynomial>(std::move(c));
}

std::unique_ptr<Function> load_polynomial_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open polynomial file: " + path);
  std::vector<std::string> coefficients;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) coefficients.push_back(tok);
  }
  return make_polynomial(coefficients);
}

std::unique_ptr<Function> make_function(std::string_view name) {
  if (name == "exp") return make_exp();
  if (name == "exp2") return make_exp2();
  if (name == "log") return make_log();
  throw ConfigError("unknown function: " + std::string(name));
}

}  // namespace hrsearch
