#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

namespace detcount {

// 256-bit floating point value with RAII around mpfr_t. Used only for
// threshold and margin computations; all certified arithmetic stays exact.
class BigFloat {
 public:
  static constexpr mpfr_prec_t kPrec = 256;

  BigFloat() { mpfr_init2(v_, kPrec); mpfr_set_zero(v_, 1); }
  explicit BigFloat(double x) { mpfr_init2(v_, kPrec); mpfr_set_d(v_, x, MPFR_RNDN); }
  explicit BigFloat(const mpz_class& x) {
    mpfr_init2(v_, kPrec);
    mpfr_set_z(v_, x.get_mpz_t(), MPFR_RNDN);
  }
  explicit BigFloat(const mpq_class& x) {
    mpfr_init2(v_, kPrec);
    mpfr_set_q(v_, x.get_mpq_t(), MPFR_RNDN);
  }
  BigFloat(const BigFloat& o) { mpfr_init2(v_, kPrec); mpfr_set(v_, o.v_, MPFR_RNDN); }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, kPrec);
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(BigFloat o) {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  friend BigFloat operator+(const BigFloat& a, const BigFloat& b) {
    BigFloat r;
    mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b) {
    BigFloat r;
    mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b) {
    BigFloat r;
    mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b) {
    BigFloat r;
    mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend bool operator<(const BigFloat& a, const BigFloat& b) {
    return mpfr_cmp(a.v_, b.v_) < 0;
  }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) { return !(a < b); }

  static BigFloat log_of(const BigFloat& a) {
    BigFloat r;
    mpfr_log(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  static BigFloat pow(const BigFloat& base, const BigFloat& exp) {
    BigFloat r;
    mpfr_pow(r.v_, base.v_, exp.v_, MPFR_RNDN);
    return r;
  }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_nonneg() const { return mpfr_sgn(v_) >= 0; }

  // smallest integer >= value
  mpz_class ceil_z() const;
  std::string str(int digits = 24) const;

 private:
  mpfr_t v_;
};

}  // namespace detcount
