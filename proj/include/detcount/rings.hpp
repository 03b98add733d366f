#pragma once

#include <gmpxx.h>

#include <sstream>
#include <stdexcept>
#include <string>

#include "detcount/fp.hpp"
#include "detcount/fq.hpp"

namespace detcount {

// Uniform coefficient interface. `like` carries the modulus/context for the
// finite fields; it is ignored by the characteristic-zero types.
template <class R>
struct RingOps;

template <>
struct RingOps<mpq_class> {
  static constexpr bool is_field = true;
  static mpq_class zero(const mpq_class&) { return mpq_class(0); }
  static mpq_class one(const mpq_class&) { return mpq_class(1); }
  static mpq_class from_int(const mpq_class&, long v) { return mpq_class(v); }
  static bool is_zero(const mpq_class& a) { return sgn(a) == 0; }
  static mpq_class inv(const mpq_class& a) { return mpq_class(1) / a; }
  static std::string str(const mpq_class& a) { return a.get_str(); }
};

template <>
struct RingOps<mpz_class> {
  static constexpr bool is_field = false;
  static mpz_class zero(const mpz_class&) { return mpz_class(0); }
  static mpz_class one(const mpz_class&) { return mpz_class(1); }
  static mpz_class from_int(const mpz_class&, long v) { return mpz_class(v); }
  static bool is_zero(const mpz_class& a) { return sgn(a) == 0; }
  static mpz_class inv(const mpz_class& a) {
    if (a == 1 || a == -1) return a;
    throw std::domain_error("mpz inverse of non-unit");
  }
  static std::string str(const mpz_class& a) { return a.get_str(); }
};

template <>
struct RingOps<Fp> {
  static constexpr bool is_field = true;
  static Fp zero(const Fp& like) { return Fp{0, like.p}; }
  static Fp one(const Fp& like) { return Fp{1 % like.p, like.p}; }
  static Fp from_int(const Fp& like, long v) { return fp_make(like.p, v); }
  static bool is_zero(const Fp& a) { return a.v == 0; }
  static Fp inv(const Fp& a) { return fp_inv(a); }
  static std::string str(const Fp& a) { return std::to_string(a.v); }
};

template <>
struct RingOps<Fq> {
  static constexpr bool is_field = true;
  static Fq zero(const Fq& like) { return fq_zero(like.k); }
  static Fq one(const Fq& like) { return fq_one(like.k); }
  static Fq from_int(const Fq& like, long v) { return fq_from_int(like.k, v); }
  static bool is_zero(const Fq& a) { return fq_is_zero(a); }
  static Fq inv(const Fq& a) { return fq_inv(a); }
  static std::string str(const Fq& a) { return fq_str(a); }
};

}  // namespace detcount
