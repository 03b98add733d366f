#pragma once

#include <cassert>
#include <cstdint>
#include <string>

namespace detcount {

// Prime field element for word-sized p. The modulus travels with the value so
// matrix and polynomial templates stay field-agnostic.
struct Fp {
  uint64_t v = 0;
  uint64_t p = 0;
};

inline Fp fp_make(uint64_t p, long long x) {
  long long r = x % (long long)p;
  if (r < 0) r += (long long)p;
  return Fp{(uint64_t)r, p};
}

inline bool operator==(const Fp& a, const Fp& b) { return a.v == b.v && a.p == b.p; }
inline bool operator!=(const Fp& a, const Fp& b) { return !(a == b); }

inline Fp operator+(const Fp& a, const Fp& b) {
  assert(a.p == b.p);
  uint64_t s = a.v + b.v;
  if (s >= a.p) s -= a.p;
  return Fp{s, a.p};
}

inline Fp operator-(const Fp& a, const Fp& b) {
  assert(a.p == b.p);
  uint64_t s = a.v >= b.v ? a.v - b.v : a.v + a.p - b.v;
  return Fp{s, a.p};
}

inline Fp operator-(const Fp& a) { return Fp{a.v == 0 ? 0 : a.p - a.v, a.p}; }

inline Fp operator*(const Fp& a, const Fp& b) {
  assert(a.p == b.p);
  return Fp{(uint64_t)((__uint128_t)a.v * b.v % a.p), a.p};
}

uint64_t inv_mod_u64(uint64_t a, uint64_t m);

inline Fp fp_inv(const Fp& a) {
  assert(a.v != 0);
  return Fp{inv_mod_u64(a.v, a.p), a.p};
}

inline Fp fp_pow(Fp a, uint64_t e) {
  Fp r{1 % a.p, a.p};
  while (e) {
    if (e & 1) r = r * a;
    a = a * a;
    e >>= 1;
  }
  return r;
}

}  // namespace detcount
