#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "detcount/fp.hpp"

namespace detcount {

// Extension field F_{p^e} = F_p[g]/(modulus). The modulus per (p,e) is fixed
// for the whole process: first irreducible monic polynomial produced by a
// deterministically seeded generator, so every run agrees on representations.
struct FqCtx {
  uint64_t p = 0;
  int e = 1;
  std::vector<uint64_t> mod;  // modulus = x^e + sum mod[i]*x^i, size e
};

// Interned context; pointers stay valid for the process lifetime.
const FqCtx* fq_context(uint64_t p, int e);

struct Fq {
  const FqCtx* k = nullptr;
  std::vector<uint64_t> c;  // length k->e, coefficients mod p
};

Fq fq_zero(const FqCtx* k);
Fq fq_one(const FqCtx* k);
Fq fq_from_int(const FqCtx* k, long long x);
Fq fq_gen(const FqCtx* k);                 // the class of x
Fq fq_embed(const FqCtx* k, const Fp& a);  // F_p constant into F_{p^e}
bool fq_is_zero(const Fq& a);

bool operator==(const Fq& a, const Fq& b);
inline bool operator!=(const Fq& a, const Fq& b) { return !(a == b); }
Fq operator+(const Fq& a, const Fq& b);
Fq operator-(const Fq& a, const Fq& b);
Fq operator-(const Fq& a);
Fq operator*(const Fq& a, const Fq& b);
Fq fq_inv(const Fq& a);
Fq fq_pow(Fq a, __uint128_t e);
Fq fq_pth_root(const Fq& a);  // inverse of Frobenius x -> x^p

// Total enumeration order for scans: index in [0, p^e), little-endian digits.
uint64_t fq_index(const Fq& a);
Fq fq_from_index(const FqCtx* k, uint64_t idx);

std::string fq_str(const Fq& a);

}  // namespace detcount
