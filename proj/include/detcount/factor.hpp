#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "detcount/fq.hpp"
#include "detcount/poly.hpp"

namespace detcount {

// Dense univariate polynomial over one F_{p^e} context, coefficients
// ascending, no trailing zeros (maintained by up_trim).
using FqUPoly = std::vector<Fq>;

int updeg(const FqUPoly& f);  // -1 for the zero polynomial
void up_trim(FqUPoly& f);
FqUPoly up_make(const FqCtx* k, const std::vector<long long>& c);
bool up_is_zero(const FqUPoly& f);
FqUPoly up_add(const FqUPoly& a, const FqUPoly& b, const FqCtx* k);
FqUPoly up_sub(const FqUPoly& a, const FqUPoly& b, const FqCtx* k);
FqUPoly up_scale(const FqUPoly& a, const Fq& c);
FqUPoly up_mul(const FqUPoly& a, const FqUPoly& b, const FqCtx* k);
// quotient and remainder; g must be nonzero
std::pair<FqUPoly, FqUPoly> up_divrem(const FqUPoly& f, const FqUPoly& g, const FqCtx* k);
FqUPoly up_mod(const FqUPoly& f, const FqUPoly& g, const FqCtx* k);
FqUPoly up_monic(const FqUPoly& f);
FqUPoly up_gcd(FqUPoly a, FqUPoly b, const FqCtx* k);  // monic, or zero
FqUPoly up_derivative(const FqUPoly& f, const FqCtx* k);
FqUPoly up_powmod(FqUPoly base, const mpz_class& e, const FqUPoly& mod, const FqCtx* k);
Fq up_eval(const FqUPoly& f, const Fq& x);
std::string up_str(const FqUPoly& f);

// Monic squarefree parts with multiplicities, any characteristic (p-th powers
// unwound through the Frobenius inverse).
std::vector<std::pair<FqUPoly, int>> up_squarefree(const FqUPoly& f, const FqCtx* k);

struct FqUnivFactorization {
  Fq unit;
  std::vector<std::pair<FqUPoly, int>> factors;  // monic irreducible, multiplicity
};

// Full factorization into monic irreducibles: squarefree split, then
// distinct-degree, then seeded equal-degree splitting (odd and even
// characteristic variants). Deterministic for fixed inputs and seed.
FqUnivFactorization up_factor(const FqUPoly& f, const FqCtx* k, uint64_t seed = 1);

bool up_irreducible(const FqUPoly& f, const FqCtx* k);

// Distinct roots in the base field, sorted by fq_index.
std::vector<Fq> up_roots(const FqUPoly& f, const FqCtx* k);

struct FqFactorization {
  Fq unit;
  std::vector<std::pair<Poly<Fq>, int>> factors;  // irreducible, multiplicity
};

// Exact quotient f / g over F_q[y1, y2] (or any nvars where g is univariate
// in the dividing structure); nullopt when g does not divide f.
std::optional<Poly<Fq>> poly_div_exact(const Poly<Fq>& f, const Poly<Fq>& g, const FqCtx* k);

// Factorization of a two-variable affine polynomial into irreducibles over
// F_q: content split, squarefree reduction, Hensel lifting from a squarefree
// specialization, subset recombination with exact division.
FqFactorization factor_poly2(const Poly<Fq>& f, const FqCtx* k, uint64_t seed = 1);

// Factorization of a homogeneous ternary form: dehomogenize at x2, factor,
// rehomogenize, with the x2^a content split off as a line factor.
FqFactorization factor_ternary_form(const Poly<Fq>& F, const FqCtx* k, uint64_t seed = 1);

struct AbsoluteFactorization {
  bool ok = false;  // certified: every factor absolutely irreducible
  int e = 1;        // the factors live over F_{p^e}
  const FqCtx* ctx = nullptr;
  Fq unit;
  std::vector<std::pair<Poly<Fq>, int>> factors;  // homogeneous ternary forms
  std::string note;
};

// Absolute factorization of a ternary form over the prime field: factor over
// F_{p^e}, extend e by the lcm of the factor degrees, and stop when the
// degree pattern stabilizes. A pattern stable under that extension proves
// every factor absolutely irreducible. Inconclusive when e would exceed
// e_max or p^e would exceed the field size cap.
AbsoluteFactorization absolute_factor_form(const Poly<Fp>& F, int e_max,
                                           uint64_t field_cap_log2 = 40, uint64_t seed = 1);

}  // namespace detcount
