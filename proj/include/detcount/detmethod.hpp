#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "detcount/bigfloat.hpp"
#include "detcount/enumerate.hpp"
#include "detcount/groebner.hpp"
#include "detcount/matrix.hpp"
#include "detcount/point.hpp"
#include "detcount/staircase.hpp"
#include "detcount/zmodel.hpp"

namespace detcount {

// Smallest k >= 1 whose staircase carries at least s standard monomials of
// degree k, i.e. h(k-1) < s <= h(k) for nondecreasing h. Throws if no such
// degree appears up to k_cap.
int select_degree(const GroebnerBasis<mpq_class>& gb, int s, int k_cap = 64);

mpz_class eval_monomial(const Monomial& m, const IntPoint& pt);

struct EvalMatrix {
  std::vector<IntPoint> points;
  std::vector<Monomial> monomials;
  Mat<mpz_class> entries;  // entries.at(i, j) = monomials[j] evaluated at points[i]
};

EvalMatrix build_eval_matrix(const std::vector<IntPoint>& points,
                             const std::vector<Monomial>& monomials);

// The s smallest degree-k standard monomials of the staircase, ascending in
// the basis order. Throws if fewer than s exist.
std::vector<Monomial> smallest_standard_monomials(const GroebnerBasis<mpq_class>& gb, int k,
                                                  int s);

struct DetValuation {
  mpz_class det;
  bool infinite = false;  // det = 0, valuation unbounded
  long v = 0;             // p-adic valuation of det when finite
};

DetValuation det_valuation(const Mat<mpz_class>& m, const mpz_class& p);

// Lambda(s) = n_1 + ... + n_s, where the n-sequence lists each degree j with
// multiplicity g[j]. n_out, when given, receives the first s entries. Throws
// when the supplied g range carries fewer than s entries.
long lambda_bound(const std::vector<long>& g, int s, std::vector<int>* n_out = nullptr);

struct DivisibilityCertificate {
  std::string model_hash;
  mpz_class p;
  std::vector<uint64_t> class_point;  // normalized representative mod p
  long mu = 0;                        // multiplicity of the reduction at the class point
  bool mu_stable = false;
  std::vector<long> g;      // local growth sequence used for the bound
  std::vector<int> n_seq;   // first s entries of the n-sequence
  long lambda = 0;          // certified lower bound for the valuation
  int s = 0;                // number of points = matrix size
  int k = 0;                // monomial degree
  mpz_class det;
  bool det_zero = false;
  long valuation = 0;     // meaningful when !det_zero
  bool ok = false;        // det_zero || valuation >= lambda
  std::string predictor;  // asymptotic size diagnostic, never asserted
};

// Exact divisibility certificate: evaluates the s smallest degree-k standard
// monomials at the given points (all specializing to the same class mod p,
// all on the model) and checks v_p(det) >= Lambda(s). Passing monomials
// overrides the default selection; the matrix must stay square.
DivisibilityCertificate verify_divisibility(const IntegralModel& m, uint64_t p,
                                            const std::vector<uint64_t>& class_rep,
                                            const std::vector<IntPoint>& points,
                                            const std::vector<Monomial>* monomials = nullptr);

struct ConditionResult {
  bool ok = false;
  double margin = 0.0;    // log(lhs) - log(rhs)
  std::string margin_str;
};

// Checks  prod_i p_i^((d/mu_i)^(1/r))  >=  (prod_m B_m^(a_m))^((r+1)/r) * (prod_m B_m)^eps
// in log space at 256-bit precision. The exponent (d/mu_i)^(1/r) is applied
// on both sides of the theory consistently; certificates record the
// convention.
ConditionResult condition_check(const std::vector<std::pair<mpz_class, long>>& primes_mu,
                                const std::vector<mpz_class>& bounds,
                                const std::vector<mpq_class>& abundances, int r, long d,
                                const mpq_class& eps);

inline const char* kExponentConvention = "(d/mu)^(1/r)";

struct AuxFormCertificate {
  std::string model_hash;
  mpz_class p;                        // 0 when no congruence class was used
  std::vector<uint64_t> class_point;  // empty when no class
  long mu = 0;
  long B = 0;
  std::string eps;
  bool empty_class = false;  // no points: designated certificate, G a standard monomial
  int s = 0;                 // number of enumerated points
  int k = 0;                 // degree of G
  long rank = 0;             // rank of the s x h(k) evaluation matrix
  Poly<mpz_class> G;         // primitive integer form, not in the ideal
  bool nf_nonzero = false;   // normal form of G against the model basis is nonzero
  bool vanishes_on_points = false;
  bool condition_ok = false;  // informational only
  std::string condition_margin;
  std::string exponent_convention = kExponentConvention;
};

// Constructs an auxiliary form vanishing on every height-<=B point of the
// model (restricted to a congruence class mod p when class_rep is nonempty)
// while staying outside the ideal. k grows from 1 until the evaluation matrix
// has a kernel; the kernel vector is the lexicographically least primitive
// integer vector among the reduced-echelon kernel basis. Throws if k_cap is
// reached first, which cannot happen once h(k) exceeds the point count.
AuxFormCertificate aux_form(const IntegralModel& m, long B, uint64_t p,
                            const std::vector<uint64_t>& class_rep, int k_cap = 64,
                            const mpq_class& eps = mpq_class(1, 10),
                            const EnumOptions* enum_opts = nullptr);

// Same certificate built from a caller-supplied point list instead of a fresh
// box enumeration. The list must be exactly the points the certificate is
// meant to cover; B, p, and class_rep only label the certificate and drive the
// multiplicity and growth-condition fields.
AuxFormCertificate aux_form_for_points(const IntegralModel& m, long B, uint64_t p,
                                       const std::vector<uint64_t>& class_rep,
                                       const std::vector<IntPoint>& points, int k_cap = 64,
                                       const mpq_class& eps = mpq_class(1, 10));

// The `count` smallest primes >= threshold, ascending.
std::vector<mpz_class> prime_window(const BigFloat& threshold, int count);

}  // namespace detcount
