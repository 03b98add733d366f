#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "detcount/factor.hpp"
#include "detcount/point.hpp"
#include "detcount/poly.hpp"
#include "detcount/zmodel.hpp"

namespace detcount {

// Pointwise geometric checks on surfaces in P^3. A point is "good" when it
// is nonsingular, its tangent plane meets the surface with contact order
// exactly two, no line on the surface passes through it, and it is
// nonsingular on every cubic divisor inside the tangent-plane section.
// Good points admit the multiplicity bound mu <= e/2 for every curve of
// degree e on the surface through them, which is what the determinant
// stage of the counting pipeline consumes.

// A line on V(F) spanned by a base point and a direction. The defining
// invariant: F(s*point + t*direction) vanishes identically as a binary
// form in (s, t). Exactly one coordinate family is populated, matching
// the field the query ran over.
struct LineOnSurface {
  const FqCtx* field = nullptr;  // null for rational lines
  std::vector<Fq> point, direction;
  std::vector<mpz_class> point_q, direction_q;
};

struct LinesReport {
  bool conclusive = false;
  // A positive-dimensional family of lines on the surface passes through
  // the point (for a nonsingular point this means the whole tangent plane
  // lies on the surface).
  bool positive_dimensional = false;
  // Lines exist over the algebraic closure. For a nonsingular point this
  // is decided exactly; listing them below is what the field cap limits.
  bool any_over_closure = false;
  std::vector<LineOnSurface> lines;
  std::string note;
};

// Sentinel contact order: the tangent plane is contained in the surface,
// so the restriction vanishes identically.
inline constexpr int kPlaneInsideSurface = 1 << 30;

// Jacobian criterion at P: true iff some partial derivative of F is
// nonzero at P. Throws if P does not lie on V(F).
bool jacobian_nonsingular(const Poly<Fp>& F, const std::vector<uint64_t>& P);
bool jacobian_nonsingular_q(const Poly<mpz_class>& F, const IntPoint& P);

// F restricted to the tangent plane at a nonsingular point P, written as a
// ternary form in chart coordinates (u0:u1:u2) with P at (1:0:0). The zero
// polynomial comes back exactly when the tangent plane lies on the surface.
Poly<Fq> tangent_plane_section(const Poly<Fq>& F, const std::vector<Fq>& P);
Poly<mpq_class> tangent_plane_section_q(const Poly<mpq_class>& F,
                                        const std::vector<mpq_class>& P);

// Order of vanishing at P of the tangent-plane restriction. Always >= 2;
// kPlaneInsideSurface when the restriction is identically zero. Throws if
// P is singular or off the surface.
int tangent_section_order(const Poly<Fp>& F, const std::vector<uint64_t>& P);
int tangent_section_order_q(const Poly<mpz_class>& F, const IntPoint& P);

// All lines on V(F) through P. Over F_p the existence question is decided
// exactly (for nonsingular P via the gcd of the binary coefficient forms
// on the tangent pencil); lines are listed with coordinates in F_{p^e} for
// e <= e_max and a note records any that live beyond the cap. For singular
// P the direction scheme is dimension-tested and, when finite, scanned up
// to an internal work cap.
LinesReport lines_through_point(const Poly<Fp>& F, const std::vector<uint64_t>& P,
                                int e_max);
// Rational version: lists the lines with integer coordinates and decides
// existence over the closure via the same gcd degree.
LinesReport lines_through_point_q(const Poly<mpz_class>& F, const IntPoint& P);

struct LineFamilyReport {
  bool conclusive = false;
  bool finite = false;
  // Number of lines on the surface with coordinates in F_{p^e_scan}; absent
  // when the family is infinite or the scan exceeds the work cap.
  std::optional<long> count;
  std::string note;
};

// Finiteness of the whole family of lines on V(F), decided chart by chart
// on the line grassmannian: in each of the six row-reduced charts the
// incidence ideal must be zero-dimensional. Counts rational lines by a
// scan when finite. gb_cap bounds the Groebner degree; exceeding it flags
// the verdict inconclusive.
LineFamilyReport lines_on_surface_finite(const Poly<Fp>& F, int e_scan,
                                         int gb_cap = 24);
LineFamilyReport lines_on_surface_finite_q(const Poly<mpz_class>& F,
                                           int gb_cap = 24);

struct CubicConditionReport {
  bool conclusive = false;
  bool ok = false;
  int e_used = 1;  // extension level of the certified factorization
  // Offending cubic divisor of the tangent section (printed form) and the
  // multiplicity of P on it, when the check fails.
  std::string witness;
  long witness_mult = 0;
  std::string note;
};

// P must be nonsingular on every effective degree-3 divisor of the
// tangent-plane section through P. The section is factored into certified
// absolutely irreducible components over F_{p^e}; sub-divisors are all
// exponent vectors below the multiplicities with weighted degree exactly
// three. Inconclusive when the factorization cannot be certified within
// e_max and the field cap.
CubicConditionReport cubic_condition(const Poly<Fp>& F, const std::vector<uint64_t>& P,
                                     int e_max, double field_cap_log2 = 40.0);

// One point's verdict. Flags are conservative: an inconclusive sub-check
// leaves its flag false and clears `conclusive`.
struct ConditionReport {
  std::vector<uint64_t> point;
  bool nonsingular = false;  // Jacobian criterion
  bool contact_ok = false;   // tangent contact order exactly two
  bool no_lines = false;     // no line on the surface through the point
  bool cubic_ok = false;     // nonsingular on the cubic divisors of the section
  bool good = false;         // conjunction of the four
  bool conclusive = true;
  int tangent_order = 0;
  std::string field;  // field the checks evaluated over, e.g. "F_13"
  std::vector<LineOnSurface> line_witnesses;
  std::string cubic_witness;
  long cubic_witness_mult = 0;
  std::string note;
};

struct GoodPointPartition {
  std::vector<ConditionReport> reports;  // one per input point, same order
  std::vector<size_t> good, bad;         // indices into the input list
};

// Partition F_p-points of the reduced surface into good and bad. Points
// must lie on the reduction (throws otherwise). e_max = 0 picks the
// default d^2. Inconclusive checks send the point to `bad`.
GoodPointPartition good_point_filter(const IntegralModel& m, uint64_t p,
                                     const std::vector<std::vector<uint64_t>>& pts,
                                     int e_max = 0);

struct MultBoundReport {
  bool hypothesis_ok = false;  // curve on surface, purely one-dimensional, P good
  bool computed = false;       // multiplicity stabilized
  bool bound_ok = false;       // 2*mu <= e
  long mu = 0;                 // multiplicity of the reduced curve at P
  long e = 0;                  // degree of the curve
  std::string note;
};

// Check the multiplicity bound mu <= e/2 for a curve through a good point.
// A hypothesis failure (curve not on the surface, wrong dimension, P not
// good) is reported distinctly from a bound failure; the latter would mean
// an inconsistency in the surrounding theory or an implementation bug and
// is treated as fatal by callers.
MultBoundReport mult_bound_check(const IntegralModel& surface,
                                 const std::vector<uint64_t>& P,
                                 const std::vector<Poly<mpz_class>>& curve,
                                 uint64_t p);

enum class ProbeVerdict { Certified, Refuted, Inconclusive };

struct ProbeReport {
  ProbeVerdict verdict = ProbeVerdict::Inconclusive;
  uint64_t prime = 0;  // witness prime, when one decided the verdict
  std::string note;
};

// Absolute irreducibility probe for an affine plane curve f over Z.
// Refuted on a visible factorization (monomial content, or a homogeneous
// f of degree >= 2, which always splits into linear forms over the
// closure; the note records a finite-field witness). Certified when f mod
// p is absolutely irreducible for some tested good prime, which lifts.
// Otherwise inconclusive.
ProbeReport abs_irreducibility_probe(const Poly<mpz_class>& f, int trials);

}  // namespace detcount
