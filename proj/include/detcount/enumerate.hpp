#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "detcount/point.hpp"
#include "detcount/poly.hpp"

namespace detcount {

// Thrown when an enumeration would examine more candidates than allowed.
struct WorkCapExceeded : std::runtime_error {
  uint64_t cap;
  explicit WorkCapExceeded(uint64_t c)
      : std::runtime_error("enumeration work cap exceeded"), cap(c) {}
};

struct EnumOptions {
  long B = 10;
  uint64_t work_cap = 1000000000;
  bool x0_nonzero = false;           // projective only: skip points with x0 = 0
  uint64_t p = 0;                    // congruence modulus, 0 disables
  std::vector<uint64_t> class_rep;   // projective congruence class mod p, normalized
  std::vector<uint64_t> residues;    // affine residue per coordinate mod p
  int threads = 1;                   // >1 enables the sharded parallel kernel
};

struct EnumResult {
  std::vector<IntPoint> points;  // sorted lexicographically
  uint64_t outer_candidates = 0;
  bool used_parallel = false;
};

// Reference implementations: plain box scans with full arbitrary-precision
// evaluation of every generator. Kept as the correctness baseline for the
// solving kernels below.
std::vector<IntPoint> affine_points_reference(const std::vector<Poly<mpz_class>>& gens,
                                              long B);
std::vector<IntPoint> projective_points_reference(const std::vector<Poly<mpz_class>>& gens,
                                                  long B);

// Integer solutions of the system in the box [-B, B]^n. The kernel iterates
// the first n-1 coordinates and solves one generator for the last, checking
// every candidate against the full system exactly.
EnumResult affine_points(const std::vector<Poly<mpz_class>>& gens, const EnumOptions& opt);

// Primitive projective points of height at most B, one representative per
// point (first nonzero coordinate positive). With class_rep set, only points
// whose reduction lies on the given class of the scaling orbit are produced.
EnumResult projective_points(const std::vector<Poly<mpz_class>>& gens,
                             const EnumOptions& opt);

struct FibrationCount {
  mpz_class count = 0;
  uint64_t degenerate_fibers = 0;  // fibers that are whole lines, counted closed-form
  std::vector<std::pair<long, long>> bad_slices;  // first few degenerate (y1, y2)
  uint64_t outer_candidates = 0;
};

// Count integer points of a trivariate hypersurface in the box by slicing:
// outer loop over (y1, y2), last coordinate solved per fiber. Degenerate
// fibers (the polynomial collapses to zero) contribute a full line each.
FibrationCount fibration_count(const Poly<mpz_class>& f, const EnumOptions& opt);

// Chart count for a one-dimensional scheme in P^3: integer tuples
// (1, y1, y2, y3) in the box solving every quaternary generator, found by
// fixing y3 then y2 and solving each fiber for y1 exactly. Fibers where every
// generator collapses contribute a whole line each. opt.p with opt.residues
// (3 entries, for y1..y3) filters to one congruence class. When `points` is
// given it receives the solutions as homogeneous 4-tuples, sorted.
FibrationCount curve_fibration_count(const std::vector<Poly<mpz_class>>& gens,
                                     const EnumOptions& opt,
                                     std::vector<IntPoint>* points = nullptr);

// Sorted integer roots of sum_i c[i] t^i inside [-B, B]; whole_range means
// the zero polynomial. Closed forms for degree <= 2 and binomials, exact
// scan otherwise.
struct UnivariateRoots {
  bool whole_range = false;
  std::vector<long> roots;
};
UnivariateRoots integer_roots_in_range(const std::vector<mpz_class>& c, long B);

}  // namespace detcount
