#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "detcount/detmethod.hpp"
#include "detcount/poly.hpp"

namespace detcount {

// Outcome classes double as CLI exit codes. A violated hypothesis refuses
// the computation; inconclusive geometry still delivers an exact count but
// flags that a hypothesis could not be confirmed.
enum class PipelineStatus : int {
  Ok = 0,
  HypothesisViolation = 2,
  InconclusiveGeometry = 3,
  WorkCapped = 4,
};

// Congruence class for curve counting: the points counted reduce to `point`
// mod p. mu = 0 lets the pipeline compute the multiplicity itself.
struct CurveClass {
  uint64_t p = 0;
  std::vector<long> point;
  long mu = 0;
};

// One congruence class mod q in a partition of the counted point set.
struct ClassSummary {
  mpz_class q = 0;
  std::vector<uint64_t> point;   // normalized class representative
  bool good = false;             // passed the good-point filter / nonsingularity test
  long points = 0;               // points of the set in this class (exact)
  int aux_degree = 0;            // degree of the auxiliary form, when built
  mpz_class bezout_budget = 0;   // intersection-theoretic cap for the class
  bool certified = false;        // certificate built and consistent with the budget
  std::string note;
};

// One slice y_n = b - a.y' in the hypersurface recursion.
struct SliceSummary {
  long b = 0;
  mpz_class count = 0;  // points of the slice inside the box (before the lift filter)
  bool bad = false;     // slice failed its hypothesis checks; counted by the oracle
  std::string reason;
};

struct PipelineOptions {
  mpq_class eps = mpq_class(1, 10);
  uint64_t seed = 1;
  int threads = 1;
  bool oracle_check = false;
  uint64_t work_cap = 1000000000;
  int bad_slice_cap = 64;
  int omega_count = 2;        // primes requested from each window
  int k_cap = 64;             // degree cap for auxiliary forms
  int good_e_max = 0;         // extension cap for the good-point filter, 0 = default
  bool collect_points = false;
};

// Result of one counting run. `count` is always an exact integer; status
// HypothesisViolation means the computation was refused and count is
// meaningless. chain_total records the intermediate upper bound of the
// route that produced the count (-1 when the route has none).
struct CountReport {
  PipelineStatus status = PipelineStatus::Ok;
  std::string query;
  std::string mode;
  long B = 0;
  mpz_class count = 0;
  mpz_class chain_total = -1;
  bool oracle_checked = false;
  mpz_class oracle_count = -1;
  std::vector<std::string> trace;
  std::vector<AuxFormCertificate> certificates;
  std::vector<ClassSummary> classes;
  std::vector<SliceSummary> slices;
  std::vector<IntPoint> points;  // filled when collect_points is set
  double wall_seconds = 0;
  uint64_t seed = 1;
  std::string epsilon;
};

// Linear projection of a positive-dimensional model onto a hypersurface.
struct ProjectionData {
  int nvars = 0;       // ambient variable count of the source
  int r = -2;          // dimension of the source
  long degree = 0;     // degree of the image form
  bool identity = false;
  std::vector<Poly<mpz_class>> center;  // r+2 linear forms cutting the center
  std::vector<Poly<mpz_class>> map;     // the same forms, in map order
  Poly<mpz_class> image;                // defining form of the image hypersurface
  std::vector<Poly<mpz_class>> exceptional;  // recorded generators (see caveats)
  double height_ratio_max = 0;  // max H(image point)/H(source point) over samples
  long fibers_checked = 0;
  long max_fiber_points = 0;
  int redraws = 0;
  std::vector<std::string> caveats;
};

// Least-squares trend of log(count+1) against log B.
struct ExponentFit {
  bool defined = false;  // false when every count is zero
  double slope = 0;
  double intercept = 0;
  std::vector<double> residuals;
  std::string note;
};

// Count integer chart points (1, y1, y2, y3), |y_i| <= B, of a
// one-dimensional scheme in P^3, optionally restricted to a congruence
// class. An integral curve gets per-class auxiliary-form certificates over
// a window of primes; a reducible or unconfirmed input falls back to the
// plain slicing count. The reported count is exact on every route.
CountReport count_curve(const std::vector<Poly<mpq_class>>& gens, long B,
                        const CurveClass* cls, const PipelineOptions& opt);

// Count integer points, |y_i| <= B, on an affine surface f = 0 in three
// variables, degree >= 4. Refuses inputs refuted by the irreducibility
// probe or with an infinite line family. Either a second independent form
// of the same degree vanishes on the whole point set (the count moves to
// the intersection curve) or the points are partitioned into congruence
// classes mod a window prime, each good class carrying an auxiliary-form
// certificate and a nested curve count.
CountReport count_surface(const Poly<mpq_class>& f, long B, const PipelineOptions& opt);

// Count integer points on an affine hypersurface in n >= 4 variables of
// degree >= 4 by slicing along a seeded primitive direction a (a_n = 1):
// every point lies on exactly one slice y_n = b - a'.y', b in [-cB, cB].
// Slices recurse down to the surface counter; slices failing their own
// hypothesis checks are counted exactly by the enumeration oracle. The
// reported count filters each slice to lifts with |y_n| <= B and is exact;
// chain_total records the unfiltered sum over slices (an upper bound).
CountReport count_hypersurface(const Poly<mpq_class>& f, long B,
                               const PipelineOptions& opt);

// Seeded linear projection of an r-dimensional model in P^n onto a degree-d
// hypersurface in P^{r+1}: draws r+2 small integer linear forms whose common
// zero plane misses the model (checked ideal-theoretically), eliminates to
// the image form, validates its degree, and samples fibers for the <= d
// point bound and the height-ratio constant.
ProjectionData project_to_hypersurface(const std::vector<Poly<mpq_class>>& gens,
                                       const PipelineOptions& opt);

// Count rational points of height <= B on a projective model. Hypersurfaces
// reduce to the affine cone with exact primitive-vector bookkeeping (each
// projective point has two primitive representatives); higher codimension
// projects to a hypersurface and resolves every fiber over the image points
// of height <= cB exactly. Cross-checkable against projective enumeration.
CountReport count_projective(const std::vector<Poly<mpq_class>>& gens, long B,
                             const PipelineOptions& opt);

// Fit samples (B, count); needs at least four distinct positive B values.
ExponentFit exponent_fit(const std::vector<std::pair<long, mpz_class>>& samples);

// Enumerate the query over the grid (affine or projective box counts) and
// fit the trend.
ExponentFit exponent_fit_query(const std::vector<Poly<mpq_class>>& gens, bool projective,
                               const std::vector<long>& grid, const PipelineOptions& opt);

}  // namespace detcount
