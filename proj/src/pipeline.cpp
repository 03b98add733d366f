#include "detcount/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "detcount/bigfloat.hpp"
#include "detcount/enumerate.hpp"
#include "detcount/geometry.hpp"
#include "detcount/groebner.hpp"
#include "detcount/matrix.hpp"
#include "detcount/staircase.hpp"
#include "detcount/zmodel.hpp"

namespace detcount {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Scale a rational vector to a primitive integer vector, first nonzero
// entry positive.
std::vector<mpz_class> primitive_vector(const std::vector<mpq_class>& v) {
  mpz_class lcm = 1;
  for (const auto& c : v) {
    mpz_class den = c.get_den();
    lcm = lcm / gcd(lcm, den) * den;
  }
  std::vector<mpz_class> z;
  z.reserve(v.size());
  mpz_class content = 0;
  for (const auto& c : v) {
    mpq_class s = c * lcm;
    z.push_back(s.get_num());
    content = gcd(content, z.back());
  }
  if (content == 0) return z;
  int sign = 0;
  for (auto& c : z) {
    c /= content;
    if (sign == 0 && c != 0) sign = c > 0 ? 1 : -1;
  }
  if (sign < 0)
    for (auto& c : z) c = -c;
  return z;
}

std::string join_polys(const std::vector<Poly<mpq_class>>& gens) {
  std::ostringstream os;
  for (size_t i = 0; i < gens.size(); ++i) {
    if (i) os << "; ";
    os << poly_to_string(gens[i]);
  }
  return os.str();
}

TermOrder grevlex() { return TermOrder{OrderKind::GRevLex, 0}; }

// Normalized projective class of a chart point mod q. Chart points start
// with 1, so the representative always exists.
std::vector<uint64_t> point_class_mod(const IntPoint& pt, const FqCtx* ctx) {
  auto s = specialize_point(pt, ctx);
  if (!s) throw std::logic_error("chart point vanished mod q");
  std::vector<uint64_t> key;
  key.reserve(s->size());
  for (const auto& c : *s) key.push_back(fq_index(c));
  return key;
}

std::map<std::vector<uint64_t>, std::vector<IntPoint>> partition_mod(
    const std::vector<IntPoint>& pts, uint64_t q) {
  const FqCtx* ctx = fq_context(q, 1);
  std::map<std::vector<uint64_t>, std::vector<IntPoint>> part;
  for (const auto& pt : pts) part[point_class_mod(pt, ctx)].push_back(pt);
  return part;
}

std::string key_str(const std::vector<uint64_t>& key) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < key.size(); ++i) os << (i ? "," : "") << key[i];
  os << ")";
  return os.str();
}

// Rank of the Jacobian of the reduced generators at a point. Rank equal to the
// expected codimension certifies a regular local ring there, so multiplicity
// one follows without a graded scan.
long jacobian_rank_at(const std::vector<Poly<Fq>>& gens, const std::vector<Fq>& P,
                      const FqCtx* ctx) {
  if (gens.empty()) return 0;
  int n = gens[0].nvars;
  Mat<Fq> jac((int)gens.size(), n, fq_zero(ctx));
  for (int i = 0; i < (int)gens.size(); ++i)
    for (int j = 0; j < n; ++j) jac.at(i, j) = poly_evaluate(poly_derivative(gens[i], j), P);
  return matrix_rank(std::move(jac), fq_zero(ctx));
}

// The `count` smallest primes >= threshold, skipping `avoid`.
std::vector<mpz_class> window_avoiding(const BigFloat& threshold, int count,
                                       const mpz_class& avoid) {
  auto raw = prime_window(threshold, count + 1);
  std::vector<mpz_class> out;
  for (const auto& q : raw) {
    if (q == avoid) continue;
    out.push_back(q);
    if ((int)out.size() == count) break;
  }
  return out;
}

struct GateReport {
  ProbeVerdict verdict = ProbeVerdict::Inconclusive;
  int sing_dim = 99;  // projective dimension of the singular locus, 99 = unknown
  std::string note;
};

// Absolute irreducibility gate for an affine hypersurface f. Two sound
// certification routes: a finite singular locus of the projective closure
// (a factorization g*h would put the whole of V(g,h), positive-dimensional,
// inside it), or a plane slice of full degree certified absolutely
// irreducible (a factorization slices to a factorization at full degree).
// Refutation is evidence-based and only ever refuses a computation: every
// sampled slice failed to certify while the singular locus has positive
// dimension.
GateReport irreducibility_gate(const Poly<mpz_class>& f, uint64_t seed) {
  GateReport rep;
  int d = poly_degree(f);
  auto F = poly_homogenize(f);

  // An empty Jacobian scheme modulo one prime certifies smoothness over the
  // closure of the rationals (a singular point there would reduce modulo
  // every prime), and a smooth projective hypersurface is irreducible since
  // distinct components would meet in singular points.
  for (uint64_t p : {7ull, 11ull, 13ull, 5ull}) {
    auto Fm = poly_reduce_p(F, p);
    if (Fm.t.empty() || poly_degree(Fm) != d) continue;
    std::vector<Poly<Fp>> jacp{Fm};
    for (int i = 0; i < Fm.nvars; ++i) {
      auto der = poly_derivative(Fm, i);
      if (!der.t.empty()) jacp.push_back(der);
    }
    auto gbp = buchberger(jacp, grevlex());
    auto fitp = hilbert_fit(gbp);
    if (fitp.ok && fitp.r == -1) {
      rep.sing_dim = -1;
      rep.verdict = ProbeVerdict::Certified;
      std::ostringstream os;
      os << "projective closure is smooth (Jacobian scheme empty mod " << p << ")";
      rep.note = os.str();
      return rep;
    }
  }

  if (f.nvars == 2) {
    auto pr = abs_irreducibility_probe(f, 6);
    rep.verdict = pr.verdict;
    rep.note = pr.note;
    return rep;
  }

  // Plane-slice sampling: a certified slice of full degree lifts, since a
  // factorization of f would slice to a visible factorization.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_int_distribution<long> coef(-3, 3);
  int full_degree = 0, refuted = 0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<Poly<mpz_class>> args;
    for (int i = 0; i < f.nvars; ++i) {
      auto a = poly_scale(poly_var(2, VarKind::Affine, 0, mpz_class(1)), mpz_class(coef(rng)));
      auto b = poly_scale(poly_var(2, VarKind::Affine, 1, mpz_class(1)), mpz_class(coef(rng)));
      args.push_back(poly_add(poly_add(a, b), poly_const(2, VarKind::Affine, mpz_class(coef(rng)))));
    }
    auto g = poly_compose(f, args);
    if (poly_degree(g) != d) continue;
    ++full_degree;
    auto pr = abs_irreducibility_probe(g, 6);
    if (pr.verdict == ProbeVerdict::Certified) {
      rep.verdict = ProbeVerdict::Certified;
      rep.note = "a full-degree plane slice is certified irreducible (" + pr.note + ")";
      return rep;
    }
    if (pr.verdict == ProbeVerdict::Refuted) ++refuted;
  }

  // Slices settled nothing; measure the singular locus over the rationals.
  // The basis computation is degree-capped so a hard ideal degrades the
  // verdict to inconclusive instead of stalling the count.
  std::vector<Poly<mpq_class>> jac;
  jac.push_back(poly_z_to_q(F));
  for (int i = 0; i < F.nvars; ++i) {
    auto der = poly_derivative(F, i);
    if (!der.t.empty()) jac.push_back(poly_z_to_q(der));
  }
  auto gb = buchberger(jac, grevlex(), std::max(12, 3 * d));
  if (gb.capped) {
    rep.note = "irreducibility undecided: slices uncertified and the singular-locus basis was capped";
    return rep;
  }
  auto fit = hilbert_fit(gb);
  if (fit.ok) rep.sing_dim = fit.r;
  if (fit.ok && fit.r <= 0) {
    rep.verdict = ProbeVerdict::Certified;
    rep.note = fit.r < 0 ? "projective closure is smooth"
                         : "singular locus of the closure is finite";
    return rep;
  }
  if (full_degree > 0 && rep.sing_dim >= 1) {
    rep.verdict = ProbeVerdict::Refuted;
    std::ostringstream os;
    os << "no sampled plane slice certified (" << refuted << "/" << full_degree
       << " visibly split) and the singular locus has dimension " << rep.sing_dim;
    rep.note = os.str();
    return rep;
  }
  rep.note = "irreducibility undecided by slices";
  return rep;
}

// Finiteness of the line family on a projective surface. A surface of
// degree >= 3 that is smooth carries finitely many lines, and smoothness
// mod one good prime lifts (a singular point over the closure of Q would
// reduce to one), so an empty Jacobian scheme mod p settles the question
// without the Grassmannian computation over Q.
LineFamilyReport surface_lines_gate(const Poly<mpz_class>& F, int known_sing_dim) {
  if (known_sing_dim == -1 && poly_degree(F) >= 3) {
    LineFamilyReport lr;
    lr.conclusive = true;
    lr.finite = true;
    lr.note = "smooth over the rationals; the line family is finite";
    return lr;
  }
  for (uint64_t p : {5ull, 7ull, 11ull, 13ull}) {
    auto Fm = poly_reduce_p(F, p);
    if (Fm.t.empty() || poly_degree(Fm) != poly_degree(F)) continue;
    std::vector<Poly<Fp>> jac{Fm};
    for (int i = 0; i < Fm.nvars; ++i) {
      auto der = poly_derivative(Fm, i);
      if (!der.t.empty()) jac.push_back(der);
    }
    auto gb = buchberger(jac, grevlex());
    auto fit = hilbert_fit(gb);
    if (fit.ok && fit.r == -1 && poly_degree(F) >= 3) {
      LineFamilyReport lr;
      lr.conclusive = true;
      lr.finite = true;
      std::ostringstream os;
      os << "smooth mod " << p << "; the line family is finite";
      lr.note = os.str();
      return lr;
    }
  }
  return lines_on_surface_finite_q(F);
}

// Integrality router for a one-dimensional scheme: project to a plane curve
// by variable elimination and probe the image. The image of an irreducible
// scheme is irreducible, so a refuted image refutes the input; certification
// of the image is heuristic support only, and the counting stays exact on
// every route either way.
GateReport curve_integral_gate(const IntegralModel& m) {
  GateReport rep;
  std::vector<Poly<mpq_class>> gens_q;
  for (const auto& g : m.gens) gens_q.push_back(poly_z_to_q(g));
  for (int drop = m.nvars - 1; drop >= 0; --drop) {
    std::vector<Poly<mpq_class>> elim;
    try {
      elim = eliminate(gens_q, m.nvars, {drop});
    } catch (const std::exception&) {
      continue;
    }
    if (elim.size() != 1 || poly_degree(elim[0]) < 1) continue;
    auto plane = poly_q_to_z_primitive(elim[0]);
    int chart = -1;
    for (int c = 0; c < plane.nvars && chart < 0; ++c) {
      bool divisible = true;
      for (const auto& tm : plane.t)
        if (tm.first.e[c] == 0) {
          divisible = false;
          break;
        }
      if (!divisible) chart = c;
    }
    if (chart < 0) {
      rep.verdict = ProbeVerdict::Refuted;
      rep.note = "plane image has a coordinate factor";
      return rep;
    }
    auto aff = poly_dehomogenize(plane, chart);
    auto pr = abs_irreducibility_probe(aff, 6);
    rep.verdict = pr.verdict;
    rep.note = "plane image: " + pr.note;
    return rep;
  }
  rep.note = "no principal plane image found";
  return rep;
}

CountReport count_curve_known(const std::vector<Poly<mpq_class>>& gens, long B,
                              const CurveClass* cls, const PipelineOptions& opt,
                              const std::vector<IntPoint>* known) {
  auto t0 = Clock::now();
  CountReport rep;
  rep.query = join_polys(gens);
  rep.B = B;
  rep.seed = opt.seed;
  rep.epsilon = opt.eps.get_str();
  if (B < 1) throw std::invalid_argument("height bound must be positive");

  IntegralModel m = make_model(gens);
  if (m.nvars != 4) throw std::invalid_argument("curve counting expects quaternary forms");
  if (m.r > 1) throw std::invalid_argument("input is not one-dimensional");

  // congruence class setup
  uint64_t p = 0;
  std::vector<uint64_t> residues;
  long mu = 0;
  std::vector<uint64_t> cls_idx;
  if (cls && cls->p >= 2) {
    p = cls->p;
    if ((int)cls->point.size() != 4)
      throw std::invalid_argument("class point needs four coordinates");
    const FqCtx* ctx = fq_context(p, 1);
    IntPoint rp;
    for (long c : cls->point) rp.x.emplace_back(((c % (long)p) + (long)p) % (long)p);
    auto rfq = specialize_point(rp, ctx);
    if (!rfq) throw std::invalid_argument("class point vanishes mod p");
    for (const auto& c : *rfq) cls_idx.push_back(fq_index(c));
    if (cls_idx[0] != 1) {
      rep.mode = "class-at-infinity";
      rep.trace.push_back("the class lies at infinity mod p; no chart point reduces there");
      rep.count = 0;
      rep.wall_seconds = seconds_since(t0);
      return rep;
    }
    residues = {cls_idx[1], cls_idx[2], cls_idx[3]};
    if (cls->mu > 0) {
      mu = cls->mu;
    } else if (m.r == 1) {
      auto gfq = reduce_model_fq(m, ctx);
      std::vector<Fq> pfq;
      for (uint64_t i : cls_idx) pfq.push_back(fq_from_index(ctx, i));
      if (jacobian_rank_at(gfq, pfq, ctx) == 2) {
        mu = 1;
      } else {
        auto mres = multiplicity_at(gfq, pfq, 1, 10, fq_zero(ctx));
        mu = mres.ok ? mres.mu : 1;
        if (!mres.ok) rep.trace.push_back("class multiplicity did not stabilize; using 1");
      }
    }
    std::ostringstream os;
    os << "class " << key_str(cls_idx) << " mod " << p << ", multiplicity " << mu;
    rep.trace.push_back(os.str());
  }

  bool primary = true;
  if (m.r < 1) {
    primary = false;
    rep.trace.push_back("zero-dimensional or empty input; counted directly");
  } else if (known) {
    rep.trace.push_back("derived curve with a supplied point set; integrality gate skipped");
  } else {
    GateReport gate = curve_integral_gate(m);
    if (gate.verdict == ProbeVerdict::Refuted) {
      primary = false;
      rep.trace.push_back("integrality refuted (" + gate.note + "); slicing route");
    } else if (gate.verdict == ProbeVerdict::Inconclusive) {
      rep.status = PipelineStatus::InconclusiveGeometry;
      rep.trace.push_back("integrality unconfirmed (" + gate.note +
                          "); certificates carry empirical budgets");
    }
  }

  // enumeration shared by every route
  std::vector<IntPoint> pts;
  try {
    if (known) {
      pts = *known;
    } else {
      EnumOptions eo;
      eo.B = B;
      eo.work_cap = opt.work_cap;
      eo.threads = opt.threads;
      eo.p = p;
      eo.residues = residues;
      auto fc = curve_fibration_count(m.gens, eo, &pts);
      if (fc.degenerate_fibers > 0) {
        std::ostringstream os;
        os << fc.degenerate_fibers << " degenerate fibers counted as whole lines";
        rep.trace.push_back(os.str());
      }
    }
  } catch (const WorkCapExceeded&) {
    rep.status = PipelineStatus::WorkCapped;
    rep.mode = "aborted";
    rep.trace.push_back("enumeration exceeded the work cap");
    rep.wall_seconds = seconds_since(t0);
    return rep;
  }
  rep.count = (long)pts.size();
  rep.mode = primary ? "determinant-certificates" : "direct-slicing";

  long e = m.d;
  if (primary && m.r == 1 && !pts.empty()) {
    // window threshold B^((1+eps)/e), divided by p^(1/mu) inside a class
    mpq_class expo = (mpq_class(1) + opt.eps) / e;
    BigFloat threshold = BigFloat::pow(BigFloat(mpz_class(B)), BigFloat(expo));
    if (p >= 2 && mu >= 1)
      threshold = threshold / BigFloat::pow(BigFloat(mpz_class((unsigned long)p)),
                                            BigFloat(mpq_class(1, mu)));
    auto omega = window_avoiding(threshold, opt.omega_count, mpz_class((unsigned long)p));
    {
      std::ostringstream os;
      os << "window threshold B^((1+eps)/" << e << ")";
      if (p >= 2) os << "/p^(1/" << mu << ")";
      os << " = " << threshold.str(6) << "; primes";
      for (const auto& q : omega) os << " " << q.get_str();
      rep.trace.push_back(os.str());
    }
    bool inconclusive_cert = false;
    for (const auto& qz : omega) {
      uint64_t q = qz.get_ui();
      const FqCtx* ctx = fq_context(q, 1);
      auto gens_fq = reduce_model_fq(m, ctx);
      auto part = partition_mod(pts, q);
      for (const auto& [key, cpts] : part) {
        ClassSummary cs;
        cs.q = qz;
        cs.point = key;
        cs.points = (long)cpts.size();
        std::vector<Fq> kfq;
        for (uint64_t i : key) kfq.push_back(fq_from_index(ctx, i));
        if (jacobian_rank_at(gens_fq, kfq, ctx) != 2) {
          auto mres = multiplicity_at(gens_fq, kfq, 1, 10, fq_zero(ctx));
          if (!mres.ok || mres.mu != 1) {
            cs.good = false;
            cs.note = mres.ok ? "singular reduction" : "multiplicity did not stabilize";
            rep.classes.push_back(cs);
            continue;
          }
        }
        cs.good = true;
        try {
          auto cert = aux_form_for_points(m, B, q, key, cpts, opt.k_cap, opt.eps);
          cs.aux_degree = cert.k;
          cs.bezout_budget = mpz_class(e) * cert.k;
          cs.certified = cert.nf_nonzero && cert.vanishes_on_points &&
                         mpz_class(cs.points) <= cs.bezout_budget;
          if (!cs.certified) {
            cs.note = "class count exceeds the intersection budget";
            inconclusive_cert = true;
          }
          rep.certificates.push_back(std::move(cert));
        } catch (const std::exception& ex) {
          cs.certified = false;
          cs.note = ex.what();
          inconclusive_cert = true;
        }
        rep.classes.push_back(cs);
      }
    }
    if (inconclusive_cert) {
      rep.mode = "direct-slicing (certificate fallback)";
      rep.trace.push_back(
          "a class certificate was inconclusive; the exact slicing count stands");
    }
  }

  if (opt.oracle_check) {
    std::vector<Poly<mpz_class>> aff;
    for (const auto& g : m.gens) {
      auto a = poly_dehomogenize(g, 0);
      aff.push_back(a);
    }
    EnumOptions eo;
    eo.B = B;
    eo.work_cap = opt.work_cap;
    eo.threads = opt.threads;
    eo.p = p;
    eo.residues = residues;
    auto orc = affine_points(aff, eo);
    rep.oracle_checked = true;
    rep.oracle_count = (long)orc.points.size();
  }
  if (opt.collect_points) rep.points = pts;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

void collect_degree_monomials(int nvars, int d, int var, std::vector<int32_t>& e,
                              std::vector<Monomial>& out) {
  if (var == nvars - 1) {
    e[var] = d;
    out.push_back(mon_make(std::vector<int32_t>(e)));
    return;
  }
  for (int k = 0; k <= d; ++k) {
    e[var] = k;
    collect_degree_monomials(nvars, d - k, var + 1, e, out);
  }
}

std::vector<Monomial> degree_monomials(int nvars, int d) {
  std::vector<Monomial> out;
  std::vector<int32_t> e(nvars, 0);
  collect_degree_monomials(nvars, d, 0, e, out);
  std::sort(out.begin(), out.end(),
            [&](const Monomial& a, const Monomial& b) { return mon_less(a, b, grevlex()); });
  return out;
}

Poly<mpz_class> form_from_vector(int nvars, const std::vector<Monomial>& mons,
                                 const std::vector<mpz_class>& v) {
  Poly<mpz_class> g{nvars, VarKind::Projective, {}};
  for (size_t j = 0; j < mons.size(); ++j)
    if (v[j] != 0) g.t.push_back({mons[j], v[j]});
  poly_normalize(g);
  return g;
}

bool proportional(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
  size_t i0 = 0;
  while (i0 < a.size() && a[i0] == 0 && b[i0] == 0) ++i0;
  if (i0 == a.size()) return true;
  for (size_t k = 0; k < a.size(); ++k)
    if (a[k] * b[i0] != b[k] * a[i0]) return false;
  return true;
}

// Exact dichotomy search: is there a degree-d form, independent of F, that
// vanishes on every listed point? The kernel of the full evaluation matrix
// only shrinks as rows are added, so a growing prefix answers exactly: a
// one-dimensional prefix kernel rules a second form out, and any candidate
// from the prefix kernel is verified against the remaining points before it
// is accepted.
std::optional<Poly<mpz_class>> dichotomy_form(const Poly<mpz_class>& F,
                                              const std::vector<IntPoint>& pts) {
  int d = poly_degree(F);
  auto mons = degree_monomials(F.nvars, d);
  std::vector<mpz_class> fvec(mons.size(), 0);
  for (const auto& tm : F.t) {
    auto it = std::lower_bound(mons.begin(), mons.end(), tm.first,
                               [&](const Monomial& a, const Monomial& b) {
                                 return mon_less(a, b, grevlex());
                               });
    fvec[it - mons.begin()] = tm.second;
  }
  std::vector<size_t> rows;
  for (size_t i = 0; i < pts.size() && rows.size() < 3 * mons.size(); ++i) rows.push_back(i);
  std::set<size_t> in_rows(rows.begin(), rows.end());
  for (int round = 0; round < (int)mons.size() + 2; ++round) {
    std::vector<IntPoint> sel;
    for (size_t i : rows) sel.push_back(pts[i]);
    auto em = build_eval_matrix(sel, mons);
    Mat<mpq_class> mq(em.entries.rows, em.entries.cols, mpq_class(0));
    for (int i = 0; i < mq.rows; ++i)
      for (int j = 0; j < mq.cols; ++j) mq.at(i, j) = mpq_class(em.entries.at(i, j));
    auto kb = kernel_basis(std::move(mq), mpq_class(0));
    if (kb.size() <= 1) return std::nullopt;
    bool progressed = false;
    for (const auto& v : kb) {
      auto vz = primitive_vector(v);
      if (proportional(vz, fvec)) continue;
      auto G = form_from_vector(F.nvars, mons, vz);
      std::optional<size_t> violator;
      for (size_t i = 0; i < pts.size(); ++i) {
        if (in_rows.count(i)) continue;
        if (poly_evaluate(G, pts[i].x) != 0) {
          violator = i;
          break;
        }
      }
      if (!violator) return G;
      if (!in_rows.count(*violator)) {
        rows.push_back(*violator);
        in_rows.insert(*violator);
        progressed = true;
      }
    }
    if (!progressed) return std::nullopt;
  }
  return std::nullopt;
}

CountReport count_surface_impl(const Poly<mpq_class>& f_in, long B, const PipelineOptions& opt) {
  auto t0 = Clock::now();
  CountReport rep;
  rep.B = B;
  rep.seed = opt.seed;
  rep.epsilon = opt.eps.get_str();
  if (B < 1) throw std::invalid_argument("height bound must be positive");
  Poly<mpq_class> fq_poly = f_in;
  fq_poly.vk = VarKind::Affine;
  rep.query = poly_to_string(fq_poly);
  if (fq_poly.nvars != 3) throw std::invalid_argument("surface counting expects three variables");
  auto f = poly_q_to_z_primitive(fq_poly);
  int d = poly_degree(f);
  if (d < 4) throw std::invalid_argument("surface counting expects degree at least four");

  EnumOptions eo;
  eo.B = B;
  eo.work_cap = opt.work_cap;
  eo.threads = opt.threads;
  EnumResult er;
  try {
    er = affine_points({f}, eo);
  } catch (const WorkCapExceeded&) {
    rep.status = PipelineStatus::WorkCapped;
    rep.mode = "aborted";
    rep.trace.push_back("enumeration exceeded the work cap");
    rep.wall_seconds = seconds_since(t0);
    return rep;
  }
  long N = (long)er.points.size();
  rep.count = N;

  if (N == 0) {
    rep.mode = "empty";
    rep.trace.push_back("empty box; the hypothesis gates were skipped");
    if (opt.oracle_check) {
      auto fc = fibration_count(f, eo);
      rep.oracle_checked = true;
      rep.oracle_count = fc.count;
    }
    rep.wall_seconds = seconds_since(t0);
    return rep;
  }

  GateReport gate = irreducibility_gate(f, opt.seed);
  if (gate.verdict == ProbeVerdict::Refuted) {
    rep.status = PipelineStatus::HypothesisViolation;
    rep.mode = "refused";
    rep.trace.push_back("irreducibility refuted: " + gate.note);
    rep.wall_seconds = seconds_since(t0);
    return rep;
  }
  if (gate.verdict == ProbeVerdict::Inconclusive) {
    rep.status = PipelineStatus::InconclusiveGeometry;
    rep.trace.push_back("irreducibility unconfirmed: " + gate.note);
  } else {
    rep.trace.push_back("irreducible: " + gate.note);
  }

  auto F = poly_homogenize(f);
  auto lines = surface_lines_gate(F, gate.sing_dim);
  if (lines.conclusive && !lines.finite) {
    rep.status = PipelineStatus::HypothesisViolation;
    rep.mode = "refused";
    rep.trace.push_back("infinite line family: " + lines.note);
    rep.wall_seconds = seconds_since(t0);
    return rep;
  }
  if (!lines.conclusive) {
    rep.status = PipelineStatus::InconclusiveGeometry;
    rep.trace.push_back("line family undecided: " + lines.note);
  } else {
    rep.trace.push_back("line family: " + lines.note);
  }

  std::vector<IntPoint> chart;
  chart.reserve(er.points.size());
  for (const auto& pt : er.points) {
    IntPoint h;
    h.x.reserve(4);
    h.x.emplace_back(1);
    for (const auto& c : pt.x) h.x.push_back(c);
    chart.push_back(std::move(h));
  }

  if (auto G = dichotomy_form(F, chart)) {
    rep.mode = "dichotomy-curve";
    rep.trace.push_back("a second degree-" + std::to_string(d) +
                        " form vanishes on the whole point set; counting on the intersection curve");
    EnumOptions ec = eo;
    auto wc = curve_fibration_count({F, *G}, ec);
    if (wc.count != N)
      throw std::logic_error("intersection-curve count disagrees with the point set");
    {
      std::ostringstream os;
      os << "intersection curve verified the count: " << wc.count.get_str();
      rep.trace.push_back(os.str());
    }
  } else {
    rep.mode = "class-partition";
    BigFloat sqd = BigFloat::pow(BigFloat(mpz_class(d)), BigFloat(mpq_class(1, 2)));
    BigFloat threshold =
        BigFloat::pow(BigFloat(mpz_class(B)),
                      BigFloat(mpq_class(1) + opt.eps) / sqd);
    auto omega = window_avoiding(threshold, std::max(1, opt.omega_count), mpz_class(0));
    uint64_t q = omega.front().get_ui();
    {
      std::ostringstream os;
      os << "window threshold B^((1+eps)/sqrt(" << d << ")) = " << threshold.str(6)
         << "; partition prime " << q;
      rep.trace.push_back(os.str());
    }
    IntegralModel m4 = make_model({poly_z_to_q(F)});
    auto part = partition_mod(chart, q);
    std::vector<std::vector<uint64_t>> keys;
    keys.reserve(part.size());
    for (const auto& [key, cpts] : part) keys.push_back(key);
    auto gpp = good_point_filter(m4, q, keys, opt.good_e_max);
    long good_total = 0, bad_total = 0, good_classes = 0;
    for (size_t ki = 0; ki < keys.size(); ++ki) {
      const auto& key = keys[ki];
      const auto& cpts = part[key];
      const auto& verdict = gpp.reports[ki];
      ClassSummary cs;
      cs.q = mpz_class((unsigned long)q);
      cs.point = key;
      cs.points = (long)cpts.size();
      if (!verdict.good) {
        cs.good = false;
        cs.note = verdict.conclusive ? "filtered by the good-point conditions"
                                     : "good-point conditions inconclusive";
        if (!verdict.note.empty()) cs.note += " (" + verdict.note + ")";
        bad_total += cs.points;
        rep.classes.push_back(cs);
        continue;
      }
      cs.good = true;
      ++good_classes;
      good_total += cs.points;
      try {
        auto cert = aux_form_for_points(m4, B, q, key, cpts, opt.k_cap, opt.eps);
        cs.aux_degree = cert.k;
        cs.bezout_budget = mpz_class(d) * cert.k;
        auto mbc = mult_bound_check(m4, key, {F, cert.G}, q);
        if (mbc.hypothesis_ok && mbc.computed && !mbc.bound_ok)
          throw std::logic_error("multiplicity bound violated at a good point");
        CurveClass inner_cls;
        inner_cls.p = q;
        for (uint64_t c : key) inner_cls.point.push_back((long)c);
        inner_cls.mu = mbc.computed ? mbc.mu : 0;
        PipelineOptions inner_opt = opt;
        inner_opt.oracle_check = false;
        inner_opt.omega_count = 1;
        inner_opt.collect_points = false;
        auto inner =
            count_curve_known({poly_z_to_q(F), poly_z_to_q(cert.G)}, B, &inner_cls, inner_opt, &cpts);
        if (inner.count != cs.points)
          throw std::logic_error("nested curve count disagrees with the class");
        cs.certified = cert.nf_nonzero && cert.vanishes_on_points &&
                       (!mbc.hypothesis_ok || mbc.bound_ok);
        if (mbc.computed) {
          std::ostringstream os;
          os << "curve degree " << mbc.e << ", multiplicity " << mbc.mu;
          cs.note = os.str();
        }
        rep.certificates.push_back(std::move(cert));
        for (auto& c : inner.certificates) rep.certificates.push_back(std::move(c));
      } catch (const std::logic_error&) {
        throw;
      } catch (const std::exception& ex) {
        cs.certified = false;
        cs.note = ex.what();
      }
      rep.classes.push_back(cs);
    }
    if (good_total + bad_total != N)
      throw std::logic_error("class partition lost points");
    {
      std::ostringstream os;
      os << good_classes << " good classes carrying " << good_total << " points, "
         << (keys.size() - good_classes) << " bad classes carrying " << bad_total
         << " points (counted exactly)";
      rep.trace.push_back(os.str());
    }
  }

  if (opt.oracle_check) {
    auto fc = fibration_count(f, eo);
    rep.oracle_checked = true;
    rep.oracle_count = fc.count;
  }
  if (opt.collect_points) rep.points = er.points;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

// Degree-d homogeneous part of an affine polynomial.
Poly<mpz_class> top_form(const Poly<mpz_class>& f) {
  int d = poly_degree(f);
  Poly<mpz_class> out = poly_zero<mpz_class>(f.nvars, f.vk);
  for (const auto& tm : f.t)
    if (tm.first.deg == d) out.t.push_back(tm);
  poly_normalize(out);
  return out;
}

// Substitute an integer for the last variable, dropping it from the ring.
Poly<mpz_class> substitute_last(const Poly<mpz_class>& g, const mpz_class& bval) {
  Poly<mpz_class> out = poly_zero<mpz_class>(g.nvars - 1, VarKind::Affine);
  std::map<std::vector<int32_t>, mpz_class> acc;
  for (const auto& tm : g.t) {
    std::vector<int32_t> e(tm.first.e.begin(), tm.first.e.end() - 1);
    mpz_class c = tm.second;
    for (int32_t j = 0; j < tm.first.e.back(); ++j) c *= bval;
    acc[e] += c;
  }
  for (auto& [e, c] : acc) {
    if (c == 0) continue;
    auto ec = e;
    out.t.push_back({mon_make(std::move(ec)), c});
  }
  poly_normalize(out);
  return out;
}

CountReport count_hypersurface_impl(const Poly<mpq_class>& f_in, long B,
                                    const PipelineOptions& opt) {
  auto t0 = Clock::now();
  CountReport rep;
  rep.B = B;
  rep.seed = opt.seed;
  rep.epsilon = opt.eps.get_str();
  if (B < 1) throw std::invalid_argument("height bound must be positive");
  Poly<mpq_class> fq_poly = f_in;
  fq_poly.vk = VarKind::Affine;
  rep.query = poly_to_string(fq_poly);
  int n = fq_poly.nvars;
  if (n < 4) throw std::invalid_argument("hypersurface counting expects at least four variables");
  auto f = poly_q_to_z_primitive(fq_poly);
  int d = poly_degree(f);
  if (d < 4) throw std::invalid_argument("hypersurface counting expects degree at least four");

  GateReport gate = irreducibility_gate(f, opt.seed);
  if (gate.verdict == ProbeVerdict::Refuted) {
    rep.status = PipelineStatus::HypothesisViolation;
    rep.mode = "refused";
    rep.trace.push_back("irreducibility refuted: " + gate.note);
    rep.wall_seconds = seconds_since(t0);
    return rep;
  }
  if (gate.verdict == ProbeVerdict::Inconclusive) {
    rep.status = PipelineStatus::InconclusiveGeometry;
    rep.trace.push_back("irreducibility unconfirmed: " + gate.note);
  } else {
    rep.trace.push_back("irreducible: " + gate.note);
  }
  rep.trace.push_back(
      "finiteness of linear subvarieties inside the slices is accepted on the caller's "
      "assertion and is not verified here");

  // Slicing form a with last coefficient one, so every point lifts with an
  // integral last coordinate. The slice polynomial keeps exact degree d for
  // every value of the level when the top form survives the substitution,
  // which rules the finitely many divisor directions out.
  std::mt19937_64 rng(opt.seed ^ 0xda3e39cb94b95bdbull);
  auto fd = top_form(f);
  std::vector<long> a(n - 1, 0);
  bool have_a = false;
  for (int trial = 0; trial < 100 && !have_a; ++trial) {
    long range = 2 + trial / 10;
    std::uniform_int_distribution<long> coef(-range, range);
    for (int i = 0; i < n - 1; ++i) a[i] = coef(rng);
    std::vector<Poly<mpz_class>> args;
    Poly<mpz_class> last = poly_zero<mpz_class>(n - 1, VarKind::Affine);
    for (int i = 0; i < n - 1; ++i) {
      args.push_back(poly_var(n - 1, VarKind::Affine, i, mpz_class(1)));
      if (a[i] != 0)
        last = poly_sub(last, poly_scale(args.back(), mpz_class(a[i])));
    }
    args.push_back(last);
    if (!poly_compose(fd, args).t.empty()) have_a = true;
  }
  if (!have_a) throw std::runtime_error("no admissible slicing form within the search budget");
  long c = 1;
  for (long ai : a) c += std::abs(ai);
  {
    std::ostringstream os;
    os << "slicing form (";
    for (int i = 0; i < n - 1; ++i) os << a[i] << ",";
    os << "1), coefficient sum " << c << ", levels in [" << -c * B << "," << c * B << "]";
    rep.trace.push_back(os.str());
  }

  // Composed family in which the last variable is the slice level.
  std::vector<Poly<mpz_class>> gargs;
  Poly<mpz_class> lastg = poly_var(n, VarKind::Affine, n - 1, mpz_class(1));
  for (int i = 0; i < n - 1; ++i) {
    gargs.push_back(poly_var(n, VarKind::Affine, i, mpz_class(1)));
    if (a[i] != 0) lastg = poly_sub(lastg, poly_scale(gargs.back(), mpz_class(a[i])));
  }
  gargs.push_back(lastg);
  auto g = poly_compose(f, gargs);

  mpz_class total = 0, chain = 0;
  long n_empty = 0, n_counted = 0, n_inconclusive = 0, n_bad = 0;
  std::vector<IntPoint> collected;
  for (long b = -c * B; b <= c * B; ++b) {
    auto fb = substitute_last(g, mpz_class(b));
    if (poly_degree(fb) != d) throw std::logic_error("slice degree drifted from the family");
    std::vector<IntPoint> spts;
    bool bad = false;
    std::string reason;
    PipelineOptions io = opt;
    io.oracle_check = false;
    io.collect_points = true;
    io.omega_count = 1;
    CountReport inner;
    if (n - 1 == 3) {
      inner = count_surface_impl(poly_z_to_q(fb), B, io);
    } else {
      inner = count_hypersurface_impl(poly_z_to_q(fb), B, io);
    }
    if (inner.status == PipelineStatus::WorkCapped) {
      rep.status = PipelineStatus::WorkCapped;
      rep.mode = "aborted";
      std::ostringstream os;
      os << "slice at level " << b << " exceeded the work cap";
      rep.trace.push_back(os.str());
      rep.wall_seconds = seconds_since(t0);
      return rep;
    }
    if (inner.status == PipelineStatus::HypothesisViolation) {
      bad = true;
      ++n_bad;
      reason = inner.trace.empty() ? "refused" : inner.trace.back();
      EnumOptions eo;
      eo.B = B;
      eo.work_cap = opt.work_cap;
      eo.threads = opt.threads;
      try {
        spts = affine_points({fb}, eo).points;
      } catch (const WorkCapExceeded&) {
        rep.status = PipelineStatus::WorkCapped;
        rep.mode = "aborted";
        rep.trace.push_back("direct count of a refused slice exceeded the work cap");
        rep.wall_seconds = seconds_since(t0);
        return rep;
      }
    } else {
      spts = std::move(inner.points);
      if (inner.status == PipelineStatus::InconclusiveGeometry) {
        ++n_inconclusive;
        if (rep.status == PipelineStatus::Ok) rep.status = PipelineStatus::InconclusiveGeometry;
        std::ostringstream os;
        os << "slice at level " << b << " carries unresolved geometry: "
           << (inner.trace.empty() ? "" : inner.trace.front());
        rep.trace.push_back(os.str());
      }
      if (!spts.empty()) ++n_counted;
      for (auto& cert : inner.certificates) {
        if (rep.certificates.size() >= 24) break;
        rep.certificates.push_back(std::move(cert));
      }
    }
    chain += (long)spts.size();
    long lifted = 0;
    for (const auto& pt : spts) {
      mpz_class yn = b;
      for (int i = 0; i < n - 1; ++i) yn -= mpz_class(a[i]) * pt.x[i];
      if (abs(yn) <= B) {
        ++lifted;
        if (opt.collect_points) {
          IntPoint full = pt;
          full.x.push_back(yn);
          collected.push_back(std::move(full));
        }
      }
    }
    total += lifted;
    if (bad || lifted > 0) {
      SliceSummary ss;
      ss.b = b;
      ss.count = lifted;
      ss.bad = bad;
      ss.reason = reason;
      rep.slices.push_back(std::move(ss));
    } else if (spts.empty()) {
      ++n_empty;
    }
  }
  rep.count = total;
  rep.chain_total = chain;
  rep.mode = "slice-sum";
  {
    std::ostringstream os;
    os << n_counted << " slices counted by the nested pipeline";
    if (n_inconclusive) os << " (" << n_inconclusive << " with unresolved geometry)";
    os << ", " << n_bad << " refused and counted directly, " << n_empty << " empty";
    rep.trace.push_back(os.str());
  }
  if (n_bad > opt.bad_slice_cap) {
    std::ostringstream os;
    os << "warning: " << n_bad << " refused slices exceed the budget of " << opt.bad_slice_cap;
    rep.trace.push_back(os.str());
  }

  if (opt.oracle_check) {
    EnumOptions eo;
    eo.B = B;
    eo.work_cap = opt.work_cap;
    eo.threads = opt.threads;
    try {
      auto er = affine_points({f}, eo);
      rep.oracle_checked = true;
      rep.oracle_count = (long)er.points.size();
    } catch (const WorkCapExceeded&) {
      rep.trace.push_back("oracle enumeration exceeded the work cap; skipped");
    }
  }
  if (opt.collect_points) {
    std::sort(collected.begin(), collected.end());
    rep.points = std::move(collected);
  }
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

}  // namespace

CountReport count_curve(const std::vector<Poly<mpq_class>>& gens, long B,
                        const CurveClass* cls, const PipelineOptions& opt) {
  return count_curve_known(gens, B, cls, opt, nullptr);
}

CountReport count_surface(const Poly<mpq_class>& f, long B, const PipelineOptions& opt) {
  return count_surface_impl(f, B, opt);
}

CountReport count_hypersurface(const Poly<mpq_class>& f, long B, const PipelineOptions& opt) {
  return count_hypersurface_impl(f, B, opt);
}

ExponentFit exponent_fit(const std::vector<std::pair<long, mpz_class>>& samples) {
  ExponentFit out;
  if (samples.size() < 4)
    throw std::invalid_argument("the fit needs at least four grid values");
  std::set<long> bs;
  for (const auto& [b, c] : samples) {
    if (b < 1) throw std::invalid_argument("grid values must be positive");
    bs.insert(b);
  }
  if (bs.size() != samples.size())
    throw std::invalid_argument("grid values must be distinct");
  bool any = false;
  for (const auto& [b, c] : samples)
    if (c > 0) any = true;
  if (!any) {
    out.note = "all counts are zero; the exponent is undefined";
    return out;
  }
  out.defined = true;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t n = samples.size();
  std::vector<std::pair<double, double>> xy;
  for (const auto& [b, c] : samples) {
    double x = std::log((double)b);
    double y = std::log(mpz_class(c + 1).get_d());
    xy.push_back({x, y});
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = n * sxx - sx * sx;
  out.slope = (n * sxy - sx * sy) / denom;
  out.intercept = (sy - out.slope * sx) / n;
  for (const auto& [x, y] : xy) out.residuals.push_back(y - (out.slope * x + out.intercept));
  return out;
}

ExponentFit exponent_fit_query(const std::vector<Poly<mpq_class>>& gens, bool projective,
                               const std::vector<long>& grid, const PipelineOptions& opt) {
  std::vector<Poly<mpz_class>> gz;
  for (const auto& g : gens) gz.push_back(poly_q_to_z_primitive(g));
  std::vector<std::pair<long, mpz_class>> samples;
  for (long b : grid) {
    EnumOptions eo;
    eo.B = b;
    eo.work_cap = opt.work_cap;
    eo.threads = opt.threads;
    auto er = projective ? projective_points(gz, eo) : affine_points(gz, eo);
    samples.push_back({b, mpz_class((long)er.points.size())});
  }
  return exponent_fit(samples);
}

}  // namespace detcount
