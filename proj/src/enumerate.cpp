#include "detcount/enumerate.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace detcount {

namespace {

using i128 = __int128;

bool fits_i128(const mpz_class& v) { return mpz_sizeinbase(v.get_mpz_t(), 2) <= 126; }

i128 to_i128(const mpz_class& v) {
  bool neg = v < 0;
  mpz_class a = neg ? mpz_class(-v) : v;
  mpz_class hi = a >> 64;
  mpz_class lo = a - (hi << 64);
  i128 r = ((i128)hi.get_ui() << 64) | (i128)lo.get_ui();
  return neg ? -r : r;
}

mpz_class from_i128(i128 v) {
  bool neg = v < 0;
  unsigned __int128 a = neg ? (unsigned __int128)0 - (unsigned __int128)v : (unsigned __int128)v;
  mpz_class r((uint64_t)(a >> 64));
  r <<= 64;
  r += mpz_class((uint64_t)a);
  if (neg) r = -r;
  return r;
}

// Exact evaluator with a 128-bit fast path. The compile step proves the
// absolute bound sum |c| * B^deg fits, so the evaluation never overflows.
struct FastTerm {
  i128 coef;
  std::vector<int> slots;
};

struct FastEval {
  bool fits = false;
  std::vector<FastTerm> terms;
  std::vector<int> slot_var;  // slot -> variable, exponents ascending per var
  std::vector<int> var_base;  // variable -> first slot (exponent 1), -1 if unused
  Poly<mpz_class> exact;
  int nvars = 0;
};

FastEval compile_eval(const Poly<mpz_class>& f, long B) {
  FastEval fe;
  fe.exact = f;
  fe.nvars = f.nvars;
  mpz_class bound = 0, Bz(B < 0 ? -B : B);
  if (Bz == 0) Bz = 1;
  std::vector<int> varmax(f.nvars, 0);
  for (const auto& tm : f.t) {
    mpz_class pw;
    mpz_pow_ui(pw.get_mpz_t(), Bz.get_mpz_t(), tm.first.deg);
    bound += abs(tm.second) * pw;
    for (int v = 0; v < f.nvars; ++v) varmax[v] = std::max(varmax[v], (int)tm.first.e[v]);
  }
  fe.fits = fits_i128(bound);
  if (!fe.fits) return fe;
  fe.var_base.assign(f.nvars, -1);
  for (int v = 0; v < f.nvars; ++v) {
    if (varmax[v] == 0) continue;
    fe.var_base[v] = (int)fe.slot_var.size();
    for (int e = 1; e <= varmax[v]; ++e) fe.slot_var.push_back(v);
  }
  for (const auto& tm : f.t) {
    FastTerm t;
    t.coef = to_i128(tm.second);
    for (int v = 0; v < f.nvars; ++v)
      if (tm.first.e[v]) t.slots.push_back(fe.var_base[v] + tm.first.e[v] - 1);
    fe.terms.push_back(std::move(t));
  }
  return fe;
}

i128 eval_i128(const FastEval& fe, const long long* x, std::vector<i128>& pw) {
  pw.resize(fe.slot_var.size());
  for (size_t s = 0; s < fe.slot_var.size(); ++s) {
    int v = fe.slot_var[s];
    pw[s] = ((int)s == fe.var_base[v]) ? (i128)x[v] : pw[s - 1] * (i128)x[v];
  }
  i128 acc = 0;
  for (const auto& t : fe.terms) {
    i128 val = t.coef;
    for (int s : t.slots) val *= pw[s];
    acc += val;
  }
  return acc;
}

mpz_class eval_value(const FastEval& fe, const long long* x, std::vector<i128>& pw) {
  if (fe.fits) return from_i128(eval_i128(fe, x, pw));
  std::vector<mpz_class> xz(fe.nvars);
  for (int i = 0; i < fe.nvars; ++i) xz[i] = mpz_class((long)x[i]);
  return poly_evaluate(fe.exact, xz);
}

bool eval_zero(const FastEval& fe, const long long* x, std::vector<i128>& pw) {
  if (fe.fits) return eval_i128(fe, x, pw) == 0;
  std::vector<mpz_class> xz(fe.nvars);
  for (int i = 0; i < fe.nvars; ++i) xz[i] = mpz_class((long)x[i]);
  return poly_evaluate(fe.exact, xz) == 0;
}

std::vector<long> range_values(long B, uint64_t p, uint64_t residue) {
  std::vector<long> v;
  if (p == 0) {
    v.reserve(2 * B + 1);
    for (long t = -B; t <= B; ++t) v.push_back(t);
    return v;
  }
  long pm = (long)p;
  long start = (long)(residue % p);
  start -= ((start + B) / pm) * pm;
  while (start < -B) start += pm;
  for (long t = start; t <= B; t += pm) v.push_back(t);
  return v;
}

long long content_ll(const long long* x, int n) {
  long long g = 0;
  for (int i = 0; i < n; ++i) {
    long long a = x[i] < 0 ? -x[i] : x[i];
    g = std::gcd(g, a);
  }
  return g;
}

struct KernelContext {
  std::vector<Poly<mpz_class>> gens;
  std::vector<FastEval> checks;
  int solver = -1;
  std::vector<Poly<mpz_class>> coeff;  // solver coefficients in the outer vars
  std::vector<FastEval> coeff_fe;
  int nvars = 0;
};

KernelContext build_context(const std::vector<Poly<mpz_class>>& gens, long B) {
  KernelContext ctx;
  ctx.gens = gens;
  ctx.nvars = gens[0].nvars;
  for (const auto& g : gens) ctx.checks.push_back(compile_eval(g, B));
  int last = ctx.nvars - 1;
  // prefer closed-form solvable shapes in the last coordinate
  int best_cls = 1 << 20, best_dn = 1 << 20;
  for (size_t i = 0; i < gens.size(); ++i) {
    int dn = 0;
    std::vector<char> degs_seen(64, 0);
    for (const auto& tm : gens[i].t) {
      int e = tm.first.e[last];
      dn = std::max(dn, e);
      if (e < 64) degs_seen[e] = 1;
    }
    if (dn == 0) continue;
    int cls;
    if (dn == 1)
      cls = 1;
    else if (dn == 2)
      cls = 2;
    else {
      int inner = 0;
      for (int e = 1; e < dn && e < 64; ++e) inner += degs_seen[e];
      cls = (inner == 0) ? 3 : 4;  // binomial in the last coordinate
    }
    if (cls < best_cls || (cls == best_cls && dn < best_dn)) {
      best_cls = cls;
      best_dn = dn;
      ctx.solver = (int)i;
    }
  }
  if (ctx.solver >= 0) {
    const auto& g = gens[ctx.solver];
    int dn = 0;
    for (const auto& tm : g.t) dn = std::max(dn, (int)tm.first.e[last]);
    ctx.coeff.assign(dn + 1, Poly<mpz_class>{ctx.nvars - 1, VarKind::Affine, {}});
    for (const auto& tm : g.t) {
      std::vector<int32_t> e(tm.first.e.begin(), tm.first.e.end() - 1);
      ctx.coeff[tm.first.e[last]].t.push_back({mon_make(std::move(e)), tm.second});
    }
    for (auto& c : ctx.coeff) poly_normalize(c);
    for (const auto& c : ctx.coeff) ctx.coeff_fe.push_back(compile_eval(c, B));
  }
  return ctx;
}

struct ShardState {
  std::vector<IntPoint> points;
};

// candidate filters ------------------------------------------------------

bool accept_projective(const long long* x, int n, const EnumOptions& opt) {
  int lead = -1;
  for (int i = 0; i < n; ++i)
    if (x[i] != 0) {
      lead = i;
      break;
    }
  if (lead < 0 || x[lead] < 0) return false;
  if (opt.x0_nonzero && x[0] == 0) return false;
  return content_ll(x, n) == 1;
}

IntPoint to_point(const long long* x, int n) {
  IntPoint p;
  p.x.reserve(n);
  for (int i = 0; i < n; ++i) p.x.emplace_back((long)x[i]);
  return p;
}

template <bool Projective>
void process_shard(const KernelContext& ctx, const EnumOptions& opt, bool cls, uint64_t lam,
                   long x0, std::atomic<uint64_t>& work_total, std::atomic<bool>& cancelled,
                   ShardState& out) {
  int n = ctx.nvars;
  int outer = n - 1;
  long B = opt.B;
  auto residue_for = [&](int coord) -> uint64_t {
    if (!cls) return 0;
    if (Projective) return (lam * opt.class_rep[coord]) % opt.p;
    return opt.residues[coord] % opt.p;
  };
  std::vector<std::vector<long>> lists(outer);
  for (int i = 1; i < outer; ++i) lists[i] = range_values(B, cls ? opt.p : 0, residue_for(i));
  std::vector<long> last_list = range_values(B, cls ? opt.p : 0, residue_for(n - 1));
  uint64_t last_res = residue_for(n - 1);

  std::vector<long long> x(n, 0);
  x[0] = x0;
  std::vector<int> idx(outer, 0);
  std::vector<i128> pw;
  std::vector<mpz_class> cvals(ctx.coeff.size());
  uint64_t local_work = 0;
  auto flush = [&]() {
    work_total += local_work;
    local_work = 0;
    if (work_total > opt.work_cap) cancelled = true;
  };

  bool done = false;
  while (!done && !cancelled.load(std::memory_order_relaxed)) {
    for (int i = 1; i < outer; ++i) x[i] = lists[i][idx[i]];
    ++local_work;
    if ((local_work & 1023) == 0) flush();

    auto try_candidate = [&](long t, int skip_gen) {
      x[n - 1] = t;
      if (Projective) {
        if (!accept_projective(x.data(), n, opt)) return;
      }
      for (size_t gi = 0; gi < ctx.checks.size(); ++gi) {
        if ((int)gi == skip_gen) continue;
        if (!eval_zero(ctx.checks[gi], x.data(), pw)) return;
      }
      out.points.push_back(to_point(x.data(), n));
    };

    if (ctx.solver >= 0) {
      for (size_t j = 0; j < ctx.coeff_fe.size(); ++j)
        cvals[j] = eval_value(ctx.coeff_fe[j], x.data(), pw);
      UnivariateRoots roots = integer_roots_in_range(cvals, B);
      if (roots.whole_range) {
        local_work += last_list.size();
        flush();
        if (cancelled.load(std::memory_order_relaxed)) break;
        for (long t : last_list) try_candidate(t, ctx.solver);
      } else {
        for (long t : roots.roots) {
          if (cls && ((uint64_t)((t % (long)opt.p + (long)opt.p) % (long)opt.p) != last_res))
            continue;
          try_candidate(t, ctx.solver);
        }
      }
    } else {
      local_work += last_list.size();
      flush();
      if (cancelled.load(std::memory_order_relaxed)) break;
      for (long t : last_list) try_candidate(t, -1);
    }

    // odometer over levels 1..outer-1
    done = true;
    for (int i = 1; i < outer; ++i) {
      if (++idx[i] < (int)lists[i].size()) {
        done = false;
        break;
      }
      idx[i] = 0;
    }
    if (outer <= 1) done = true;
  }
  flush();
}

template <bool Projective>
EnumResult enumerate_core(const std::vector<Poly<mpz_class>>& gens, const EnumOptions& opt) {
  if (gens.empty()) throw std::invalid_argument("enumeration needs at least one generator");
  int n = gens[0].nvars;
  for (const auto& g : gens)
    if (g.nvars != n) throw std::invalid_argument("mixed variable counts");
  if (n < 2) throw std::invalid_argument("enumeration needs at least two coordinates");
  bool cls = Projective ? !opt.class_rep.empty() : !opt.residues.empty();
  if (cls && opt.p == 0) throw std::invalid_argument("congruence filter needs a modulus");
  if (Projective && cls && (int)opt.class_rep.size() != n)
    throw std::invalid_argument("class representative has the wrong length");
  if (!Projective && cls && (int)opt.residues.size() != n)
    throw std::invalid_argument("residue vector has the wrong length");

  KernelContext ctx = build_context(gens, opt.B);

  std::vector<uint64_t> lams;
  if (Projective && cls)
    for (uint64_t l = 1; l < opt.p; ++l) lams.push_back(l);
  else
    lams.push_back(0);

  struct Shard {
    uint64_t lam;
    long x0;
  };
  std::vector<Shard> shards;
  for (uint64_t lam : lams) {
    uint64_t r0 = 0;
    if (cls) r0 = Projective ? (lam * opt.class_rep[0]) % opt.p : opt.residues[0] % opt.p;
    for (long x0 : range_values(opt.B, cls ? opt.p : 0, r0)) {
      // a leading negative coordinate can never be the normalized representative
      if (Projective && !cls && x0 < 0) continue;
      shards.push_back({lam, x0});
    }
  }

  std::atomic<uint64_t> work_total{0};
  std::atomic<bool> cancelled{false};
  std::vector<ShardState> states(shards.size());
  EnumResult res;

#ifdef _OPENMP
  if (opt.threads > 1) {
    res.used_parallel = true;
#pragma omp parallel for schedule(dynamic) num_threads(opt.threads)
    for (size_t i = 0; i < shards.size(); ++i) {
      if (cancelled.load(std::memory_order_relaxed)) continue;
      process_shard<Projective>(ctx, opt, cls, shards[i].lam, shards[i].x0, work_total,
                                cancelled, states[i]);
    }
  } else
#endif
  {
    for (size_t i = 0; i < shards.size() && !cancelled; ++i)
      process_shard<Projective>(ctx, opt, cls, shards[i].lam, shards[i].x0, work_total,
                                cancelled, states[i]);
  }
  if (cancelled) throw WorkCapExceeded(opt.work_cap);

  for (auto& st : states)
    for (auto& pt : st.points) res.points.push_back(std::move(pt));
  std::sort(res.points.begin(), res.points.end());
  res.outer_candidates = work_total.load();
  return res;
}

}  // namespace

UnivariateRoots integer_roots_in_range(const std::vector<mpz_class>& c, long B) {
  UnivariateRoots out;
  std::vector<mpz_class> cc = c;
  while (!cc.empty() && cc.back() == 0) cc.pop_back();
  if (cc.empty()) {
    out.whole_range = true;
    return out;
  }
  size_t v = 0;
  while (cc[v] == 0) ++v;
  std::vector<long> roots;
  if (v > 0) roots.push_back(0);
  std::vector<mpz_class> s(cc.begin() + v, cc.end());
  int e = (int)s.size() - 1;
  mpz_class Bz(B);
  auto push_if = [&](const mpz_class& t) {
    if (abs(t) <= Bz) roots.push_back((long)t.get_si());
  };
  if (e == 1) {
    if (s[0] % s[1] == 0) push_if(mpz_class(-s[0] / s[1]));
  } else if (e == 2) {
    mpz_class D = s[1] * s[1] - 4 * s[2] * s[0];
    if (D >= 0 && mpz_perfect_square_p(D.get_mpz_t())) {
      mpz_class sq;
      mpz_sqrt(sq.get_mpz_t(), D.get_mpz_t());
      mpz_class den = 2 * s[2];
      for (const mpz_class& num : {mpz_class(-s[1] + sq), mpz_class(-s[1] - sq)})
        if (num % den == 0) push_if(mpz_class(num / den));
    }
  } else if (e >= 3) {
    int inner = 0;
    for (int i = 1; i < e; ++i)
      if (s[i] != 0) ++inner;
    if (inner == 0) {
      // binomial: t^e = -s0/se
      if (s[0] % s[e] == 0) {
        mpz_class rhs = -s[0] / s[e];
        bool neg = rhs < 0;
        if (!(neg && e % 2 == 0)) {
          mpz_class a = abs(rhs), rt;
          if (mpz_root(rt.get_mpz_t(), a.get_mpz_t(), e)) {
            if (e % 2 == 1) {
              push_if(neg ? mpz_class(-rt) : rt);
            } else {
              push_if(rt);
              push_if(mpz_class(-rt));
            }
          }
        }
      }
    } else {
      // exact scan with a proven-bound 128-bit Horner when possible
      mpz_class bound = 0, pwr = 1, Babs(B < 0 ? -B : B);
      if (Babs == 0) Babs = 1;
      for (const auto& ci : s) {
        bound += abs(ci) * pwr;
        pwr *= Babs;
      }
      if (fits_i128(bound)) {
        std::vector<i128> sc;
        for (const auto& ci : s) sc.push_back(to_i128(ci));
        for (long t = -B; t <= B; ++t) {
          i128 acc = sc[e];
          for (int i = e - 1; i >= 0; --i) acc = acc * (i128)t + sc[i];
          if (acc == 0) roots.push_back(t);
        }
      } else {
        for (long t = -B; t <= B; ++t) {
          mpz_class acc = s[e];
          for (int i = e - 1; i >= 0; --i) acc = acc * t + s[i];
          if (acc == 0) roots.push_back(t);
        }
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  out.roots = std::move(roots);
  return out;
}

std::vector<IntPoint> affine_points_reference(const std::vector<Poly<mpz_class>>& gens,
                                              long B) {
  if (gens.empty()) throw std::invalid_argument("enumeration needs at least one generator");
  int n = gens[0].nvars;
  std::vector<IntPoint> out;
  std::vector<long> x(n, -B);
  std::vector<mpz_class> xz(n);
  bool done = false;
  while (!done) {
    for (int i = 0; i < n; ++i) xz[i] = x[i];
    bool on = true;
    for (const auto& g : gens)
      if (poly_evaluate(g, xz) != 0) {
        on = false;
        break;
      }
    if (on) {
      IntPoint p;
      for (int i = 0; i < n; ++i) p.x.emplace_back(x[i]);
      out.push_back(std::move(p));
    }
    done = true;
    for (int i = n - 1; i >= 0; --i) {
      if (++x[i] <= B) {
        done = false;
        break;
      }
      x[i] = -B;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<IntPoint> projective_points_reference(const std::vector<Poly<mpz_class>>& gens,
                                                  long B) {
  if (gens.empty()) throw std::invalid_argument("enumeration needs at least one generator");
  int n = gens[0].nvars;
  std::vector<IntPoint> out;
  std::vector<long> x(n, -B);
  std::vector<mpz_class> xz(n);
  bool done = false;
  while (!done) {
    int lead = -1;
    for (int i = 0; i < n; ++i)
      if (x[i] != 0) {
        lead = i;
        break;
      }
    if (lead >= 0 && x[lead] > 0) {
      long long xv[16];
      for (int i = 0; i < n; ++i) xv[i] = x[i];
      if (content_ll(xv, n) == 1) {
        for (int i = 0; i < n; ++i) xz[i] = x[i];
        bool on = true;
        for (const auto& g : gens)
          if (poly_evaluate(g, xz) != 0) {
            on = false;
            break;
          }
        if (on) {
          IntPoint p;
          for (int i = 0; i < n; ++i) p.x.emplace_back(x[i]);
          out.push_back(std::move(p));
        }
      }
    }
    done = true;
    for (int i = n - 1; i >= 0; --i) {
      if (++x[i] <= B) {
        done = false;
        break;
      }
      x[i] = -B;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

EnumResult affine_points(const std::vector<Poly<mpz_class>>& gens, const EnumOptions& opt) {
  return enumerate_core<false>(gens, opt);
}

EnumResult projective_points(const std::vector<Poly<mpz_class>>& gens,
                             const EnumOptions& opt) {
  return enumerate_core<true>(gens, opt);
}

FibrationCount curve_fibration_count(const std::vector<Poly<mpz_class>>& gens,
                                     const EnumOptions& opt,
                                     std::vector<IntPoint>* points) {
  std::vector<Poly<mpz_class>> aff;
  for (auto& g : gens) {
    if (g.t.empty()) continue;
    if (g.nvars != 4 || g.vk != VarKind::Projective)
      throw std::invalid_argument("curve fibers need quaternary forms");
    aff.push_back(poly_dehomogenize(g, 0));
  }
  if (aff.empty()) throw std::invalid_argument("curve fibers need a nonzero generator");
  bool cls = !opt.residues.empty();
  if (cls && opt.p == 0) throw std::invalid_argument("congruence filter needs a modulus");
  if (cls && opt.residues.size() != 3)
    throw std::invalid_argument("residue vector has the wrong length");
  long B = opt.B;
  auto res_for = [&](int i) -> uint64_t { return cls ? opt.residues[i] % opt.p : 0; };
  auto l1 = range_values(B, cls ? opt.p : 0, res_for(0));
  auto l2 = range_values(B, cls ? opt.p : 0, res_for(1));
  auto l3 = range_values(B, cls ? opt.p : 0, res_for(2));
  int dmax = 0;
  for (auto& g : aff)
    for (auto& [m, c] : g.t)
      if (m.deg > dmax) dmax = m.deg;
  FibrationCount out;
  std::vector<mpz_class> pa(dmax + 1), pb(dmax + 1);
  auto on_others = [&](long t, const std::vector<std::vector<mpz_class>>& uni, size_t skip) {
    mpz_class tv(t);
    for (size_t i = 0; i < uni.size(); ++i) {
      if (i == skip) continue;
      mpz_class acc = 0;
      for (size_t j = uni[i].size(); j-- > 0;) acc = acc * tv + uni[i][j];
      if (acc != 0) return false;
    }
    return true;
  };
  std::vector<std::vector<mpz_class>> uni(aff.size());
  for (long a : l3) {
    pa[0] = 1;
    for (int i = 1; i <= dmax; ++i) pa[i] = pa[i - 1] * a;
    for (long b : l2) {
      if (++out.outer_candidates > opt.work_cap) throw WorkCapExceeded(opt.work_cap);
      pb[0] = 1;
      for (int i = 1; i <= dmax; ++i) pb[i] = pb[i - 1] * b;
      // univariate in y1 per generator: substitute y2 = b, y3 = a
      size_t first_nz = aff.size();
      for (size_t i = 0; i < aff.size(); ++i) {
        auto& cv = uni[i];
        cv.assign(dmax + 1, 0);
        for (auto& [m, c] : aff[i].t) cv[m.e[0]] += c * pb[m.e[1]] * pa[m.e[2]];
        while (!cv.empty() && cv.back() == 0) cv.pop_back();
        if (!cv.empty() && first_nz == aff.size()) first_nz = i;
      }
      if (first_nz == aff.size()) {
        // every generator vanishes on the whole fiber line
        out.count += (long)l1.size();
        ++out.degenerate_fibers;
        if (out.bad_slices.size() < 64) out.bad_slices.push_back({a, b});
        if (points)
          for (long t : l1)
            points->push_back(IntPoint{{mpz_class(1), mpz_class(t), mpz_class(b), mpz_class(a)}});
        continue;
      }
      UnivariateRoots roots = integer_roots_in_range(uni[first_nz], B);
      for (long t : roots.roots) {
        if (cls && (uint64_t)((t % (long)opt.p + (long)opt.p) % (long)opt.p) != res_for(0))
          continue;
        if (!on_others(t, uni, first_nz)) continue;
        out.count += 1;
        if (points)
          points->push_back(IntPoint{{mpz_class(1), mpz_class(t), mpz_class(b), mpz_class(a)}});
      }
    }
  }
  if (points) std::sort(points->begin(), points->end());
  return out;
}

FibrationCount fibration_count(const Poly<mpz_class>& f, const EnumOptions& opt) {
  if (f.nvars != 3) throw std::invalid_argument("fibration counting needs three coordinates");
  if (f.t.empty()) throw std::invalid_argument("fibration counting needs a nonzero form");
  KernelContext ctx = build_context({f}, opt.B);
  bool cls = !opt.residues.empty();
  if (cls && opt.p == 0) throw std::invalid_argument("congruence filter needs a modulus");
  if (cls && opt.residues.size() != 3)
    throw std::invalid_argument("residue vector has the wrong length");
  FibrationCount out;
  long B = opt.B;
  auto res_for = [&](int i) -> uint64_t { return cls ? opt.residues[i] % opt.p : 0; };
  auto l1 = range_values(B, cls ? opt.p : 0, res_for(0));
  auto l2 = range_values(B, cls ? opt.p : 0, res_for(1));
  auto l3 = range_values(B, cls ? opt.p : 0, res_for(2));
  uint64_t r3 = res_for(2);
  std::vector<i128> pw;
  std::vector<mpz_class> cvals(ctx.coeff.size());
  long long x[3] = {0, 0, 0};
  for (long a : l1) {
    x[0] = a;
    for (long b : l2) {
      x[1] = b;
      if (++out.outer_candidates > opt.work_cap) throw WorkCapExceeded(opt.work_cap);
      if (ctx.solver >= 0) {
        for (size_t j = 0; j < ctx.coeff_fe.size(); ++j)
          cvals[j] = eval_value(ctx.coeff_fe[j], x, pw);
        UnivariateRoots roots = integer_roots_in_range(cvals, B);
        if (roots.whole_range) {
          out.count += (long)l3.size();
          ++out.degenerate_fibers;
          if (out.bad_slices.size() < 64) out.bad_slices.push_back({a, b});
        } else {
          for (long t : roots.roots) {
            if (cls && (uint64_t)((t % (long)opt.p + (long)opt.p) % (long)opt.p) != r3) continue;
            out.count += 1;
          }
        }
      } else {
        // no dependence on the last coordinate: fiber is all-or-nothing
        bool on = eval_zero(ctx.checks[0], x, pw);
        if (on) {
          out.count += (long)l3.size();
          ++out.degenerate_fibers;
          if (out.bad_slices.size() < 64) out.bad_slices.push_back({a, b});
        }
      }
    }
  }
  return out;
}

}  // namespace detcount
