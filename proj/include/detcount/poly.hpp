#pragma once

#include <algorithm>
#include <cassert>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "detcount/monomial.hpp"
#include "detcount/rings.hpp"

namespace detcount {

// Variable flavor only affects parsing/printing: projective polynomials use
// x0..x<n-1> (n variables), affine ones y1..y<n>.
enum class VarKind { Projective, Affine };

// Sparse multivariate polynomial. Invariants: terms sorted descending in
// graded-lex (the canonical serialization order), no zero coefficients, all
// exponent vectors of length nvars.
template <class R>
struct Poly {
  int nvars = 0;
  VarKind vk = VarKind::Projective;
  std::vector<std::pair<Monomial, R>> t;
};

template <class R>
void poly_normalize(Poly<R>& f) {
  std::sort(f.t.begin(), f.t.end(),
            [](const auto& a, const auto& b) { return mon_grlex_greater(a.first, b.first); });
  std::vector<std::pair<Monomial, R>> out;
  out.reserve(f.t.size());
  for (auto& tm : f.t) {
    if (!out.empty() && out.back().first == tm.first)
      out.back().second = out.back().second + tm.second;
    else
      out.push_back(tm);
    if (!out.empty() && RingOps<R>::is_zero(out.back().second)) out.pop_back();
  }
  f.t = std::move(out);
}

template <class R>
Poly<R> poly_zero(int nvars, VarKind vk = VarKind::Projective) {
  return Poly<R>{nvars, vk, {}};
}

template <class R>
Poly<R> poly_const(int nvars, VarKind vk, const R& c) {
  Poly<R> f{nvars, vk, {}};
  if (!RingOps<R>::is_zero(c)) f.t.push_back({mon_one(nvars), c});
  return f;
}

template <class R>
Poly<R> poly_var(int nvars, VarKind vk, int i, const R& one) {
  std::vector<int32_t> e(nvars, 0);
  e[i] = 1;
  Poly<R> f{nvars, vk, {{mon_make(std::move(e)), one}}};
  return f;
}

template <class R>
bool poly_is_zero(const Poly<R>& f) {
  return f.t.empty();
}

template <class R>
int poly_degree(const Poly<R>& f) {
  int d = -1;
  for (auto& tm : f.t) d = std::max(d, (int)tm.first.deg);
  return d;
}

template <class R>
bool poly_is_homogeneous(const Poly<R>& f) {
  for (auto& tm : f.t)
    if (tm.first.deg != f.t.front().first.deg) return false;
  return true;
}

template <class R>
Poly<R> poly_add(const Poly<R>& a, const Poly<R>& b) {
  Poly<R> r = a;
  r.t.insert(r.t.end(), b.t.begin(), b.t.end());
  poly_normalize(r);
  return r;
}

template <class R>
Poly<R> poly_neg(const Poly<R>& a) {
  Poly<R> r = a;
  for (auto& tm : r.t) tm.second = -tm.second;
  return r;
}

template <class R>
Poly<R> poly_sub(const Poly<R>& a, const Poly<R>& b) {
  return poly_add(a, poly_neg(b));
}

template <class R>
Poly<R> poly_scale(const Poly<R>& a, const R& c) {
  if (RingOps<R>::is_zero(c)) return poly_zero<R>(a.nvars, a.vk);
  Poly<R> r = a;
  for (auto& tm : r.t) tm.second = tm.second * c;
  poly_normalize(r);
  return r;
}

template <class R>
Poly<R> poly_mul_term(const Poly<R>& a, const Monomial& m, const R& c) {
  if (RingOps<R>::is_zero(c)) return poly_zero<R>(a.nvars, a.vk);
  Poly<R> r = a;
  for (auto& tm : r.t) {
    tm.first = mon_mul(tm.first, m);
    tm.second = tm.second * c;
  }
  poly_normalize(r);
  return r;
}

template <class R>
Poly<R> poly_mul(const Poly<R>& a, const Poly<R>& b) {
  Poly<R> r{a.nvars, a.vk, {}};
  r.t.reserve(a.t.size() * b.t.size());
  for (auto& ta : a.t)
    for (auto& tb : b.t) r.t.push_back({mon_mul(ta.first, tb.first), ta.second * tb.second});
  poly_normalize(r);
  return r;
}

template <class R>
Poly<R> poly_pow(const Poly<R>& a, int k) {
  assert(k >= 0);
  R one = a.t.empty() ? R{} : RingOps<R>::one(a.t.front().second);
  if (k == 0) {
    if (a.t.empty()) throw std::domain_error("poly_pow: 0^0 without a sample coefficient");
    return poly_const(a.nvars, a.vk, one);
  }
  Poly<R> r = a;
  for (int i = 1; i < k; ++i) r = poly_mul(r, a);
  return r;
}

// Largest term under the given order; f must be nonzero.
template <class R>
const std::pair<Monomial, R>& leading_term(const Poly<R>& f, const TermOrder& o) {
  assert(!f.t.empty());
  size_t best = 0;
  for (size_t i = 1; i < f.t.size(); ++i)
    if (mon_cmp(f.t[i].first, f.t[best].first, o) > 0) best = i;
  return f.t[best];
}

template <class R>
const Monomial& leading_monomial(const Poly<R>& f, const TermOrder& o) {
  return leading_term(f, o).first;
}

template <class R>
R poly_evaluate(const Poly<R>& f, const std::vector<R>& x) {
  assert((int)x.size() == f.nvars);
  assert(!x.empty());
  R zero = RingOps<R>::zero(x[0]);
  if (f.t.empty()) return zero;
  std::vector<int> maxe(f.nvars, 0);
  for (auto& tm : f.t)
    for (int i = 0; i < f.nvars; ++i) maxe[i] = std::max(maxe[i], (int)tm.first.e[i]);
  std::vector<std::vector<R>> pw(f.nvars);
  R one = RingOps<R>::one(x[0]);
  for (int i = 0; i < f.nvars; ++i) {
    pw[i].reserve(maxe[i] + 1);
    pw[i].push_back(one);
    for (int j = 1; j <= maxe[i]; ++j) pw[i].push_back(pw[i].back() * x[i]);
  }
  R acc = zero;
  for (auto& tm : f.t) {
    R v = tm.second;
    for (int i = 0; i < f.nvars; ++i)
      if (tm.first.e[i]) v = v * pw[i][tm.first.e[i]];
    acc = acc + v;
  }
  return acc;
}

template <class R>
Poly<R> poly_derivative(const Poly<R>& f, int var) {
  Poly<R> r{f.nvars, f.vk, {}};
  for (auto& tm : f.t) {
    int e = tm.first.e[var];
    if (!e) continue;
    Monomial m = tm.first;
    m.e[var] -= 1;
    m.deg -= 1;
    r.t.push_back({m, tm.second * RingOps<R>::from_int(tm.second, e)});
  }
  poly_normalize(r);
  return r;
}

// Substitute args[i] for variable i. All args share nvars/vk of the result.
template <class R>
Poly<R> poly_compose(const Poly<R>& f, const std::vector<Poly<R>>& args) {
  assert((int)args.size() == f.nvars);
  int nv = args.empty() ? f.nvars : args[0].nvars;
  VarKind vk = args.empty() ? f.vk : args[0].vk;
  std::vector<int> maxe(f.nvars, 0);
  for (auto& tm : f.t)
    for (int i = 0; i < f.nvars; ++i) maxe[i] = std::max(maxe[i], (int)tm.first.e[i]);
  Poly<R> r = poly_zero<R>(nv, vk);
  if (f.t.empty()) return r;
  R one = RingOps<R>::one(f.t.front().second);
  std::vector<std::vector<Poly<R>>> pw(f.nvars);
  for (int i = 0; i < f.nvars; ++i) {
    pw[i].push_back(poly_const(nv, vk, one));
    for (int j = 1; j <= maxe[i]; ++j) pw[i].push_back(poly_mul(pw[i].back(), args[i]));
  }
  for (auto& tm : f.t) {
    Poly<R> v = poly_const(nv, vk, tm.second);
    for (int i = 0; i < f.nvars; ++i)
      if (tm.first.e[i]) v = poly_mul(v, pw[i][tm.first.e[i]]);
    r = poly_add(r, v);
  }
  return r;
}

// f(y + c) for affine polynomials; used by vanishing orders and tangent cones.
template <class R>
Poly<R> poly_shift(const Poly<R>& f, const std::vector<R>& c) {
  assert((int)c.size() == f.nvars);
  if (f.t.empty()) return f;
  R one = RingOps<R>::one(f.t.front().second);
  std::vector<Poly<R>> args;
  for (int i = 0; i < f.nvars; ++i) {
    Poly<R> a = poly_var(f.nvars, f.vk, i, one);
    a = poly_add(a, poly_const(f.nvars, f.vk, c[i]));
    args.push_back(a);
  }
  return poly_compose(f, args);
}

// Minimal total degree of a nonzero term of f(y + P); -1 when f is zero.
template <class R>
int order_of_vanishing(const Poly<R>& f, const std::vector<R>& at) {
  Poly<R> g = poly_shift(f, at);
  int o = -1;
  for (auto& tm : g.t)
    if (o < 0 || tm.first.deg < o) o = tm.first.deg;
  return o;
}

// Affine y1..yn -> projective x0..xn, each term padded by x0 to top degree.
template <class R>
Poly<R> poly_homogenize(const Poly<R>& f) {
  int d = poly_degree(f);
  Poly<R> r{f.nvars + 1, VarKind::Projective, {}};
  for (auto& tm : f.t) {
    std::vector<int32_t> e(f.nvars + 1, 0);
    e[0] = d - tm.first.deg;
    for (int i = 0; i < f.nvars; ++i) e[i + 1] = tm.first.e[i];
    r.t.push_back({mon_make(std::move(e)), tm.second});
  }
  poly_normalize(r);
  return r;
}

// Set x_chart = 1 and drop that variable; remaining variables keep their
// relative order and become y1..y<n>.
template <class R>
Poly<R> poly_dehomogenize(const Poly<R>& f, int chart) {
  Poly<R> r{f.nvars - 1, VarKind::Affine, {}};
  for (auto& tm : f.t) {
    std::vector<int32_t> e;
    e.reserve(f.nvars - 1);
    for (int i = 0; i < f.nvars; ++i)
      if (i != chart) e.push_back(tm.first.e[i]);
    r.t.push_back({mon_make(std::move(e)), tm.second});
  }
  poly_normalize(r);
  return r;
}

template <class R, class R2, class Fn>
Poly<R2> poly_map(const Poly<R>& f, Fn fn) {
  Poly<R2> r{f.nvars, f.vk, {}};
  for (auto& tm : f.t) r.t.push_back({tm.first, fn(tm.second)});
  poly_normalize(r);
  return r;
}

inline Poly<mpq_class> poly_z_to_q(const Poly<mpz_class>& f) {
  return poly_map<mpz_class, mpq_class>(f, [](const mpz_class& c) { return mpq_class(c); });
}

inline Poly<Fp> poly_reduce_p(const Poly<mpz_class>& f, uint64_t p) {
  return poly_map<mpz_class, Fp>(f, [&](const mpz_class& c) {
    mpz_class r = c % (long)p;
    if (r < 0) r += (long)p;
    return Fp{r.get_ui(), p};
  });
}

inline Poly<Fq> poly_fp_to_fq(const Poly<Fp>& f, const FqCtx* k) {
  return poly_map<Fp, Fq>(f, [&](const Fp& c) { return fq_embed(k, c); });
}

// Clear denominators and content; sign fixed so the canonical leading
// coefficient is positive. Zero maps to zero.
Poly<mpz_class> poly_q_to_z_primitive(const Poly<mpq_class>& f);
Poly<mpz_class> poly_primitive_part(const Poly<mpz_class>& f);
mpz_class poly_height(const Poly<mpz_class>& f);  // max |coeff| of primitive part

std::string poly_to_string(const Poly<mpq_class>& f);
std::string poly_to_string(const Poly<mpz_class>& f);
std::string poly_to_string(const Poly<Fp>& f);
std::string poly_to_string(const Poly<Fq>& f);

// Grammar: variables x0..x<n-1> or y1..y<n> (no mixing), integer and a/b
// literals, + - * ^, parentheses, no implicit multiplication, whitespace
// insignificant. nvars is the declared arity; out-of-range indices error.
Poly<mpq_class> parse_poly(const std::string& text, int nvars);

// 64-bit FNV-1a of the canonical serialization, as fixed-width hex.
std::string poly_hash(const std::string& canonical);

}  // namespace detcount
