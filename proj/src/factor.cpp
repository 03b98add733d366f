#include "detcount/factor.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace detcount {

int updeg(const FqUPoly& f) { return (int)f.size() - 1; }

void up_trim(FqUPoly& f) {
  while (!f.empty() && fq_is_zero(f.back())) f.pop_back();
}

FqUPoly up_make(const FqCtx* k, const std::vector<long long>& c) {
  FqUPoly f;
  f.reserve(c.size());
  for (long long x : c) f.push_back(fq_from_int(k, x));
  up_trim(f);
  return f;
}

bool up_is_zero(const FqUPoly& f) { return f.empty(); }

FqUPoly up_add(const FqUPoly& a, const FqUPoly& b, const FqCtx* k) {
  FqUPoly r(std::max(a.size(), b.size()), fq_zero(k));
  for (size_t i = 0; i < a.size(); ++i) r[i] = r[i] + a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] = r[i] + b[i];
  up_trim(r);
  return r;
}

FqUPoly up_sub(const FqUPoly& a, const FqUPoly& b, const FqCtx* k) {
  FqUPoly r(std::max(a.size(), b.size()), fq_zero(k));
  for (size_t i = 0; i < a.size(); ++i) r[i] = r[i] + a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] = r[i] - b[i];
  up_trim(r);
  return r;
}

FqUPoly up_scale(const FqUPoly& a, const Fq& c) {
  if (fq_is_zero(c)) return {};
  FqUPoly r = a;
  for (auto& x : r) x = x * c;
  return r;
}

FqUPoly up_mul(const FqUPoly& a, const FqUPoly& b, const FqCtx* k) {
  if (a.empty() || b.empty()) return {};
  FqUPoly r(a.size() + b.size() - 1, fq_zero(k));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
  up_trim(r);
  return r;
}

std::pair<FqUPoly, FqUPoly> up_divrem(const FqUPoly& f, const FqUPoly& g, const FqCtx* k) {
  if (g.empty()) throw std::invalid_argument("division by the zero polynomial");
  if (f.size() < g.size()) return {{}, f};
  FqUPoly rem = f;
  FqUPoly quo(f.size() - g.size() + 1, fq_zero(k));
  Fq lg = fq_inv(g.back());
  for (int j = (int)quo.size() - 1; j >= 0; --j) {
    Fq c = rem[j + g.size() - 1] * lg;
    if (fq_is_zero(c)) continue;
    quo[j] = c;
    for (size_t i = 0; i < g.size(); ++i) rem[j + i] = rem[j + i] - c * g[i];
  }
  up_trim(quo);
  up_trim(rem);
  return {quo, rem};
}

FqUPoly up_mod(const FqUPoly& f, const FqUPoly& g, const FqCtx* k) {
  return up_divrem(f, g, k).second;
}

FqUPoly up_monic(const FqUPoly& f) {
  if (f.empty()) return f;
  return up_scale(f, fq_inv(f.back()));
}

FqUPoly up_gcd(FqUPoly a, FqUPoly b, const FqCtx* k) {
  while (!b.empty()) {
    FqUPoly r = up_mod(a, b, k);
    a = std::move(b);
    b = std::move(r);
  }
  return up_monic(a);
}

FqUPoly up_derivative(const FqUPoly& f, const FqCtx* k) {
  if (f.size() <= 1) return {};
  FqUPoly r(f.size() - 1, fq_zero(k));
  for (size_t i = 1; i < f.size(); ++i) r[i - 1] = f[i] * fq_from_int(k, (long long)i);
  up_trim(r);
  return r;
}

FqUPoly up_powmod(FqUPoly base, const mpz_class& e, const FqUPoly& mod, const FqCtx* k) {
  if (e < 0) throw std::invalid_argument("negative exponent");
  FqUPoly result = up_mod({fq_one(k)}, mod, k);
  base = up_mod(base, mod, k);
  size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  if (e == 0) return result;
  for (size_t i = bits; i-- > 0;) {
    result = up_mod(up_mul(result, result, k), mod, k);
    if (mpz_tstbit(e.get_mpz_t(), i))
      result = up_mod(up_mul(result, base, k), mod, k);
  }
  return result;
}

Fq up_eval(const FqUPoly& f, const Fq& x) {
  Fq r = fq_zero(x.k);
  for (size_t i = f.size(); i-- > 0;) r = r * x + f[i];
  return r;
}

std::string up_str(const FqUPoly& f) {
  if (f.empty()) return "0";
  std::string s;
  for (size_t i = f.size(); i-- > 0;) {
    if (!s.empty()) s += " + ";
    s += "(" + fq_str(f[i]) + ")t^" + std::to_string(i);
  }
  return s;
}

namespace {

// coefficient-wise inverse Frobenius: f(x) = g(x^p) gives back g
FqUPoly up_pth_root_poly(const FqUPoly& f, const FqCtx* k) {
  uint64_t p = k->p;
  FqUPoly g;
  g.resize(f.size() / p + 1, fq_zero(k));
  for (size_t i = 0; i < f.size(); ++i) {
    if (fq_is_zero(f[i])) continue;
    if (i % p != 0) throw std::logic_error("not a p-th power");
    g[i / p] = fq_pth_root(f[i]);
  }
  up_trim(g);
  return g;
}

void merge_factor(std::vector<std::pair<FqUPoly, int>>& out, const FqUPoly& f, int m) {
  for (auto& [g, e] : out)
    if (g == f) {
      e += m;
      return;
    }
  out.push_back({f, m});
}

mpz_class field_size(const FqCtx* k) {
  mpz_class q;
  mpz_ui_pow_ui(q.get_mpz_t(), (unsigned long)k->p, (unsigned long)k->e);
  return q;
}

FqUPoly up_random(const FqCtx* k, int deg_below, std::mt19937_64& rng) {
  mpz_class q = field_size(k);
  uint64_t qsz = q.fits_ulong_p() ? q.get_ui() : ~0ull;
  FqUPoly f(deg_below, fq_zero(k));
  for (auto& c : f) c = fq_from_index(k, rng() % qsz);
  up_trim(f);
  return f;
}

// equal-degree splitting of a monic squarefree product of degree-d
// irreducibles (Cantor-Zassenhaus; trace variant in characteristic 2)
void edf(const FqUPoly& f, int d, const FqCtx* k, std::mt19937_64& rng,
         std::vector<FqUPoly>& out) {
  int n = updeg(f);
  if (n == d) {
    out.push_back(up_monic(f));
    return;
  }
  mpz_class q = field_size(k);
  for (;;) {
    FqUPoly a = up_random(k, n, rng);
    if (updeg(a) < 1) continue;
    FqUPoly g = up_gcd(a, f, k);
    if (updeg(g) > 0 && updeg(g) < n) {
      edf(g, d, k, rng, out);
      edf(up_divrem(f, g, k).first, d, k, rng, out);
      return;
    }
    FqUPoly b;
    if (k->p == 2) {
      // trace map over F_2: sum of a^(2^i) for i < e*d
      long m = (long)k->e * d;
      FqUPoly t = up_mod(a, f, k);
      b = t;
      for (long i = 1; i < m; ++i) {
        t = up_mod(up_mul(t, t, k), f, k);
        b = up_add(b, t, k);
      }
    } else {
      mpz_class e;
      mpz_pow_ui(e.get_mpz_t(), q.get_mpz_t(), (unsigned long)d);
      e = (e - 1) / 2;
      b = up_powmod(a, e, f, k);
      b = up_sub(b, {fq_one(k)}, k);
    }
    FqUPoly h = up_gcd(b, f, k);
    if (updeg(h) > 0 && updeg(h) < n) {
      edf(h, d, k, rng, out);
      edf(up_divrem(f, h, k).first, d, k, rng, out);
      return;
    }
  }
}

bool up_less(const FqUPoly& a, const FqUPoly& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (size_t i = a.size(); i-- > 0;) {
    uint64_t ia = fq_index(a[i]), ib = fq_index(b[i]);
    if (ia != ib) return ia < ib;
  }
  return false;
}

}  // namespace

std::vector<std::pair<FqUPoly, int>> up_squarefree(const FqUPoly& f, const FqCtx* k) {
  std::vector<std::pair<FqUPoly, int>> out;
  FqUPoly g = up_monic(f);
  if (updeg(g) < 1) return out;
  FqUPoly dg = up_derivative(g, k);
  if (up_is_zero(dg)) {
    for (auto& [h, m] : up_squarefree(up_pth_root_poly(g, k), k))
      merge_factor(out, h, m * (int)k->p);
    return out;
  }
  FqUPoly c = up_gcd(g, dg, k);
  FqUPoly w = up_divrem(g, c, k).first;
  int i = 1;
  while (updeg(w) > 0) {
    FqUPoly y = up_gcd(w, c, k);
    FqUPoly z = up_divrem(w, y, k).first;
    if (updeg(z) > 0) merge_factor(out, up_monic(z), i);
    w = std::move(y);
    c = up_divrem(c, w, k).first;
    ++i;
  }
  if (updeg(c) > 0)
    for (auto& [h, m] : up_squarefree(up_pth_root_poly(c, k), k))
      merge_factor(out, h, m * (int)k->p);
  return out;
}

FqUnivFactorization up_factor(const FqUPoly& f, const FqCtx* k, uint64_t seed) {
  if (up_is_zero(f)) throw std::invalid_argument("cannot factor the zero polynomial");
  FqUnivFactorization out;
  out.unit = f.back();
  if (updeg(f) == 0) return out;
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull);
  for (auto& [sq, mult] : up_squarefree(f, k)) {
    // distinct-degree split, then equal-degree split
    FqUPoly rem = sq;
    FqUPoly x = up_make(k, {0, 1});
    FqUPoly h = up_mod(x, rem, k);
    mpz_class q = field_size(k);
    for (int d = 1; 2 * d <= updeg(rem); ++d) {
      h = up_powmod(h, q, rem, k);
      FqUPoly g = up_gcd(up_sub(h, up_mod(x, rem, k), k), rem, k);
      if (updeg(g) > 0) {
        std::vector<FqUPoly> parts;
        edf(g, d, k, rng, parts);
        for (auto& pnew : parts) merge_factor(out.factors, pnew, mult);
        rem = up_divrem(rem, g, k).first;
        h = up_mod(h, rem, k);
      }
    }
    if (updeg(rem) > 0) merge_factor(out.factors, up_monic(rem), mult);
  }
  std::sort(out.factors.begin(), out.factors.end(),
            [](const auto& a, const auto& b) { return up_less(a.first, b.first); });
  return out;
}

bool up_irreducible(const FqUPoly& f, const FqCtx* k) {
  int n = updeg(f);
  if (n < 1) return false;
  if (n == 1) return true;
  mpz_class q = field_size(k);
  FqUPoly x = up_make(k, {0, 1});
  // Rabin: x^(q^n) = x mod f, and gcd(x^(q^(n/r)) - x, f) = 1 for prime r | n
  std::vector<int> primes;
  int m = n;
  for (int r = 2; r * r <= m; ++r)
    while (m % r == 0) {
      if (primes.empty() || primes.back() != r) primes.push_back(r);
      m /= r;
    }
  if (m > 1) primes.push_back(m);
  for (int r : primes) {
    mpz_class e;
    mpz_pow_ui(e.get_mpz_t(), q.get_mpz_t(), (unsigned long)(n / r));
    FqUPoly h = up_powmod(x, e, f, k);
    FqUPoly g = up_gcd(up_sub(h, x, k), f, k);
    if (updeg(g) != 0) return false;
  }
  mpz_class e;
  mpz_pow_ui(e.get_mpz_t(), q.get_mpz_t(), (unsigned long)n);
  FqUPoly h = up_powmod(x, e, f, k);
  return up_is_zero(up_sub(h, up_mod(x, f, k), k));
}

std::vector<Fq> up_roots(const FqUPoly& f, const FqCtx* k) {
  std::vector<Fq> roots;
  auto fac = up_factor(f, k, 1);
  for (auto& [g, m] : fac.factors)
    if (updeg(g) == 1) roots.push_back(-g[0]);
  std::sort(roots.begin(), roots.end(),
            [](const Fq& a, const Fq& b) { return fq_index(a) < fq_index(b); });
  return roots;
}

// ---------------------------------------------------------------------------
// bivariate machinery: polynomials in (w, t) = (y1, y2), viewed as vectors of
// univariate w-polynomials indexed by the t-degree

namespace {

using TZ = std::vector<FqUPoly>;  // index = t-degree

void tz_trim(TZ& a) {
  while (!a.empty() && a.back().empty()) a.pop_back();
}

TZ tcoeffs(const Poly<Fq>& f, const FqCtx* k) {
  TZ out;
  for (const auto& tm : f.t) {
    int tw = tm.first.e[0], tt = tm.first.e[1];
    if ((int)out.size() <= tt) out.resize(tt + 1);
    FqUPoly& c = out[tt];
    if ((int)c.size() <= tw) c.resize(tw + 1, fq_zero(k));
    c[tw] = c[tw] + tm.second;
  }
  for (auto& c : out) up_trim(c);
  tz_trim(out);
  return out;
}

Poly<Fq> tz_to_poly(const TZ& a) {
  Poly<Fq> f{2, VarKind::Affine, {}};
  for (size_t j = 0; j < a.size(); ++j)
    for (size_t i = 0; i < a[j].size(); ++i) {
      if (fq_is_zero(a[j][i])) continue;
      f.t.push_back({mon_make({(int32_t)i, (int32_t)j}), a[j][i]});
    }
  poly_normalize(f);
  return f;
}

void up_truncate(FqUPoly& f, int K) {
  if ((int)f.size() > K) f.resize(K);
  up_trim(f);
}

TZ tz_mul(const TZ& a, const TZ& b, int K, const FqCtx* k) {
  if (a.empty() || b.empty()) return {};
  TZ r(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].empty()) continue;
    for (size_t j = 0; j < b.size(); ++j) {
      if (b[j].empty()) continue;
      FqUPoly prod = up_mul(a[i], b[j], k);
      if (K > 0) up_truncate(prod, K);
      r[i + j] = up_add(r[i + j], prod, k);
    }
  }
  tz_trim(r);
  return r;
}

TZ tz_sub(const TZ& a, const TZ& b, const FqCtx* k) {
  TZ r(std::max(a.size(), b.size()));
  for (size_t i = 0; i < r.size(); ++i) {
    FqUPoly x = i < a.size() ? a[i] : FqUPoly{};
    FqUPoly y = i < b.size() ? b[i] : FqUPoly{};
    r[i] = up_sub(x, y, k);
  }
  tz_trim(r);
  return r;
}

// content of the t-coefficients as a polynomial in w
FqUPoly tz_content(const TZ& a, const FqCtx* k) {
  FqUPoly c;
  for (const auto& x : a)
    if (!x.empty()) c = up_gcd(c, x, k);
  return c;
}

TZ tz_divide_content(const TZ& a, const FqUPoly& c, const FqCtx* k) {
  TZ r = a;
  for (auto& x : r) {
    if (x.empty()) continue;
    auto [q, rem] = up_divrem(x, c, k);
    if (!rem.empty()) throw std::logic_error("content fails to divide");
    x = q;
  }
  return r;
}

int tz_degw(const TZ& a) {
  int d = -1;
  for (const auto& x : a) d = std::max(d, updeg(x));
  return d;
}

// pseudo-remainder of f by g in t (both nonzero, deg_t f >= deg_t g)
TZ tz_prem(TZ f, const TZ& g, const FqCtx* k) {
  int dg = (int)g.size() - 1;
  const FqUPoly& lg = g.back();
  while ((int)f.size() - 1 >= dg && !f.empty()) {
    int df = (int)f.size() - 1;
    FqUPoly lf = f.back();
    // f = lg * f - lf * t^(df-dg) * g
    TZ nf(df);  // top term cancels
    for (int j = 0; j < df; ++j) {
      FqUPoly v = j < (int)f.size() ? up_mul(f[j], lg, k) : FqUPoly{};
      int shift = j - (df - dg);
      if (shift >= 0 && shift <= dg) v = up_sub(v, up_mul(lf, g[shift], k), k);
      nf[j] = std::move(v);
    }
    tz_trim(nf);
    f = std::move(nf);
  }
  return f;
}

// gcd in F_q[w][t] via a primitive remainder sequence in t
TZ tz_gcd_t(TZ f, TZ g, const FqCtx* k) {
  tz_trim(f);
  tz_trim(g);
  if (f.empty()) return g;
  if (g.empty()) return f;
  FqUPoly cf = tz_content(f, k), cg = tz_content(g, k);
  FqUPoly cc = up_gcd(cf, cg, k);
  f = tz_divide_content(f, cf, k);
  g = tz_divide_content(g, cg, k);
  if (f.size() < g.size()) std::swap(f, g);
  for (;;) {
    if (g.size() == 1) {
      // primitive parts coprime in t; only the shared content survives
      g = {cc};
      break;
    }
    TZ r = tz_prem(f, g, k);
    tz_trim(r);
    if (r.empty()) {
      if (updeg(cc) > 0) g = tz_mul(g, TZ{cc}, 0, k);
      break;
    }
    f = std::move(g);
    g = tz_divide_content(r, tz_content(r, k), k);
  }
  return g;
}

std::pair<FqUPoly, FqUPoly> up_bezout(const FqUPoly& a, const FqUPoly& b, const FqCtx* k) {
  // returns (u, v) with u a + v b = 1; a, b must be coprime
  FqUPoly r0 = a, r1 = b;
  FqUPoly u0 = {fq_one(k)}, u1 = {};
  FqUPoly v0 = {}, v1 = {fq_one(k)};
  while (!r1.empty()) {
    auto [q, r] = up_divrem(r0, r1, k);
    FqUPoly u2 = up_sub(u0, up_mul(q, u1, k), k);
    FqUPoly v2 = up_sub(v0, up_mul(q, v1, k), k);
    r0 = std::move(r1);
    r1 = std::move(r);
    u0 = std::move(u1);
    u1 = std::move(u2);
    v0 = std::move(v1);
    v1 = std::move(v2);
  }
  if (updeg(r0) != 0) throw std::logic_error("bezout of non-coprime polynomials");
  Fq inv = fq_inv(r0[0]);
  return {up_scale(u0, inv), up_scale(v0, inv)};
}

// univariate image in t at w = 0
FqUPoly tz_mod_w(const TZ& a, const FqCtx* k) {
  FqUPoly r(a.size(), fq_zero(k));
  for (size_t j = 0; j < a.size(); ++j)
    if (!a[j].empty()) r[j] = a[j][0];
  up_trim(r);
  return r;
}

// linear two-factor Hensel lift at w = 0: g = A*B mod w^K, all monic in t
void hensel_pair(const TZ& g, TZ& A, TZ& B, int K, const FqCtx* k) {
  FqUPoly A0 = tz_mod_w(A, k);
  FqUPoly B0 = tz_mod_w(B, k);
  auto [u, v] = up_bezout(A0, B0, k);
  for (int step = 1; step < K; ++step) {
    TZ E = tz_sub(g, tz_mul(A, B, K, k), k);
    FqUPoly c(E.size(), fq_zero(k));
    bool nonzero = false;
    for (size_t j = 0; j < E.size(); ++j)
      if ((int)E[j].size() > step && !fq_is_zero(E[j][step])) {
        c[j] = E[j][step];
        nonzero = true;
      }
    if (!nonzero) continue;
    up_trim(c);
    auto [q, alpha] = up_divrem(up_mul(v, c, k), A0, k);
    FqUPoly beta = up_add(up_mul(u, c, k), up_mul(q, B0, k), k);
    if (updeg(beta) >= updeg(B0))
      throw std::logic_error("lift correction exceeds the cofactor degree");
    for (int j = 0; j <= updeg(alpha); ++j) {
      if (fq_is_zero(alpha[j])) continue;
      if ((int)A.size() <= j) A.resize(j + 1);
      if ((int)A[j].size() <= step) A[j].resize(step + 1, fq_zero(k));
      A[j][step] = A[j][step] + alpha[j];
    }
    for (int j = 0; j <= updeg(beta); ++j) {
      if (fq_is_zero(beta[j])) continue;
      if ((int)B.size() <= j) B.resize(j + 1);
      if ((int)B[j].size() <= step) B[j].resize(step + 1, fq_zero(k));
      B[j][step] = B[j][step] + beta[j];
    }
  }
}

TZ tz_embed(const FqUPoly& u) {
  TZ r(u.size());
  for (size_t j = 0; j < u.size(); ++j)
    if (!fq_is_zero(u[j])) r[j] = {u[j]};
  return r;
}

std::vector<TZ> lift_tree(const TZ& g, const std::vector<FqUPoly>& us, int K,
                          const FqCtx* k) {
  if (us.size() == 1) {
    TZ r = g;
    for (auto& c : r) up_truncate(c, K);
    tz_trim(r);
    return {r};
  }
  size_t m = us.size() / 2;
  FqUPoly A0 = {fq_one(k)}, B0 = {fq_one(k)};
  for (size_t i = 0; i < m; ++i) A0 = up_mul(A0, us[i], k);
  for (size_t i = m; i < us.size(); ++i) B0 = up_mul(B0, us[i], k);
  TZ A = tz_embed(A0), B = tz_embed(B0);
  hensel_pair(g, A, B, K, k);
  std::vector<FqUPoly> left(us.begin(), us.begin() + m);
  std::vector<FqUPoly> right(us.begin() + m, us.end());
  auto L = lift_tree(A, left, K, k);
  auto R = lift_tree(B, right, K, k);
  L.insert(L.end(), R.begin(), R.end());
  return L;
}

Fq poly_lead_unit(const Poly<Fq>& f) { return f.t.front().second; }

// deterministic normalization: leading graded-lex coefficient scaled to one
Poly<Fq> poly_fq_normalize_unit(const Poly<Fq>& f, Fq* unit_out) {
  if (f.t.empty()) throw std::logic_error("normalizing the zero polynomial");
  Fq lead = poly_lead_unit(f);
  if (unit_out) *unit_out = lead;
  return poly_map<Fq, Fq>(f, [&](const Fq& c) { return c * fq_inv(lead); });
}

}  // namespace

std::optional<Poly<Fq>> poly_div_exact(const Poly<Fq>& f, const Poly<Fq>& g, const FqCtx* k) {
  TZ tf = tcoeffs(f, k), tg = tcoeffs(g, k);
  if (tg.empty()) return std::nullopt;
  if (tf.empty()) return tz_to_poly({});
  if (tf.size() < tg.size()) return std::nullopt;
  int dg = (int)tg.size() - 1;
  const FqUPoly& lg = tg.back();
  TZ quo(tf.size() - tg.size() + 1);
  for (int j = (int)quo.size() - 1; j >= 0; --j) {
    if ((int)tf.size() <= j + dg) continue;
    FqUPoly lead = tf[j + dg];
    if (lead.empty()) continue;
    auto [q, rem] = up_divrem(lead, lg, k);
    if (!rem.empty()) return std::nullopt;
    quo[j] = q;
    for (int i = 0; i <= dg; ++i)
      tf[j + i] = up_sub(tf[j + i], up_mul(q, tg[i], k), k);
  }
  for (const auto& c : tf)
    if (!c.empty()) return std::nullopt;
  return tz_to_poly(quo);
}

namespace {

// factor a primitive squarefree bivariate polynomial with deg_t >= 1 into
// irreducibles (each normalized to leading coefficient one)
std::vector<Poly<Fq>> factor_core(const Poly<Fq>& g, const FqCtx* k, uint64_t seed) {
  TZ tc = tcoeffs(g, k);
  int dt = (int)tc.size() - 1;
  if (dt < 1) throw std::logic_error("factor_core needs positive t-degree");
  FqUPoly lc = tc[dt];

  // monic version H(w,t) = lc^(dt-1) g(w, t/lc); the map back below applies
  // t -> lc t uniformly, so no special case for a constant lc
  TZ H(dt + 1);
  for (int j = 0; j <= dt; ++j) {
    if (tc[j].empty()) continue;
    FqUPoly pw = {fq_one(k)};
    for (int i = 0; i < dt - 1 - j; ++i) pw = up_mul(pw, lc, k);
    H[j] = j == dt ? FqUPoly{fq_one(k)} : up_mul(tc[j], pw, k);
  }

  int K = tz_degw(H) + 2;

  // squarefree specialization scan
  mpz_class qz = field_size(k);
  uint64_t qsz = qz.fits_ulong_p() ? qz.get_ui() : ~0ull;
  uint64_t scan_cap = std::min<uint64_t>(qsz, 1u << 20);
  std::optional<Fq> w0;
  FqUPoly h0;
  for (uint64_t idx = 0; idx < scan_cap; ++idx) {
    Fq cand = fq_from_index(k, idx);
    FqUPoly spec(dt + 1, fq_zero(k));
    for (int j = 0; j <= dt; ++j)
      spec[j] = H[j].empty() ? fq_zero(k) : up_eval(H[j], cand);
    up_trim(spec);
    if (updeg(spec) != dt) continue;  // cannot happen for monic H; defensive
    FqUPoly gc = up_gcd(spec, up_derivative(spec, k), k);
    if (updeg(gc) == 0) {
      w0 = cand;
      h0 = spec;
      break;
    }
  }
  if (!w0) throw std::runtime_error("base field too small for a squarefree specialization");

  auto uf = up_factor(h0, k, seed);
  std::vector<FqUPoly> us;
  for (auto& [u, m] : uf.factors) {
    if (m != 1) throw std::logic_error("specialization was not squarefree");
    us.push_back(u);
  }

  std::vector<Poly<Fq>> monic_factors;
  if (us.size() == 1) {
    monic_factors.push_back(tz_to_poly(H));
  } else {
    // shift to w0 = 0, lift, recombine, shift back
    std::vector<Fq> shift = {*w0, fq_zero(k)};
    std::vector<Fq> unshift = {-*w0, fq_zero(k)};
    Poly<Fq> Hs = poly_shift(tz_to_poly(H), shift);
    TZ Hs_tz = tcoeffs(Hs, k);
    auto lifts = lift_tree(Hs_tz, us, K, k);

    Poly<Fq> hcur = Hs;
    std::vector<int> alive(lifts.size());
    std::iota(alive.begin(), alive.end(), 0);
    std::vector<Poly<Fq>> found;
    int sz = 1;
    while (!alive.empty() && 2 * sz <= (int)alive.size()) {
      bool hit = false;
      std::vector<int> pick(sz);
      std::iota(pick.begin(), pick.end(), 0);
      for (;;) {
        TZ cand = {{fq_one(k)}};
        for (int i : pick) cand = tz_mul(cand, lifts[alive[i]], K, k);
        Poly<Fq> cp = tz_to_poly(cand);
        auto quo = poly_div_exact(hcur, cp, k);
        if (quo) {
          found.push_back(cp);
          hcur = *quo;
          std::vector<int> keep;
          for (size_t i = 0; i < alive.size(); ++i)
            if (std::find(pick.begin(), pick.end(), (int)i) == pick.end())
              keep.push_back(alive[i]);
          alive = std::move(keep);
          hit = true;
          break;
        }
        // next combination
        int pos = sz - 1;
        while (pos >= 0 && pick[pos] == (int)alive.size() - sz + pos) --pos;
        if (pos < 0) break;
        ++pick[pos];
        for (int i = pos + 1; i < sz; ++i) pick[i] = pick[i - 1] + 1;
      }
      if (!hit) ++sz;
    }
    if (poly_degree(hcur) > 0) found.push_back(hcur);
    for (auto& F : found) monic_factors.push_back(poly_shift(F, unshift));
  }

  // undo the monicization: t -> lc * t, then strip the w-content
  std::vector<Poly<Fq>> out;
  for (const auto& F : monic_factors) {
    TZ ftz = tcoeffs(F, k);
    FqUPoly pw = {fq_one(k)};
    for (size_t j = 0; j < ftz.size(); ++j) {
      if (!ftz[j].empty()) ftz[j] = up_mul(ftz[j], pw, k);
      pw = up_mul(pw, lc, k);
    }
    FqUPoly cont = tz_content(ftz, k);
    if (updeg(cont) > 0 || (updeg(cont) == 0 && !fq_is_zero(cont[0])))
      ftz = tz_divide_content(ftz, cont, k);
    out.push_back(poly_fq_normalize_unit(tz_to_poly(ftz), nullptr));
  }
  return out;
}

void factor_rec(const Poly<Fq>& f, int mult, const FqCtx* k, uint64_t seed,
                FqFactorization& out);

void push_factor(FqFactorization& out, const Poly<Fq>& f, int mult) {
  for (auto& [g, m] : out.factors)
    if (poly_sub(g, f).t.empty()) {
      m += mult;
      return;
    }
  out.factors.push_back({f, mult});
}

void factor_univariate_in(int var, const FqUPoly& u, int mult, const FqCtx* k,
                          uint64_t seed, FqFactorization& out) {
  auto uf = up_factor(u, k, seed);
  out.unit = out.unit * fq_pow(uf.unit, mult);
  for (auto& [g, m] : uf.factors) {
    Poly<Fq> p{2, VarKind::Affine, {}};
    for (size_t i = 0; i < g.size(); ++i) {
      if (fq_is_zero(g[i])) continue;
      p.t.push_back({mon_make(var == 0 ? std::vector<int32_t>{(int32_t)i, 0}
                                       : std::vector<int32_t>{0, (int32_t)i}),
                     g[i]});
    }
    poly_normalize(p);
    push_factor(out, p, m * mult);
  }
}

Poly<Fq> swap_vars2(const Poly<Fq>& f) {
  Poly<Fq> r{2, VarKind::Affine, {}};
  for (const auto& tm : f.t)
    r.t.push_back({mon_make({tm.first.e[1], tm.first.e[0]}), tm.second});
  poly_normalize(r);
  return r;
}

Poly<Fq> poly_pth_root2(const Poly<Fq>& f, const FqCtx* k) {
  uint64_t p = k->p;
  Poly<Fq> r{2, VarKind::Affine, {}};
  for (const auto& tm : f.t) {
    if (tm.first.e[0] % p != 0 || tm.first.e[1] % p != 0)
      throw std::logic_error("not a p-th power");
    r.t.push_back({mon_make({(int32_t)(tm.first.e[0] / p), (int32_t)(tm.first.e[1] / p)}),
                   fq_pth_root(tm.second)});
  }
  poly_normalize(r);
  return r;
}

void factor_rec(const Poly<Fq>& f, int mult, const FqCtx* k, uint64_t seed,
                FqFactorization& out) {
  if (f.t.empty()) throw std::invalid_argument("cannot factor the zero polynomial");
  if (poly_degree(f) == 0) {
    out.unit = out.unit * fq_pow(f.t[0].second, mult);
    return;
  }
  TZ tc = tcoeffs(f, k);
  int dt = (int)tc.size() - 1;
  if (dt == 0) {
    // univariate in w
    factor_univariate_in(0, tc[0], mult, k, seed, out);
    return;
  }
  // split off the w-content
  FqUPoly cont = tz_content(tc, k);
  Poly<Fq> body = f;
  if (updeg(cont) > 0) {
    factor_univariate_in(0, cont, mult, k, seed, out);
    body = tz_to_poly(tz_divide_content(tc, cont, k));
  }
  TZ btc = tcoeffs(body, k);
  // derivative in t
  TZ dbt(btc.size() > 1 ? btc.size() - 1 : 0);
  for (size_t j = 1; j < btc.size(); ++j)
    dbt[j - 1] = up_scale(btc[j], fq_from_int(k, (long long)j));
  tz_trim(dbt);
  if (dbt.empty()) {
    // every t-exponent is divisible by p; either the w-side still moves,
    // or the whole body is a p-th power
    bool wconst = true;
    for (const auto& tm : body.t)
      if (tm.first.e[0] % (int)k->p != 0) wconst = false;
    if (!wconst) {
      FqFactorization sub;
      sub.unit = fq_one(k);
      factor_rec(swap_vars2(body), mult, k, seed, sub);
      out.unit = out.unit * sub.unit;
      for (auto& [g, m] : sub.factors) push_factor(out, swap_vars2(g), m);
      return;
    }
    factor_rec(poly_pth_root2(body, k), mult * (int)k->p, k, seed, out);
    return;
  }
  // squarefree part
  TZ gcd = tz_gcd_t(btc, dbt, k);
  Poly<Fq> sf = body;
  if ((int)gcd.size() - 1 >= 1 || tz_degw(gcd) >= 1) {
    auto quo = poly_div_exact(body, tz_to_poly(gcd), k);
    if (!quo) throw std::logic_error("squarefree reduction failed to divide");
    sf = *quo;
  }
  Fq unit = fq_one(k);
  sf = poly_fq_normalize_unit(sf, &unit);
  TZ sft = tcoeffs(sf, k);
  // a full collapse into w alone would mean every multiplicity is divisible
  // by the characteristic, which the zero-derivative branch already caught
  if ((int)sft.size() - 1 < 1)
    throw std::logic_error("squarefree part lost its main variable");
  std::vector<Poly<Fq>> irr = factor_core(sf, k, seed);
  // multiplicities by exact division of the full body
  Poly<Fq> rem = body;
  for (const auto& g : irr) {
    int m = 0;
    for (;;) {
      auto quo = poly_div_exact(rem, g, k);
      if (!quo) break;
      rem = *quo;
      ++m;
    }
    if (m == 0) throw std::logic_error("claimed factor fails to divide");
    push_factor(out, g, m * mult);
  }
  if (poly_degree(rem) > 0) {
    // leftover carries the p-th power part missed by the t-squarefree pass
    factor_rec(rem, mult, k, seed, out);
    return;
  }
  out.unit = out.unit * fq_pow(rem.t.empty() ? fq_one(k) : rem.t[0].second, mult);
}

}  // namespace

FqFactorization factor_poly2(const Poly<Fq>& f, const FqCtx* k, uint64_t seed) {
  if (f.nvars != 2) throw std::invalid_argument("factor_poly2 expects two variables");
  FqFactorization out;
  out.unit = fq_one(k);
  factor_rec(f, 1, k, seed, out);
  for (auto& [g, m] : out.factors) {
    Fq lead = fq_one(k);
    g = poly_fq_normalize_unit(g, &lead);
    out.unit = out.unit * fq_pow(lead, m);
  }
  std::sort(out.factors.begin(), out.factors.end(), [](const auto& a, const auto& b) {
    int da = poly_degree(a.first), db = poly_degree(b.first);
    if (da != db) return da < db;
    return poly_to_string(a.first) < poly_to_string(b.first);
  });
  return out;
}

namespace {

Poly<Fq> homogenize_last(const Poly<Fq>& f) {
  int d = poly_degree(f);
  Poly<Fq> r{3, VarKind::Projective, {}};
  for (const auto& tm : f.t) {
    int a = tm.first.e[0], b = tm.first.e[1];
    r.t.push_back({mon_make({(int32_t)a, (int32_t)b, (int32_t)(d - a - b)}), tm.second});
  }
  poly_normalize(r);
  return r;
}

}  // namespace

FqFactorization factor_ternary_form(const Poly<Fq>& F, const FqCtx* k, uint64_t seed) {
  if (F.nvars != 3) throw std::invalid_argument("ternary form expected");
  if (F.t.empty()) throw std::invalid_argument("cannot factor the zero form");
  int d = poly_degree(F);
  for (const auto& tm : F.t)
    if (tm.first.deg != d) throw std::invalid_argument("form is not homogeneous");
  FqFactorization out;
  out.unit = fq_one(k);
  if (d == 0) {
    out.unit = F.t[0].second;
    return out;
  }
  Poly<Fq> fhat = poly_dehomogenize(F, 2);
  int a = d - poly_degree(fhat);
  auto sub = factor_poly2(fhat, k, seed);
  out.unit = sub.unit;
  int degsum = a;
  for (auto& [g, m] : sub.factors) {
    Poly<Fq> G = homogenize_last(g);
    degsum += poly_degree(G) * m;
    out.factors.push_back({G, m});
  }
  if (a > 0) {
    Poly<Fq> x2{3, VarKind::Projective, {{mon_make({0, 0, 1}), fq_one(k)}}};
    out.factors.push_back({x2, a});
  }
  if (degsum != d) throw std::logic_error("factor degrees fail to add up");
  return out;
}

AbsoluteFactorization absolute_factor_form(const Poly<Fp>& F, int e_max,
                                           uint64_t field_cap_log2, uint64_t seed) {
  AbsoluteFactorization out;
  if (F.t.empty()) throw std::invalid_argument("cannot factor the zero form");
  uint64_t p = F.t[0].second.p;
  auto fits_cap = [&](long e) {
    if (e > e_max) return false;
    double bits = (double)e * std::log2((double)p);
    return bits <= (double)field_cap_log2 + 1e-9;
  };
  long e = 1;
  std::vector<std::pair<int, int>> pattern;
  bool have = false;
  for (int round = 0; round < 64; ++round) {
    if (!fits_cap(e)) {
      out.note = "field cap exceeded before the factorization stabilized";
      return out;
    }
    const FqCtx* ctx = fq_context(p, (int)e);
    FqFactorization fac;
    try {
      fac = factor_ternary_form(poly_fp_to_fq(F, ctx), ctx, seed);
    } catch (const std::runtime_error&) {
      // field too small for a squarefree specialization; a larger multiple
      // of the current level keeps the refinement chain intact
      e *= 2;
      continue;
    }
    std::vector<std::pair<int, int>> pat;
    long l = 1;
    for (auto& [g, m] : fac.factors) {
      int dg = poly_degree(g);
      pat.push_back({dg, m});
      l = std::lcm(l, (long)dg);
    }
    std::sort(pat.begin(), pat.end());
    out.e = (int)e;
    out.ctx = ctx;
    out.unit = fac.unit;
    out.factors = fac.factors;
    if (have && pat == pattern) {
      out.ok = true;
      return out;
    }
    if (l == 1) {
      // all factors linear: absolutely irreducible outright
      out.ok = true;
      return out;
    }
    pattern = pat;
    have = true;
    e = e * l;
  }
  out.note = "factorization failed to stabilize";
  return out;
}

}  // namespace detcount
