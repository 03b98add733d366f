#include "detcount/fq.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace detcount {

uint64_t inv_mod_u64(uint64_t a, uint64_t m) {
  // extended Euclid; m prime in our uses but only gcd(a,m)=1 is required
  int64_t t = 0, nt = 1;
  uint64_t r = m, nr = a % m;
  while (nr != 0) {
    uint64_t q = r / nr;
    int64_t tmp = t - (int64_t)q * nt;
    t = nt;
    nt = tmp;
    uint64_t tmr = r - q * nr;
    r = nr;
    nr = tmr;
  }
  if (r != 1) throw std::domain_error("inv_mod_u64: not invertible");
  if (t < 0) t += (int64_t)m;
  return (uint64_t)t;
}

namespace {

using UPoly = std::vector<uint64_t>;  // univariate over F_p, c[i] coeff of x^i

void utrim(UPoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

UPoly umul(const UPoly& a, const UPoly& b, uint64_t p) {
  if (a.empty() || b.empty()) return {};
  UPoly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = (uint64_t)(((__uint128_t)a[i] * b[j] + r[i + j]) % p);
  }
  utrim(r);
  return r;
}

// reduce f modulo the monic modulus x^e + m(x)
UPoly umod_by_ctx(UPoly f, const FqCtx* k) {
  uint64_t p = k->p;
  size_t e = (size_t)k->e;
  while (f.size() > e) {
    uint64_t c = f.back();
    size_t d = f.size() - 1 - e;
    f.pop_back();
    if (c) {
      for (size_t i = 0; i < e; ++i) {
        if (!k->mod[i]) continue;
        uint64_t sub = (uint64_t)((__uint128_t)c * k->mod[i] % p);
        f[d + i] = f[d + i] >= sub ? f[d + i] - sub : f[d + i] + p - sub;
      }
    }
    utrim(f);
  }
  return f;
}

UPoly umod(UPoly a, const UPoly& m, uint64_t p) {
  utrim(a);
  uint64_t inv_lm = inv_mod_u64(m.back(), p);
  while (a.size() >= m.size()) {
    uint64_t c = (uint64_t)((__uint128_t)a.back() * inv_lm % p);
    size_t d = a.size() - m.size();
    for (size_t i = 0; i < m.size(); ++i) {
      uint64_t sub = (uint64_t)((__uint128_t)c * m[i] % p);
      a[d + i] = a[d + i] >= sub ? a[d + i] - sub : a[d + i] + p - sub;
    }
    utrim(a);  // leading entry is now zero, so the size strictly drops
  }
  return a;
}

UPoly ugcd(UPoly a, UPoly b, uint64_t p) {
  utrim(a);
  utrim(b);
  while (!b.empty()) {
    UPoly r = umod(a, b, p);
    a = b;
    b = r;
  }
  if (!a.empty()) {
    uint64_t inv = inv_mod_u64(a.back(), p);
    for (auto& c : a) c = (uint64_t)((__uint128_t)c * inv % p);
  }
  return a;
}

UPoly upowmod_x_p(const UPoly& base, uint64_t exp, const UPoly& m, uint64_t p) {
  // base^exp mod m
  UPoly r{1}, b = umod(base, m, p);
  uint64_t e = exp;
  while (e) {
    if (e & 1) r = umod(umul(r, b, p), m, p);
    b = umod(umul(b, b, p), m, p);
    e >>= 1;
  }
  return r;
}

bool is_irreducible(const UPoly& f, uint64_t p) {
  // f monic of degree e: x^(p^e) == x mod f, and gcd(x^(p^(e/l)) - x, f) = 1
  // for every prime l dividing e
  int e = (int)f.size() - 1;
  UPoly x{0, 1};
  // frob[j] = x^(p^j) mod f via iterated p-th powers
  std::vector<UPoly> frob(e + 1);
  frob[0] = umod(x, f, p);
  for (int j = 1; j <= e; ++j) frob[j] = upowmod_x_p(frob[j - 1], p, f, p);
  UPoly diff = frob[e];
  // subtract x
  if (diff.size() < 2) diff.resize(2, 0);
  diff[1] = diff[1] >= 1 ? diff[1] - 1 : p - 1;
  utrim(diff);
  if (!diff.empty()) return false;
  int n = e;
  for (int l = 2; l * l <= n; ++l) {
    if (n % l) continue;
    while (n % l == 0) n /= l;
    UPoly d = frob[e / l];
    if (d.size() < 2) d.resize(2, 0);
    d[1] = d[1] >= 1 ? d[1] - 1 : p - 1;
    utrim(d);
    if (ugcd(d, f, p).size() != 1) return false;
  }
  if (n > 1) {
    UPoly d = frob[e / n];
    if (d.size() < 2) d.resize(2, 0);
    d[1] = d[1] >= 1 ? d[1] - 1 : p - 1;
    utrim(d);
    if (ugcd(d, f, p).size() != 1) return false;
  }
  return true;
}

struct SplitMix {
  uint64_t s;
  uint64_t next() {
    s += 0x9E3779B97F4A7C15ull;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

std::map<std::pair<uint64_t, int>, std::unique_ptr<FqCtx>> g_registry;
std::mutex g_registry_mu;

}  // namespace

const FqCtx* fq_context(uint64_t p, int e) {
  if (p < 2 || e < 1) throw std::invalid_argument("fq_context: bad (p,e)");
  std::lock_guard<std::mutex> lk(g_registry_mu);
  auto key = std::make_pair(p, e);
  auto it = g_registry.find(key);
  if (it != g_registry.end()) return it->second.get();
  auto ctx = std::make_unique<FqCtx>();
  ctx->p = p;
  ctx->e = e;
  if (e == 1) {
    ctx->mod = {0};  // modulus x: elements are plain residues
  } else {
    SplitMix rng{0xD1CE5EEDull ^ (p * 1315423911ull) ^ (uint64_t)e};
    for (;;) {
      UPoly f(e + 1, 0);
      f[e] = 1;
      for (int i = 0; i < e; ++i) f[i] = rng.next() % p;
      if (f[0] == 0) f[0] = 1;  // constant term 0 is never irreducible
      if (is_irreducible(f, p)) {
        ctx->mod.assign(f.begin(), f.begin() + e);
        break;
      }
    }
  }
  const FqCtx* raw = ctx.get();
  g_registry.emplace(key, std::move(ctx));
  return raw;
}

Fq fq_zero(const FqCtx* k) { return Fq{k, std::vector<uint64_t>((size_t)k->e, 0)}; }

Fq fq_one(const FqCtx* k) {
  Fq r = fq_zero(k);
  r.c[0] = 1 % k->p;
  return r;
}

Fq fq_from_int(const FqCtx* k, long long x) {
  Fq r = fq_zero(k);
  long long m = x % (long long)k->p;
  if (m < 0) m += (long long)k->p;
  r.c[0] = (uint64_t)m;
  return r;
}

Fq fq_gen(const FqCtx* k) {
  Fq r = fq_zero(k);
  if (k->e == 1) {
    // x == -mod[0], i.e. the residue of the root of the degree-1 modulus
    r.c[0] = k->mod[0] ? k->p - k->mod[0] : 0;
  } else {
    r.c[1] = 1;
  }
  return r;
}

Fq fq_embed(const FqCtx* k, const Fp& a) {
  Fq r = fq_zero(k);
  r.c[0] = a.v % k->p;
  return r;
}

bool fq_is_zero(const Fq& a) {
  for (auto c : a.c)
    if (c) return false;
  return true;
}

bool operator==(const Fq& a, const Fq& b) { return a.k == b.k && a.c == b.c; }

Fq operator+(const Fq& a, const Fq& b) {
  Fq r = a;
  for (int i = 0; i < a.k->e; ++i) {
    r.c[i] += b.c[i];
    if (r.c[i] >= a.k->p) r.c[i] -= a.k->p;
  }
  return r;
}

Fq operator-(const Fq& a, const Fq& b) {
  Fq r = a;
  for (int i = 0; i < a.k->e; ++i)
    r.c[i] = a.c[i] >= b.c[i] ? a.c[i] - b.c[i] : a.c[i] + a.k->p - b.c[i];
  return r;
}

Fq operator-(const Fq& a) {
  Fq r = a;
  for (auto& c : r.c) c = c ? a.k->p - c : 0;
  return r;
}

Fq operator*(const Fq& a, const Fq& b) {
  UPoly pa(a.c.begin(), a.c.end()), pb(b.c.begin(), b.c.end());
  utrim(pa);
  utrim(pb);
  UPoly prod = umul(pa, pb, a.k->p);
  prod = umod_by_ctx(std::move(prod), a.k);
  Fq r = fq_zero(a.k);
  for (size_t i = 0; i < prod.size(); ++i) r.c[i] = prod[i];
  return r;
}

Fq fq_inv(const Fq& a) {
  if (fq_is_zero(a)) throw std::domain_error("fq_inv: zero");
  // extended Euclid in F_p[x] against the full modulus
  uint64_t p = a.k->p;
  UPoly m(a.k->mod);
  m.resize(a.k->e + 1, 0);
  m[a.k->e] = 1;
  UPoly r0 = m, r1(a.c.begin(), a.c.end());
  utrim(r1);
  UPoly t0{}, t1{1};
  while (!r1.empty()) {
    // q, rem of r0 / r1
    UPoly q;
    UPoly rem = r0;
    utrim(rem);
    uint64_t invl = inv_mod_u64(r1.back(), p);
    while (rem.size() >= r1.size() && !rem.empty()) {
      uint64_t c = (uint64_t)((__uint128_t)rem.back() * invl % p);
      size_t d = rem.size() - r1.size();
      if (q.size() < d + 1) q.resize(d + 1, 0);
      q[d] = c;
      for (size_t i = 0; i < r1.size(); ++i) {
        uint64_t sub = (uint64_t)((__uint128_t)c * r1[i] % p);
        rem[d + i] = rem[d + i] >= sub ? rem[d + i] - sub : rem[d + i] + p - sub;
      }
      utrim(rem);
    }
    UPoly nt = umul(q, t1, p);
    // t0 - nt
    UPoly t2 = t0;
    if (t2.size() < nt.size()) t2.resize(nt.size(), 0);
    for (size_t i = 0; i < nt.size(); ++i)
      t2[i] = t2[i] >= nt[i] ? t2[i] - nt[i] : t2[i] + p - nt[i];
    utrim(t2);
    r0 = r1;
    r1 = rem;
    t0 = t1;
    t1 = t2;
  }
  // r0 = gcd (unit since modulus irreducible), scale t0 by its inverse
  uint64_t inv = inv_mod_u64(r0.back(), p);
  Fq res = fq_zero(a.k);
  for (size_t i = 0; i < t0.size(); ++i)
    res.c[i] = (uint64_t)((__uint128_t)t0[i] * inv % p);
  return res;
}

Fq fq_pow(Fq a, __uint128_t e) {
  Fq r = fq_one(a.k);
  while (e) {
    if (e & 1) r = r * a;
    a = a * a;
    e >>= 1;
  }
  return r;
}

Fq fq_pth_root(const Fq& a) {
  // Frobenius has order e on F_{p^e}; its inverse is x -> x^(p^(e-1))
  __uint128_t e = 1;
  for (int i = 0; i < a.k->e - 1; ++i) e *= a.k->p;
  return fq_pow(a, e);
}

uint64_t fq_index(const Fq& a) {
  uint64_t idx = 0;
  for (int i = a.k->e - 1; i >= 0; --i) idx = idx * a.k->p + a.c[i];
  return idx;
}

Fq fq_from_index(const FqCtx* k, uint64_t idx) {
  Fq r = fq_zero(k);
  for (int i = 0; i < k->e; ++i) {
    r.c[i] = idx % k->p;
    idx /= k->p;
  }
  return r;
}

std::string fq_str(const Fq& a) {
  std::ostringstream os;
  if (a.k->e == 1) {
    os << a.c[0];
    return os.str();
  }
  bool first = true;
  for (int i = 0; i < a.k->e; ++i) {
    if (!a.c[i]) continue;
    if (!first) os << "+";
    first = false;
    if (i == 0 || a.c[i] != 1) os << a.c[i];
    if (i > 0 && a.c[i] != 1) os << "*";
    if (i == 1) os << "g";
    if (i > 1) os << "g^" << i;
  }
  if (first) os << "0";
  return "(" + os.str() + ")";
}

}  // namespace detcount
