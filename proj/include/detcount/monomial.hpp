#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

namespace detcount {

// Exponent vector with cached total degree. Invariant: deg == sum of e.
struct Monomial {
  std::vector<int32_t> e;
  int32_t deg = 0;
};

inline Monomial mon_make(std::vector<int32_t> exps) {
  Monomial m;
  m.deg = std::accumulate(exps.begin(), exps.end(), 0);
  m.e = std::move(exps);
  return m;
}

inline Monomial mon_one(int nvars) { return Monomial{std::vector<int32_t>(nvars, 0), 0}; }

inline bool mon_is_one(const Monomial& m) { return m.deg == 0; }

inline Monomial mon_mul(const Monomial& a, const Monomial& b) {
  Monomial r = a;
  for (size_t i = 0; i < r.e.size(); ++i) r.e[i] += b.e[i];
  r.deg += b.deg;
  return r;
}

inline bool mon_divides(const Monomial& a, const Monomial& b) {
  // a | b
  for (size_t i = 0; i < a.e.size(); ++i)
    if (a.e[i] > b.e[i]) return false;
  return true;
}

inline std::optional<Monomial> mon_div(const Monomial& a, const Monomial& b) {
  // a / b
  Monomial r = a;
  for (size_t i = 0; i < r.e.size(); ++i) {
    r.e[i] -= b.e[i];
    if (r.e[i] < 0) return std::nullopt;
  }
  r.deg -= b.deg;
  return r;
}

inline Monomial mon_lcm(const Monomial& a, const Monomial& b) {
  Monomial r = a;
  r.deg = 0;
  for (size_t i = 0; i < r.e.size(); ++i) {
    r.e[i] = a.e[i] > b.e[i] ? a.e[i] : b.e[i];
    r.deg += r.e[i];
  }
  return r;
}

inline bool operator==(const Monomial& a, const Monomial& b) { return a.e == b.e; }
inline bool operator!=(const Monomial& a, const Monomial& b) { return !(a == b); }

// Term orders. Both graded orders refine total degree; ties break on the
// sign of the left-most nonzero entry of a-b:
//   GrLex:   positive => a > b
//   GRevLex: positive => a < b   (x0-heavy monomials come out small)
// Elim compares grlex on the first elim_first variables, then grlex on the
// rest; any monomial involving a leading-block variable dominates every
// monomial free of them, which is what elimination needs.
enum class OrderKind { GrLex, GRevLex, Elim };

struct TermOrder {
  OrderKind kind = OrderKind::GRevLex;
  int elim_first = 0;
};

inline int mon_cmp(const Monomial& a, const Monomial& b, const TermOrder& o) {
  if (o.kind == OrderKind::Elim) {
    int da = 0, db = 0;
    for (int i = 0; i < o.elim_first; ++i) {
      da += a.e[i];
      db += b.e[i];
    }
    if (da != db) return da < db ? -1 : 1;
    for (int i = 0; i < o.elim_first; ++i)
      if (a.e[i] != b.e[i]) return a.e[i] > b.e[i] ? 1 : -1;
    int ra = a.deg - da, rb = b.deg - db;
    if (ra != rb) return ra < rb ? -1 : 1;
    for (size_t i = o.elim_first; i < a.e.size(); ++i)
      if (a.e[i] != b.e[i]) return a.e[i] > b.e[i] ? 1 : -1;
    return 0;
  }
  if (a.deg != b.deg) return a.deg < b.deg ? -1 : 1;
  for (size_t i = 0; i < a.e.size(); ++i) {
    if (a.e[i] == b.e[i]) continue;
    bool left_positive = a.e[i] > b.e[i];
    if (o.kind == OrderKind::GrLex) return left_positive ? 1 : -1;
    return left_positive ? -1 : 1;
  }
  return 0;
}

inline bool mon_less(const Monomial& a, const Monomial& b, const TermOrder& o) {
  return mon_cmp(a, b, o) < 0;
}

// Canonical storage comparator: graded-lex descending.
inline bool mon_grlex_greater(const Monomial& a, const Monomial& b) {
  return mon_cmp(a, b, TermOrder{OrderKind::GrLex, 0}) > 0;
}

// All monomials in nvars variables of exact total degree k, canonical
// (graded-lex descending) order.
std::vector<Monomial> monomials_of_degree(int nvars, int k);

}  // namespace detcount
