#pragma once

#include <set>
#include <tuple>

#include "detcount/poly.hpp"

namespace detcount {

// Reduced basis: monic generators, no term of any generator divisible by the
// leading monomial of another, sorted ascending by leading monomial.
// If capped, S-pairs above cap_degree were dropped: for homogeneous input the
// basis is still exact for every query of degree <= cap_degree.
template <class F>
struct GroebnerBasis {
  int nvars = 0;
  TermOrder order;
  std::vector<Poly<F>> gens;
  bool capped = false;
  int cap_degree = -1;
};

template <class F>
Poly<F> normal_form(const Poly<F>& f, const std::vector<Poly<F>>& basis, const TermOrder& o) {
  static_assert(RingOps<F>::is_field);
  Poly<F> rem = poly_zero<F>(f.nvars, f.vk);
  Poly<F> h = f;
  while (!h.t.empty()) {
    const auto& lt = leading_term(h, o);
    bool reduced = false;
    for (const auto& g : basis) {
      if (g.t.empty()) continue;
      const auto& glt = leading_term(g, o);
      auto q = mon_div(lt.first, glt.first);
      if (!q) continue;
      F c = lt.second * RingOps<F>::inv(glt.second);
      h = poly_sub(h, poly_mul_term(g, *q, c));
      reduced = true;
      break;
    }
    if (!reduced) {
      rem.t.push_back(lt);
      Poly<F> single{h.nvars, h.vk, {lt}};
      h = poly_sub(h, single);
    }
  }
  poly_normalize(rem);
  return rem;
}

template <class F>
Poly<F> s_polynomial(const Poly<F>& f, const Poly<F>& g, const TermOrder& o) {
  const auto& lf = leading_term(f, o);
  const auto& lg = leading_term(g, o);
  Monomial l = mon_lcm(lf.first, lg.first);
  Poly<F> a = poly_mul_term(f, *mon_div(l, lf.first), RingOps<F>::inv(lf.second));
  Poly<F> b = poly_mul_term(g, *mon_div(l, lg.first), RingOps<F>::inv(lg.second));
  return poly_sub(a, b);
}

template <class F>
Poly<F> make_monic(const Poly<F>& f, const TermOrder& o) {
  if (f.t.empty()) return f;
  return poly_scale(f, RingOps<F>::inv(leading_term(f, o).second));
}

namespace gb_detail {

// deterministic pair key: degree of the lcm first (normal strategy), then the
// lcm itself, then the generator indices
struct PairKey {
  int deg;
  Monomial lcm;
  int i, j;
};

inline bool pairkey_less(const PairKey& a, const PairKey& b, const TermOrder& o) {
  if (a.deg != b.deg) return a.deg < b.deg;
  int c = mon_cmp(a.lcm, b.lcm, o);
  if (c != 0) return c < 0;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

}  // namespace gb_detail

template <class F>
GroebnerBasis<F> buchberger(std::vector<Poly<F>> input, const TermOrder& o, int cap_degree = -1) {
  static_assert(RingOps<F>::is_field);
  GroebnerBasis<F> out;
  out.order = o;
  out.cap_degree = cap_degree;
  std::vector<Poly<F>> G;
  for (auto& f : input) {
    if (!f.t.empty()) {
      out.nvars = f.nvars;
      G.push_back(make_monic(f, o));
    }
  }
  if (G.empty()) return out;

  auto cmp = [&](const gb_detail::PairKey& a, const gb_detail::PairKey& b) {
    return gb_detail::pairkey_less(a, b, o);
  };
  std::multiset<gb_detail::PairKey, decltype(cmp)> queue(cmp);
  auto push_pairs = [&](int j) {
    for (int i = 0; i < j; ++i) {
      Monomial l = mon_lcm(leading_monomial(G[i], o), leading_monomial(G[j], o));
      queue.insert(gb_detail::PairKey{(int)l.deg, l, i, j});
    }
  };
  for (int j = 1; j < (int)G.size(); ++j) push_pairs(j);

  while (!queue.empty()) {
    gb_detail::PairKey k = *queue.begin();
    queue.erase(queue.begin());
    if (cap_degree >= 0 && k.deg > cap_degree) {
      out.capped = true;
      continue;
    }
    const Monomial& mi = leading_monomial(G[k.i], o);
    const Monomial& mj = leading_monomial(G[k.j], o);
    // product criterion
    if (mon_mul(mi, mj) == k.lcm) continue;
    Poly<F> s = normal_form(s_polynomial(G[k.i], G[k.j], o), G, o);
    if (s.t.empty()) continue;
    if (cap_degree >= 0 && leading_monomial(s, o).deg > cap_degree) {
      out.capped = true;
      continue;
    }
    G.push_back(make_monic(s, o));
    push_pairs((int)G.size() - 1);
  }

  // minimalize: drop generators whose LM is divisible by another LM
  std::vector<Poly<F>> minimal;
  for (size_t i = 0; i < G.size(); ++i) {
    const Monomial& m = leading_monomial(G[i], o);
    bool redundant = false;
    for (size_t j = 0; j < G.size(); ++j) {
      if (i == j) continue;
      const Monomial& mj2 = leading_monomial(G[j], o);
      if (mon_divides(mj2, m) && (mj2 != m || j < i)) {
        redundant = true;
        break;
      }
    }
    if (!redundant) minimal.push_back(G[i]);
  }
  // tail-reduce for the reduced basis
  std::vector<Poly<F>> red = minimal;
  for (size_t i = 0; i < red.size(); ++i) {
    std::vector<Poly<F>> others;
    for (size_t j = 0; j < red.size(); ++j)
      if (j != i) others.push_back(red[j]);
    red[i] = make_monic(normal_form(red[i], others, o), o);
  }
  std::sort(red.begin(), red.end(), [&](const Poly<F>& a, const Poly<F>& b) {
    return mon_cmp(leading_monomial(a, o), leading_monomial(b, o), o) < 0;
  });
  out.gens = std::move(red);
  return out;
}

template <class F>
Poly<F> normal_form(const Poly<F>& f, const GroebnerBasis<F>& gb) {
  return normal_form(f, gb.gens, gb.order);
}

template <class F>
bool ideal_contains(const GroebnerBasis<F>& gb, const Poly<F>& f) {
  return normal_form(f, gb).t.empty();
}

// Generators of the ideal with the variables listed in `drop` eliminated.
// Result polynomials live in the remaining variables, in their original
// relative order. Exact when uncapped (block order is elimination-compatible).
std::vector<Poly<mpq_class>> eliminate(const std::vector<Poly<mpq_class>>& gens, int nvars,
                                       const std::vector<int>& drop, int cap_degree = -1,
                                       bool* capped = nullptr);

}  // namespace detcount
