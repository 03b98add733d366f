#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "detcount/groebner.hpp"
#include "detcount/matrix.hpp"

namespace detcount {

// Degree-k monomials outside the leading-monomial staircase of the basis.
template <class F>
std::vector<Monomial> standard_monomials(const GroebnerBasis<F>& gb, int k) {
  std::vector<Monomial> lms;
  for (const auto& g : gb.gens) lms.push_back(leading_monomial(g, gb.order));
  std::vector<Monomial> out;
  for (auto& m : monomials_of_degree(gb.nvars, k)) {
    bool in_staircase = true;
    for (const auto& l : lms)
      if (mon_divides(l, m)) {
        in_staircase = false;
        break;
      }
    if (in_staircase) out.push_back(std::move(m));
  }
  return out;
}

template <class F>
long hilbert_function(const GroebnerBasis<F>& gb, int k) {
  return (long)standard_monomials(gb, k).size();
}

// Exponent mass of variable m over the degree-k standard monomials.
template <class F>
long exponent_sum(const GroebnerBasis<F>& gb, int k, int var) {
  long s = 0;
  for (const auto& mo : standard_monomials(gb, k)) s += mo.e[var];
  return s;
}

template <class F>
std::vector<long> exponent_sums(const GroebnerBasis<F>& gb, int k) {
  std::vector<long> s(gb.nvars, 0);
  for (const auto& mo : standard_monomials(gb, k))
    for (int v = 0; v < gb.nvars; ++v) s[v] += mo.e[v];
  return s;
}

struct HilbertFit {
  bool ok = false;       // stabilization detected inside the cap
  int r = -2;            // degree of the Hilbert polynomial; -1 means empty
  mpq_class d = 0;       // leading coefficient * r!  (the degree for r >= 0)
  int k_stab = -1;       // first degree where values match the polynomial
  std::vector<mpq_class> coeffs;  // dense coefficients, constant term first
  std::vector<long> h;   // the computed values h(0..K)
  std::string note;
};

// Fit an eventually-polynomial integer sequence. Needs the polynomial to
// match at least r+3 trailing values (r+1 interpolation points plus two
// extra degrees of verification).
HilbertFit fit_eventually_polynomial(const std::vector<long>& h, int max_degree);

mpq_class eval_fit(const HilbertFit& fit, long k);

template <class F>
HilbertFit hilbert_fit(const GroebnerBasis<F>& gb, int cap = -1) {
  int dmax = 1;
  for (const auto& g : gb.gens) dmax = std::max(dmax, poly_degree(g));
  int K = cap >= 0 ? cap : 3 * dmax + gb.nvars + 5;
  if (gb.capped && gb.cap_degree >= 0) K = std::min(K, gb.cap_degree);
  std::vector<long> h;
  for (int k = 0; k <= K; ++k) h.push_back(hilbert_function(gb, k));
  return fit_eventually_polynomial(h, gb.nvars);
}

struct ShareEstimate {
  std::vector<mpq_class> a;       // one share per variable
  std::vector<mpq_class> radius;  // max deviation over the last three degrees
  bool exact = false;             // principal ideal: closed form used
  bool stabilized = false;        // all radii within tolerance
  int k_used = 0;
};

// Asymptotic share of each variable's exponent mass among standard monomials,
// estimated at k_max (radius from the trailing three degrees). For a
// principal ideal the closed form (d - alpha_m)/(n d) is exact, alpha being
// the leading exponent of the generator under the basis order and n the
// projective ambient dimension (nvars - 1).
template <class F>
ShareEstimate variable_shares(const GroebnerBasis<F>& gb, int k_max,
                              const mpq_class& tol = mpq_class(1, 50)) {
  ShareEstimate out;
  k_max = std::max(1, k_max);
  out.k_used = k_max;
  int nv = gb.nvars;
  std::vector<std::vector<mpq_class>> est;  // per degree: shares
  for (int k = std::max(1, k_max - 2); k <= k_max; ++k) {
    std::vector<long> s = exponent_sums(gb, k);
    long hk = hilbert_function(gb, k);
    std::vector<mpq_class> row(nv, 0);
    if (hk > 0)
      for (int v = 0; v < nv; ++v) {
        row[v] = mpq_class(s[v], (long)k * hk);
        row[v].canonicalize();
      }
    est.push_back(std::move(row));
  }
  const std::vector<mpq_class>& last = est.back();
  out.a = last;
  out.radius.assign(nv, 0);
  for (const auto& row : est)
    for (int v = 0; v < nv; ++v) {
      mpq_class dev = abs(row[v] - last[v]);
      if (dev > out.radius[v]) out.radius[v] = dev;
    }
  if (gb.gens.size() == 1) {
    const Monomial& alpha = leading_monomial(gb.gens[0], gb.order);
    long d = alpha.deg;
    long n = nv - 1;
    if (n >= 1 && d >= 1) {
      out.exact = true;
      for (int v = 0; v < nv; ++v) {
        mpq_class closed(d - alpha.e[v], n * d);
        closed.canonicalize();
        // radius becomes the distance of the finite-k estimate to truth
        mpq_class dev = abs(out.a[v] - closed);
        if (dev > out.radius[v]) out.radius[v] = dev;
        out.a[v] = closed;
      }
    }
  }
  out.stabilized = true;
  for (int v = 0; v < nv; ++v)
    if (out.radius[v] > tol) out.stabilized = false;
  return out;
}

// Independent Hilbert oracle: h(k) = #monomials(k) - rank of the degree-k
// multiplication (Macaulay) matrix of the generators. No Groebner machinery.
template <class F>
long macaulay_hilbert_oracle(const std::vector<Poly<F>>& gens, int nvars, int k, const F& like) {
  auto cols = monomials_of_degree(nvars, k);
  std::map<std::vector<int32_t>, int> col_index;
  for (size_t j = 0; j < cols.size(); ++j) col_index[cols[j].e] = (int)j;
  std::vector<std::vector<F>> rows;
  F zero = RingOps<F>::zero(like);
  for (const auto& g : gens) {
    if (g.t.empty()) continue;
    int dg = poly_degree(g);
    if (dg > k) continue;
    for (const auto& u : monomials_of_degree(nvars, k - dg)) {
      std::vector<F> row(cols.size(), zero);
      for (const auto& tm : g.t) {
        if (tm.first.deg != dg) continue;  // homogeneous part of top degree only
        row[col_index.at(mon_mul(u, tm.first).e)] = tm.second;
      }
      rows.push_back(std::move(row));
    }
  }
  Mat<F> m((int)rows.size(), (int)cols.size(), zero);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) m.at(i, j) = rows[i][j];
  return (long)cols.size() - matrix_rank(std::move(m), like);
}

}  // namespace detcount
