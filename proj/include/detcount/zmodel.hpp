#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "detcount/point.hpp"
#include "detcount/staircase.hpp"

namespace detcount {

// A projective scheme presented by primitive integer forms, with its
// dimension and degree read off the stabilized Hilbert data over Q.
struct IntegralModel {
  int nvars = 0;
  std::vector<Poly<mpz_class>> gens;
  std::string hash;
  HilbertFit fit;
  int r = -2;  // projective dimension, -1 for empty
  long d = 0;  // degree of the scheme
};

// Validates (homogeneous, projective-kind, nonzero), clears denominators,
// normalizes to primitive forms, fits the Hilbert data. Throws on bad input
// or when the Hilbert values fail to stabilize.
IntegralModel make_model(const std::vector<Poly<mpq_class>>& gens);

std::vector<Poly<Fp>> reduce_model(const IntegralModel& m, uint64_t p);
std::vector<Poly<Fq>> reduce_model_fq(const IntegralModel& m, const FqCtx* k);

// Reduction of a projective integer point, normalized so the first nonzero
// coordinate is 1. Empty result only for the all-zero reduction, which a
// primitive point never produces.
std::optional<std::vector<Fq>> specialize_point(const IntPoint& pt, const FqCtx* k);

struct PointScan {
  std::vector<std::vector<Fq>> points;  // normalized projective points
  uint64_t scanned = 0;
  bool capped = false;
};

// All points of the reduction in P^{nvars-1}(F_q), by brute scan over
// normalized representatives (leading index ascending, trailing coordinates
// in base-q little-endian order). scan_cap bounds the candidates examined.
PointScan points_on_reduction(const std::vector<Poly<Fq>>& gens, const FqCtx* k,
                              bool x0_nonzero = false, uint64_t scan_cap = 50000000);

// Affine generators vanishing at the origin: dehomogenize at the first
// nonvanishing coordinate of p and translate p there. Throws if p is not
// on the scheme.
template <class F>
std::vector<Poly<F>> affine_chart_at(const std::vector<Poly<F>>& proj_gens,
                                     const std::vector<F>& p, const F& like,
                                     int* chart_out = nullptr) {
  int chart = -1;
  for (size_t i = 0; i < p.size(); ++i)
    if (!RingOps<F>::is_zero(p[i])) {
      chart = (int)i;
      break;
    }
  if (chart < 0) throw std::invalid_argument("affine_chart_at: zero point");
  F inv = RingOps<F>::inv(p[chart]);
  std::vector<F> aff;
  for (size_t i = 0; i < p.size(); ++i)
    if ((int)i != chart) aff.push_back(p[i] * inv);
  if (chart_out) *chart_out = chart;
  std::vector<Poly<F>> out;
  for (const auto& g : proj_gens) {
    Poly<F> a = poly_dehomogenize(g, chart);
    a = poly_shift(a, aff);
    if (!a.t.empty() && a.t.back().first.deg == 0)
      throw std::invalid_argument("affine_chart_at: point not on the scheme");
    out.push_back(std::move(a));
  }
  return out;
}

// Hilbert-Samuel increments g(k) = dim m^k / m^{k+1} of the local ring at
// the origin of the affine scheme cut by gens, for k = 0..kmax. Computed
// from dim R/(m^k + J) via truncated multiplication matrices.
template <class F>
std::vector<long> local_g_origin(const std::vector<Poly<F>>& gens, int kmax, const F& like) {
  F zero = RingOps<F>::zero(like);
  int nv = gens.empty() ? 0 : gens[0].nvars;
  // dims[k] = dim R/(m^k + J), k = 0..kmax+1
  std::vector<long> dims(kmax + 2, 0);
  for (int k = 1; k <= kmax + 1; ++k) {
    std::vector<Monomial> cols;
    for (int dg = 0; dg < k; ++dg)
      for (auto& m : monomials_of_degree(nv, dg)) cols.push_back(std::move(m));
    std::map<std::vector<int32_t>, int> colidx;
    for (size_t j = 0; j < cols.size(); ++j) colidx[cols[j].e] = (int)j;
    std::vector<std::vector<F>> rows;
    for (const auto& g : gens) {
      if (g.t.empty()) continue;
      int og = g.t.back().first.deg;  // order at the origin (terms sorted desc)
      for (int du = 0; du + og < k; ++du)
        for (const auto& u : monomials_of_degree(nv, du)) {
          std::vector<F> row(cols.size(), zero);
          bool nonzero = false;
          for (const auto& tm : g.t) {
            Monomial prod = mon_mul(u, tm.first);
            if (prod.deg >= k) continue;
            row[colidx.at(prod.e)] = tm.second;
            nonzero = true;
          }
          if (nonzero) rows.push_back(std::move(row));
        }
    }
    Mat<F> mat((int)rows.size(), (int)cols.size(), zero);
    for (int i = 0; i < mat.rows; ++i)
      for (int j = 0; j < mat.cols; ++j) mat.at(i, j) = rows[i][j];
    dims[k] = (long)cols.size() - matrix_rank(std::move(mat), like);
  }
  std::vector<long> g(kmax + 1, 0);
  for (int k = 0; k <= kmax; ++k) g[k] = dims[k + 1] - dims[k];
  return g;
}

template <class F>
std::vector<long> local_g_at(const std::vector<Poly<F>>& proj_gens, const std::vector<F>& p,
                             int kmax, const F& like) {
  return local_g_origin(affine_chart_at(proj_gens, p, like), kmax, like);
}

struct MultiplicityResult {
  bool ok = false;
  long mu = 0;
  int r_local = 0;
  int stable_from = -1;  // first index of the stable difference window
  std::vector<long> g;
  std::string note;
};

// Multiplicity of the local ring at p: the stable value of the (r-1)-st
// finite difference of g. Requires stability over the trailing
// max(3, r+1) window. For a hypersurface the result is cross-checked against
// the vanishing order of the defining form; disagreement throws.
template <class F>
MultiplicityResult multiplicity_at(const std::vector<Poly<F>>& proj_gens,
                                   const std::vector<F>& p, int r_local, int kmax,
                                   const F& like) {
  MultiplicityResult out;
  out.r_local = r_local;
  if (r_local < 1) {
    out.note = "local dimension must be at least 1";
    return out;
  }
  auto chart = affine_chart_at(proj_gens, p, like);
  out.g = local_g_origin(chart, kmax, like);
  std::vector<long> diff = out.g;
  for (int i = 1; i < r_local; ++i) {
    std::vector<long> next;
    for (size_t j = 1; j < diff.size(); ++j) next.push_back(diff[j] - diff[j - 1]);
    diff = std::move(next);
  }
  int window = std::max(3, r_local + 1);
  if ((int)diff.size() < window + 1) {
    out.note = "not enough computed values for the stability window";
    return out;
  }
  long tail = diff.back();
  for (int i = (int)diff.size() - window; i < (int)diff.size(); ++i)
    if (diff[i] != tail) {
      out.note = "difference sequence not stable; raise the degree cap";
      return out;
    }
  out.ok = true;
  out.mu = tail;
  out.stable_from = (int)diff.size() - window;
  if (proj_gens.size() == 1) {
    std::vector<F> origin(chart[0].nvars, RingOps<F>::zero(like));
    int ord = order_of_vanishing(chart[0], origin);
    if (ord != (int)out.mu)
      throw std::logic_error("multiplicity disagrees with the vanishing order");
  }
  return out;
}

}  // namespace detcount
