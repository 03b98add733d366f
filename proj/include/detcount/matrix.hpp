#pragma once

#include <gmpxx.h>

#include <cassert>
#include <optional>
#include <vector>

#include "detcount/rings.hpp"

namespace detcount {

template <class F>
struct Mat {
  int rows = 0, cols = 0;
  std::vector<F> a;

  Mat() = default;
  Mat(int r, int c, const F& fill) : rows(r), cols(c), a((size_t)r * c, fill) {}
  F& at(int i, int j) { return a[(size_t)i * cols + j]; }
  const F& at(int i, int j) const { return a[(size_t)i * cols + j]; }
};

// In-place reduced row echelon form over a field. Pivots chosen as the first
// nonzero entry per column, scanning columns left to right: deterministic.
// Returns the pivot columns (their count is the rank).
template <class F>
std::vector<int> rref(Mat<F>& m, const F& like) {
  static_assert(RingOps<F>::is_field);
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    int sel = -1;
    for (int i = r; i < m.rows; ++i)
      if (!RingOps<F>::is_zero(m.at(i, c))) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    if (sel != r)
      for (int j = 0; j < m.cols; ++j) std::swap(m.at(sel, j), m.at(r, j));
    F inv = RingOps<F>::inv(m.at(r, c));
    for (int j = c; j < m.cols; ++j) m.at(r, j) = m.at(r, j) * inv;
    for (int i = 0; i < m.rows; ++i) {
      if (i == r || RingOps<F>::is_zero(m.at(i, c))) continue;
      F f = m.at(i, c);
      for (int j = c; j < m.cols; ++j) m.at(i, j) = m.at(i, j) - f * m.at(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  (void)like;
  return pivots;
}

template <class F>
int matrix_rank(Mat<F> m, const F& like) {
  return (int)rref(m, like).size();
}

// Kernel basis from the RREF: one vector per free column, with a 1 in that
// column. Vectors come out in free-column order, the canonical reduced
// echelon kernel basis.
template <class F>
std::vector<std::vector<F>> kernel_basis(Mat<F> m, const F& like) {
  std::vector<int> piv = rref(m, like);
  std::vector<bool> is_piv(m.cols, false);
  for (int c : piv) is_piv[c] = true;
  F zero = RingOps<F>::zero(like);
  F one = RingOps<F>::one(like);
  std::vector<std::vector<F>> out;
  for (int f = 0; f < m.cols; ++f) {
    if (is_piv[f]) continue;
    std::vector<F> v(m.cols, zero);
    v[f] = one;
    for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = zero - m.at((int)r, f);
    out.push_back(std::move(v));
  }
  return out;
}

// Fraction-free Bareiss determinant; exact over Z.
inline mpz_class bareiss_det(Mat<mpz_class> m) {
  assert(m.rows == m.cols);
  int n = m.rows;
  if (n == 0) return 1;
  mpz_class prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m.at(k, k) == 0) {
      int sel = -1;
      for (int i = k + 1; i < n; ++i)
        if (m.at(i, k) != 0) {
          sel = i;
          break;
        }
      if (sel < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(m.at(sel, j), m.at(k, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        mpz_class num = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
        mpz_divexact(m.at(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
      m.at(i, k) = 0;
    }
    prev = m.at(k, k);
  }
  return sign > 0 ? m.at(n - 1, n - 1) : mpz_class(-m.at(n - 1, n - 1));
}

// p-adic valuation; nullopt encodes v_p(0) = infinity.
inline std::optional<long> padic_valuation(const mpz_class& x, const mpz_class& p) {
  if (x == 0) return std::nullopt;
  mpz_class t = x;
  long v = 0;
  while (mpz_divisible_p(t.get_mpz_t(), p.get_mpz_t())) {
    mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), p.get_mpz_t());
    ++v;
  }
  return v;
}

// Rank over Q of an integer matrix, via exact rational elimination.
inline int integer_matrix_rank_q(const Mat<mpz_class>& m) {
  Mat<mpq_class> q(m.rows, m.cols, mpq_class(0));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) q.at(i, j) = mpq_class(m.at(i, j));
  return matrix_rank(std::move(q), mpq_class(0));
}

}  // namespace detcount
