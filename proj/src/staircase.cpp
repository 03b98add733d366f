#include "detcount/staircase.hpp"

namespace detcount {

namespace {

// Dense polynomial over Q in one variable, constant term first.
std::vector<mpq_class> newton_to_dense(const std::vector<mpq_class>& dd,
                                       const std::vector<long>& xs) {
  std::vector<mpq_class> poly{mpq_class(0)};
  std::vector<mpq_class> basis{mpq_class(1)};
  for (size_t i = 0; i < dd.size(); ++i) {
    if (poly.size() < basis.size()) poly.resize(basis.size(), 0);
    for (size_t j = 0; j < basis.size(); ++j) poly[j] += dd[i] * basis[j];
    if (i + 1 < dd.size()) {
      // basis *= (t - xs[i])
      std::vector<mpq_class> nb(basis.size() + 1, 0);
      for (size_t j = 0; j < basis.size(); ++j) {
        nb[j + 1] += basis[j];
        nb[j] -= basis[j] * xs[i];
      }
      basis = std::move(nb);
    }
  }
  while (poly.size() > 1 && poly.back() == 0) poly.pop_back();
  return poly;
}

mpq_class eval_dense(const std::vector<mpq_class>& c, long k) {
  mpq_class acc = 0;
  for (size_t i = c.size(); i-- > 0;) acc = acc * k + c[i];
  return acc;
}

}  // namespace

HilbertFit fit_eventually_polynomial(const std::vector<long>& h, int max_degree) {
  HilbertFit fit;
  fit.h = h;
  int K = (int)h.size() - 1;
  if (K < 2) {
    fit.note = "sequence too short";
    return fit;
  }
  if (h[K] == 0 && h[K - 1] == 0 && h[K - 2] == 0) {
    int k0 = K;
    while (k0 > 0 && h[k0 - 1] == 0) --k0;
    fit.ok = true;
    fit.r = -1;
    fit.d = 0;
    fit.k_stab = k0;
    fit.coeffs = {mpq_class(0)};
    return fit;
  }
  for (int r = 0; r <= max_degree; ++r) {
    if (K - r < 0) break;
    int k0fit = K - r;
    std::vector<long> xs;
    for (int i = 0; i <= r; ++i) xs.push_back(k0fit + i);
    // divided differences over the trailing r+1 points
    std::vector<mpq_class> dd;
    for (int i = 0; i <= r; ++i) dd.push_back(h[xs[i]]);
    for (int lvl = 1; lvl <= r; ++lvl)
      for (int i = r; i >= lvl; --i)
        dd[i] = (dd[i] - dd[i - 1]) / mpq_class(xs[i] - xs[i - lvl]);
    std::vector<mpq_class> dense = newton_to_dense(dd, xs);
    int k0 = K + 1;
    for (int k = K; k >= 0; --k) {
      if (eval_dense(dense, k) == h[k])
        k0 = k;
      else
        break;
    }
    if (K - k0 + 1 >= r + 3) {
      fit.ok = true;
      fit.r = (int)dense.size() - 1;
      fit.coeffs = dense;
      fit.k_stab = k0;
      mpq_class lead = dense.back();
      mpz_class fact = 1;
      for (int i = 2; i <= fit.r; ++i) fact *= i;
      fit.d = lead * fact;
      fit.d.canonicalize();
      return fit;
    }
  }
  fit.note = "no stabilized polynomial tail within the computed range";
  return fit;
}

mpq_class eval_fit(const HilbertFit& fit, long k) { return eval_dense(fit.coeffs, k); }

}  // namespace detcount
