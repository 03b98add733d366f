#include "detcount/groebner.hpp"

#include <stdexcept>

namespace detcount {

std::vector<Poly<mpq_class>> eliminate(const std::vector<Poly<mpq_class>>& gens, int nvars,
                                       const std::vector<int>& drop, int cap_degree,
                                       bool* capped) {
  std::vector<bool> dropped(nvars, false);
  for (int v : drop) {
    if (v < 0 || v >= nvars) throw std::invalid_argument("eliminate: variable out of range");
    dropped[v] = true;
  }
  // permutation: dropped variables first, kept afterwards in original order
  std::vector<int> perm;  // perm[new] = old
  for (int v = 0; v < nvars; ++v)
    if (dropped[v]) perm.push_back(v);
  int ndrop = (int)perm.size();
  for (int v = 0; v < nvars; ++v)
    if (!dropped[v]) perm.push_back(v);
  std::vector<int> inv(nvars);
  for (int i = 0; i < nvars; ++i) inv[perm[i]] = i;

  std::vector<Poly<mpq_class>> permuted;
  for (const auto& g : gens) {
    Poly<mpq_class> h{nvars, g.vk, {}};
    for (const auto& tm : g.t) {
      std::vector<int32_t> e(nvars, 0);
      for (int v = 0; v < nvars; ++v) e[inv[v]] = tm.first.e[v];
      h.t.push_back({mon_make(std::move(e)), tm.second});
    }
    poly_normalize(h);
    permuted.push_back(std::move(h));
  }

  TermOrder elim{OrderKind::Elim, ndrop};
  GroebnerBasis<mpq_class> gb = buchberger(std::move(permuted), elim, cap_degree);
  if (capped) *capped = gb.capped;

  int nkeep = nvars - ndrop;
  std::vector<Poly<mpq_class>> out;
  for (const auto& g : gb.gens) {
    bool uses_dropped = false;
    for (const auto& tm : g.t)
      for (int i = 0; i < ndrop && !uses_dropped; ++i)
        if (tm.first.e[i]) uses_dropped = true;
    if (uses_dropped) continue;
    Poly<mpq_class> h{nkeep, g.vk, {}};
    for (const auto& tm : g.t) {
      std::vector<int32_t> e(nkeep, 0);
      for (int i = 0; i < nkeep; ++i) e[i] = tm.first.e[ndrop + i];
      h.t.push_back({mon_make(std::move(e)), tm.second});
    }
    poly_normalize(h);
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace detcount
