#include "detcount/zmodel.hpp"

namespace detcount {

IntegralModel make_model(const std::vector<Poly<mpq_class>>& gens) {
  IntegralModel m;
  std::vector<Poly<mpq_class>> live;
  for (const auto& g : gens) {
    if (g.t.empty()) continue;
    if (g.vk != VarKind::Projective)
      throw std::invalid_argument("model generators must use projective variables");
    if (!poly_is_homogeneous(g))
      throw std::invalid_argument("model generators must be homogeneous");
    live.push_back(g);
  }
  if (live.empty()) throw std::invalid_argument("model needs at least one nonzero form");
  m.nvars = live[0].nvars;
  for (const auto& g : live) {
    if (g.nvars != m.nvars) throw std::invalid_argument("mixed ambient dimensions");
    m.gens.push_back(poly_q_to_z_primitive(g));
  }
  std::string joined;
  for (const auto& g : m.gens) {
    joined += poly_to_string(g);
    joined += '|';
  }
  m.hash = poly_hash(joined);
  auto gb = buchberger<mpq_class>(live, TermOrder{OrderKind::GRevLex, 0});
  m.fit = hilbert_fit(gb);
  if (!m.fit.ok) throw std::runtime_error("Hilbert data did not stabilize: " + m.fit.note);
  m.r = m.fit.r;
  mpq_class d = m.fit.d;
  if (d.get_den() != 1) throw std::runtime_error("non-integral degree from the Hilbert fit");
  m.d = (long)d.get_num().get_si();
  return m;
}

std::vector<Poly<Fp>> reduce_model(const IntegralModel& m, uint64_t p) {
  std::vector<Poly<Fp>> out;
  for (const auto& g : m.gens) out.push_back(poly_reduce_p(g, p));
  return out;
}

std::vector<Poly<Fq>> reduce_model_fq(const IntegralModel& m, const FqCtx* k) {
  std::vector<Poly<Fq>> out;
  for (const auto& g : m.gens) out.push_back(poly_fp_to_fq(poly_reduce_p(g, k->p), k));
  return out;
}

std::optional<std::vector<Fq>> specialize_point(const IntPoint& pt, const FqCtx* k) {
  std::vector<Fq> c;
  int lead = -1;
  mpz_class p((unsigned long)k->p);
  for (size_t i = 0; i < pt.x.size(); ++i) {
    mpz_class rem = pt.x[i] % p;
    if (rem < 0) rem += p;
    Fp a = fp_make(k->p, (long long)rem.get_ui());
    c.push_back(fq_embed(k, a));
    if (lead < 0 && !fq_is_zero(c.back())) lead = (int)i;
  }
  if (lead < 0) return std::nullopt;
  Fq inv = fq_inv(c[lead]);
  for (auto& a : c) a = a * inv;
  return c;
}

PointScan points_on_reduction(const std::vector<Poly<Fq>>& gens, const FqCtx* k,
                              bool x0_nonzero, uint64_t scan_cap) {
  PointScan out;
  if (gens.empty()) throw std::invalid_argument("points_on_reduction: no generators");
  int nv = gens[0].nvars;
  uint64_t q = 1;
  for (int i = 0; i < k->e; ++i) {
    if (q > (uint64_t)1 << 40) throw std::overflow_error("field too large to scan");
    q *= k->p;
  }
  int lead_max = x0_nonzero ? 0 : nv - 1;
  for (int lead = 0; lead <= lead_max; ++lead) {
    int free_vars = nv - 1 - lead;
    std::vector<uint64_t> idx(free_vars, 0);
    bool done = false;
    while (!done) {
      if (out.scanned >= scan_cap) {
        out.capped = true;
        return out;
      }
      ++out.scanned;
      std::vector<Fq> pt;
      for (int i = 0; i < lead; ++i) pt.push_back(fq_zero(k));
      pt.push_back(fq_one(k));
      for (int i = 0; i < free_vars; ++i) pt.push_back(fq_from_index(k, idx[i]));
      bool on = true;
      for (const auto& g : gens)
        if (!fq_is_zero(poly_evaluate(g, pt))) {
          on = false;
          break;
        }
      if (on) out.points.push_back(std::move(pt));
      // increment little-endian counter
      done = true;
      for (int i = 0; i < free_vars; ++i) {
        if (++idx[i] < q) {
          done = false;
          break;
        }
        idx[i] = 0;
      }
    }
  }
  return out;
}

}  // namespace detcount
