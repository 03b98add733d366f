#include "detcount/detmethod.hpp"

#include <algorithm>
#include <stdexcept>

namespace detcount {

namespace {

GroebnerBasis<mpq_class> model_basis(const IntegralModel& m) {
  std::vector<Poly<mpq_class>> q;
  q.reserve(m.gens.size());
  for (const auto& g : m.gens) q.push_back(poly_z_to_q(g));
  return buchberger(q, TermOrder{OrderKind::GRevLex, 0});
}

// Primitive integer vector with positive first nonzero entry.
std::vector<mpz_class> primitive_vector(const std::vector<mpq_class>& v) {
  mpz_class den = 1;
  for (const auto& c : v) den = lcm(den, mpz_class(c.get_den()));
  std::vector<mpz_class> z;
  z.reserve(v.size());
  mpz_class content = 0;
  for (const auto& c : v) {
    mpz_class t = mpz_class(c.get_num()) * (den / c.get_den());
    content = gcd(content, t);
    z.push_back(std::move(t));
  }
  if (content > 1)
    for (auto& t : z) t /= content;
  for (const auto& t : z) {
    if (t == 0) continue;
    if (t < 0)
      for (auto& u : z) u = -u;
    break;
  }
  return z;
}

// Multiplicity of the reduced model at a point, with a smooth-point fast path:
// a Jacobian of rank equal to the codimension certifies a regular local ring.
long class_multiplicity(const IntegralModel& m, const std::vector<Poly<Fq>>& gens_fq,
                        const std::vector<Fq>& rep_fq, const FqCtx* ctx, bool* stable) {
  Fq like = fq_zero(ctx);
  Mat<Fq> jac((int)gens_fq.size(), m.nvars, like);
  for (int i = 0; i < (int)gens_fq.size(); ++i)
    for (int j = 0; j < m.nvars; ++j)
      jac.at(i, j) = poly_evaluate(poly_derivative(gens_fq[i], j), rep_fq);
  if (matrix_rank(std::move(jac), like) == (long)(m.nvars - 1 - m.r)) {
    if (stable) *stable = true;
    return 1;
  }
  auto mres = multiplicity_at(gens_fq, rep_fq, m.r, std::max(10, m.r + 8), like);
  if (stable) *stable = mres.ok;
  return mres.ok ? mres.mu : 0;
}

std::string predictor_str(int r, long mu, int s) {
  if (r < 1 || s < 1) return "";
  mpz_class rfac = 1;
  for (int i = 2; i <= r; ++i) rfac *= i;
  long mu_use = mu >= 1 ? mu : 1;
  mpq_class ratio(rfac, mu_use);
  ratio.canonicalize();
  BigFloat pred = BigFloat::pow(BigFloat(ratio), BigFloat(mpq_class(1, r))) *
                  BigFloat(mpq_class(r, r + 1)) *
                  BigFloat::pow(BigFloat(mpz_class(s)), BigFloat(mpq_class(r + 1, r)));
  return pred.str(10);
}

}  // namespace

int select_degree(const GroebnerBasis<mpq_class>& gb, int s, int k_cap) {
  if (s < 1) throw std::invalid_argument("select_degree needs s >= 1");
  for (int k = 1; k <= k_cap; ++k)
    if (hilbert_function(gb, k) >= s) return k;
  throw std::runtime_error("no degree within the cap carries enough standard monomials");
}

mpz_class eval_monomial(const Monomial& m, const IntPoint& pt) {
  mpz_class out = 1;
  for (size_t i = 0; i < m.e.size(); ++i) {
    if (m.e[i] == 0) continue;
    mpz_class pw;
    mpz_pow_ui(pw.get_mpz_t(), pt.x[i].get_mpz_t(), (unsigned long)m.e[i]);
    out *= pw;
  }
  return out;
}

EvalMatrix build_eval_matrix(const std::vector<IntPoint>& points,
                             const std::vector<Monomial>& monomials) {
  EvalMatrix em;
  em.points = points;
  em.monomials = monomials;
  em.entries = Mat<mpz_class>((int)points.size(), (int)monomials.size(), mpz_class(0));
  for (int i = 0; i < em.entries.rows; ++i)
    for (int j = 0; j < em.entries.cols; ++j)
      em.entries.at(i, j) = eval_monomial(monomials[j], points[i]);
  return em;
}

std::vector<Monomial> smallest_standard_monomials(const GroebnerBasis<mpq_class>& gb, int k,
                                                  int s) {
  std::vector<Monomial> mons = standard_monomials(gb, k);
  if ((int)mons.size() < s)
    throw std::invalid_argument("staircase carries fewer monomials than requested");
  std::sort(mons.begin(), mons.end(),
            [&](const Monomial& a, const Monomial& b) { return mon_less(a, b, gb.order); });
  mons.resize(s);
  return mons;
}

DetValuation det_valuation(const Mat<mpz_class>& m, const mpz_class& p) {
  if (m.rows != m.cols) throw std::invalid_argument("determinant of a non-square matrix");
  DetValuation out;
  out.det = bareiss_det(m);
  auto v = padic_valuation(out.det, p);
  if (!v) {
    out.infinite = true;
  } else {
    out.v = *v;
  }
  return out;
}

long lambda_bound(const std::vector<long>& g, int s, std::vector<int>* n_out) {
  if (s < 0) throw std::invalid_argument("lambda_bound needs s >= 0");
  if (n_out) n_out->clear();
  long lambda = 0;
  int taken = 0;
  for (size_t j = 0; j < g.size() && taken < s; ++j) {
    if (g[j] < 0) throw std::invalid_argument("negative growth value");
    for (long c = 0; c < g[j] && taken < s; ++c) {
      lambda += (long)j;
      if (n_out) n_out->push_back((int)j);
      ++taken;
    }
  }
  if (taken < s)
    throw std::invalid_argument("growth sequence too short for the requested length");
  return lambda;
}

DivisibilityCertificate verify_divisibility(const IntegralModel& m, uint64_t p,
                                            const std::vector<uint64_t>& class_rep,
                                            const std::vector<IntPoint>& points,
                                            const std::vector<Monomial>* monomials) {
  if (points.empty()) throw std::invalid_argument("divisibility certificate needs points");
  if ((int)class_rep.size() != m.nvars)
    throw std::invalid_argument("class representative has the wrong dimension");
  const FqCtx* ctx = fq_context(p, 1);
  IntPoint rep_pt;
  for (uint64_t c : class_rep) rep_pt.x.emplace_back((unsigned long)c);
  auto rep_fq = specialize_point(rep_pt, ctx);
  if (!rep_fq) throw std::invalid_argument("class representative vanishes mod p");

  for (const auto& pt : points) {
    if ((int)pt.x.size() != m.nvars)
      throw std::invalid_argument("point has the wrong dimension");
    if (!is_primitive(pt)) throw std::invalid_argument("points must be primitive");
    for (const auto& g : m.gens)
      if (evaluate_at_point(g, pt) != 0)
        throw std::invalid_argument("point does not lie on the model");
    auto sp = specialize_point(pt, ctx);
    if (!sp || !(*sp == *rep_fq))
      throw std::invalid_argument("point does not specialize to the class representative");
  }

  DivisibilityCertificate cert;
  cert.model_hash = m.hash;
  cert.p = mpz_class((unsigned long)p);
  for (const auto& c : *rep_fq) cert.class_point.push_back(fq_index(c));
  int s = (int)points.size();
  cert.s = s;

  auto gb = model_basis(m);
  std::vector<Monomial> mons;
  if (monomials) {
    if ((int)monomials->size() != s)
      throw std::invalid_argument("evaluation matrix must be square");
    mons = *monomials;
    cert.k = mons.empty() ? 0 : mons[0].deg;
    for (const auto& mo : mons)
      if (mo.deg != cert.k) throw std::invalid_argument("monomials must share one degree");
  } else {
    cert.k = select_degree(gb, s);
    mons = smallest_standard_monomials(gb, cert.k, s);
  }

  EvalMatrix em = build_eval_matrix(points, mons);
  DetValuation dv = det_valuation(em.entries, cert.p);
  cert.det = dv.det;
  cert.det_zero = dv.infinite;
  cert.valuation = dv.v;

  auto gens_fq = reduce_model_fq(m, ctx);
  Fq like = fq_zero(ctx);
  int kmax = std::max(8, s + 2);
  std::vector<long> g;
  for (;;) {
    g = local_g_at(gens_fq, *rep_fq, kmax, like);
    long total = 0;
    for (long x : g) total += x;
    if (total >= s || g.back() == 0 || kmax > 4 * s + 64) break;
    kmax *= 2;
  }
  cert.g = g;
  cert.lambda = lambda_bound(g, s, &cert.n_seq);
  if (m.r >= 1) {
    bool stable = false;
    cert.mu = class_multiplicity(m, gens_fq, *rep_fq, ctx, &stable);
    cert.mu_stable = stable;
  }
  cert.ok = cert.det_zero || cert.valuation >= cert.lambda;
  cert.predictor = predictor_str(m.r, cert.mu, s);
  return cert;
}

ConditionResult condition_check(const std::vector<std::pair<mpz_class, long>>& primes_mu,
                                const std::vector<mpz_class>& bounds,
                                const std::vector<mpq_class>& abundances, int r, long d,
                                const mpq_class& eps) {
  if (r < 1) throw std::invalid_argument("condition check needs dimension r >= 1");
  if (d < 1) throw std::invalid_argument("condition check needs degree d >= 1");
  if (bounds.size() != abundances.size())
    throw std::invalid_argument("one abundance per bound is required");
  if (eps < 0) throw std::invalid_argument("epsilon must be nonnegative");

  BigFloat lhs;
  for (const auto& [p, mu] : primes_mu) {
    if (p < 2 || mu < 1) throw std::invalid_argument("invalid prime or multiplicity");
    mpq_class ratio(d, mu);
    ratio.canonicalize();
    BigFloat expo = BigFloat::pow(BigFloat(ratio), BigFloat(mpq_class(1, r)));
    lhs = lhs + expo * BigFloat::log_of(BigFloat(p));
  }
  BigFloat weighted, plain;
  for (size_t i = 0; i < bounds.size(); ++i) {
    if (bounds[i] < 1) throw std::invalid_argument("bounds must be at least 1");
    BigFloat lg = BigFloat::log_of(BigFloat(bounds[i]));
    weighted = weighted + BigFloat(abundances[i]) * lg;
    plain = plain + lg;
  }
  BigFloat rhs = BigFloat(mpq_class(r + 1, r)) * weighted + BigFloat(eps) * plain;
  BigFloat margin = lhs - rhs;
  ConditionResult out;
  out.ok = margin.is_nonneg();
  out.margin = margin.to_double();
  out.margin_str = margin.str(12);
  return out;
}

namespace {

// Normalized per-coordinate class indices for a representative that stays
// nonzero mod p; throws when the point collapses or the shape is wrong.
std::vector<uint64_t> class_indices(const IntegralModel& m, uint64_t p,
                                    const std::vector<uint64_t>& class_rep) {
  if ((int)class_rep.size() != m.nvars)
    throw std::invalid_argument("class representative has the wrong dimension");
  if (p < 2) throw std::invalid_argument("a congruence class needs a prime");
  const FqCtx* ctx = fq_context(p, 1);
  IntPoint rep_pt;
  for (uint64_t c : class_rep) rep_pt.x.emplace_back((unsigned long)c);
  auto rep_fq = specialize_point(rep_pt, ctx);
  if (!rep_fq) throw std::invalid_argument("class representative vanishes mod p");
  std::vector<uint64_t> out;
  out.reserve(rep_fq->size());
  for (const auto& c : *rep_fq) out.push_back(fq_index(c));
  return out;
}

}  // namespace

AuxFormCertificate aux_form_for_points(const IntegralModel& m, long B, uint64_t p,
                                       const std::vector<uint64_t>& class_rep,
                                       const std::vector<IntPoint>& points, int k_cap,
                                       const mpq_class& eps) {
  if (B < 1) throw std::invalid_argument("height bound must be positive");
  bool use_class = !class_rep.empty();

  AuxFormCertificate cert;
  cert.model_hash = m.hash;
  cert.B = B;
  cert.eps = mpq_class(eps).get_str();
  cert.p = use_class ? mpz_class((unsigned long)p) : mpz_class(0);
  if (use_class) cert.class_point = class_indices(m, p, class_rep);

  int s = (int)points.size();
  cert.s = s;

  auto gb = model_basis(m);

  if (s == 0) {
    // Designated certificate for an empty class: the smallest standard
    // monomial is nonzero in the quotient and vanishes on every listed point
    // vacuously.
    cert.empty_class = true;
    for (int k = 1; k <= k_cap; ++k) {
      auto mons = standard_monomials(gb, k);
      if (mons.empty()) continue;
      std::sort(mons.begin(), mons.end(), [&](const Monomial& a, const Monomial& b) {
        return mon_less(a, b, gb.order);
      });
      cert.k = k;
      cert.G = Poly<mpz_class>{m.nvars, VarKind::Projective, {{mons[0], mpz_class(1)}}};
      break;
    }
    if (cert.G.t.empty()) throw std::runtime_error("staircase is empty up to the degree cap");
    cert.rank = 0;
    cert.nf_nonzero = true;
    cert.vanishes_on_points = true;
    return cert;
  }

  bool found = false;
  for (int k = 1; k <= k_cap && !found; ++k) {
    auto mons = standard_monomials(gb, k);
    if (mons.empty()) continue;
    std::sort(mons.begin(), mons.end(),
              [&](const Monomial& a, const Monomial& b) { return mon_less(a, b, gb.order); });
    long hk = (long)mons.size();
    EvalMatrix em = build_eval_matrix(points, mons);
    Mat<mpq_class> mq(em.entries.rows, em.entries.cols, mpq_class(0));
    for (int i = 0; i < mq.rows; ++i)
      for (int j = 0; j < mq.cols; ++j) mq.at(i, j) = mpq_class(em.entries.at(i, j));
    auto kb = kernel_basis(std::move(mq), mpq_class(0));
    if (kb.empty()) continue;
    cert.k = k;
    cert.rank = hk - (long)kb.size();
    std::vector<std::vector<mpz_class>> cands;
    cands.reserve(kb.size());
    for (const auto& v : kb) cands.push_back(primitive_vector(v));
    const std::vector<mpz_class>& best = *std::min_element(
        cands.begin(), cands.end(), [](const auto& a, const auto& b) {
          return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
        });
    Poly<mpz_class> G{m.nvars, VarKind::Projective, {}};
    for (long j = 0; j < hk; ++j)
      if (best[j] != 0) G.t.push_back({mons[j], best[j]});
    poly_normalize(G);
    cert.G = G;
    found = true;
  }
  if (!found)
    throw std::runtime_error("degree cap reached before the evaluation matrix lost rank");

  // Standard monomials are independent in the quotient, so a nonzero kernel
  // vector can never reduce to zero; treat a failure as an internal fault.
  auto nf = normal_form(poly_z_to_q(cert.G), gb);
  cert.nf_nonzero = !nf.t.empty();
  if (!cert.nf_nonzero) throw std::logic_error("kernel form reduced to zero against the basis");
  for (const auto& pt : points)
    if (evaluate_at_point(cert.G, pt) != 0)
      throw std::logic_error("kernel form fails to vanish on a supplied point");
  cert.vanishes_on_points = true;

  if (use_class) {
    const FqCtx* ctx = fq_context(p, 1);
    std::vector<Fq> rep_fq;
    rep_fq.reserve(cert.class_point.size());
    for (uint64_t idx : cert.class_point) rep_fq.push_back(fq_from_index(ctx, idx));
    auto gens_fq = reduce_model_fq(m, ctx);
    if (m.r >= 1) cert.mu = class_multiplicity(m, gens_fq, rep_fq, ctx, nullptr);
  }

  if (m.r >= 1 && m.d >= 1) {
    std::vector<std::pair<mpz_class, long>> primes_mu;
    if (use_class) primes_mu.push_back({cert.p, cert.mu >= 1 ? cert.mu : 1});
    std::vector<mpz_class> bounds(m.nvars, mpz_class(B));
    bounds[0] = 1;
    auto shares = variable_shares(gb, std::max(8, 3 * (int)m.d + 4));
    ConditionResult cond = condition_check(primes_mu, bounds, shares.a, m.r, m.d, eps);
    cert.condition_ok = cond.ok;
    cert.condition_margin = cond.margin_str;
  } else {
    cert.condition_margin = "not computed";
  }
  return cert;
}

AuxFormCertificate aux_form(const IntegralModel& m, long B, uint64_t p,
                            const std::vector<uint64_t>& class_rep, int k_cap,
                            const mpq_class& eps, const EnumOptions* enum_opts) {
  if (B < 1) throw std::invalid_argument("height bound must be positive");
  EnumOptions opt;
  if (enum_opts) opt = *enum_opts;
  opt.B = B;
  if (!class_rep.empty()) {
    opt.p = p;
    opt.class_rep = class_indices(m, p, class_rep);
  } else {
    opt.p = 0;
    opt.class_rep.clear();
  }
  EnumResult res = projective_points(m.gens, opt);
  return aux_form_for_points(m, B, p, class_rep, res.points, k_cap, eps);
}

std::vector<mpz_class> prime_window(const BigFloat& threshold, int count) {
  if (count < 0) throw std::invalid_argument("prime count must be nonnegative");
  mpz_class start = threshold.ceil_z();
  if (start < 2) start = 2;
  mpz_class p = start - 1;
  std::vector<mpz_class> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
    out.push_back(p);
  }
  return out;
}

}  // namespace detcount
