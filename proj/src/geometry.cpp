#include "detcount/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "detcount/groebner.hpp"
#include "detcount/matrix.hpp"
#include "detcount/staircase.hpp"

namespace detcount {

namespace {

// Work caps for the exhaustive parts. Existence answers never depend on
// them; only listings and counts do, and a note records any truncation.
constexpr uint64_t kScanPointCap = uint64_t(1) << 22;
constexpr uint64_t kLineScanCap = uint64_t(1) << 26;

uint64_t form_prime(const Poly<Fp>& F) {
  if (F.t.empty()) throw std::invalid_argument("zero form has no ambient prime");
  return F.t.front().second.p;
}

std::vector<Fp> fp_point(const std::vector<uint64_t>& P, uint64_t p) {
  if (P.size() != 4) throw std::invalid_argument("points in P^3 need four coordinates");
  std::vector<Fp> out;
  bool nz = false;
  for (uint64_t c : P) {
    out.push_back(fp_make(p, (long long)(c % p)));
    nz = nz || out.back().v != 0;
  }
  if (!nz) throw std::invalid_argument("point reduces to zero mod p");
  return out;
}

template <class R>
void require_on_surface(const Poly<R>& F, const std::vector<R>& P) {
  if (!RingOps<R>::is_zero(poly_evaluate(F, P)))
    throw std::invalid_argument("point is not on the surface");
}

template <class R>
std::vector<R> gradient_at(const Poly<R>& F, const std::vector<R>& P) {
  std::vector<R> g;
  for (int i = 0; i < F.nvars; ++i) g.push_back(poly_evaluate(poly_derivative(F, i), P));
  return g;
}

template <class R>
bool all_zero(const std::vector<R>& v) {
  for (const auto& c : v)
    if (!RingOps<R>::is_zero(c)) return false;
  return true;
}

template <class R>
Mat<R> rows_to_mat(const std::vector<std::vector<R>>& rows, const R& like) {
  int n = rows.empty() ? 0 : (int)rows[0].size();
  Mat<R> m((int)rows.size(), n, RingOps<R>::zero(like));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < n; ++j) m.at(i, j) = rows[i][j];
  return m;
}

template <class R>
int rows_rank(const std::vector<std::vector<R>>& rows, const R& like) {
  return matrix_rank(rows_to_mat(rows, like), like);
}

// Standard vectors extending the given independent rows to a basis.
template <class R>
std::vector<std::vector<R>> extend_basis(std::vector<std::vector<R>> rows, const R& like) {
  int n = rows.empty() ? 0 : (int)rows[0].size();
  int r = rows_rank(rows, like);
  std::vector<std::vector<R>> added;
  for (int i = 0; i < n && (int)rows.size() < n; ++i) {
    std::vector<R> ei(n, RingOps<R>::zero(like));
    ei[i] = RingOps<R>::one(like);
    rows.push_back(ei);
    int r2 = rows_rank(rows, like);
    if (r2 > r) {
      added.push_back(ei);
      r = r2;
    } else {
      rows.pop_back();
    }
  }
  return added;
}

// Two vectors spanning, together with P, the kernel of the gradient row at
// a nonsingular point. P itself lies in that kernel (differentiate the
// degree-d scaling identity and evaluate: the gradient pairs with P to
// d*F(P) = 0), so the kernel is the tangent plane through P.
template <class R>
std::vector<std::vector<R>> tangent_complement(const Poly<R>& F, const std::vector<R>& P,
                                               const R& like) {
  std::vector<R> grad = gradient_at(F, P);
  if (all_zero(grad)) throw std::invalid_argument("singular point has no tangent plane");
  Mat<R> row(1, (int)grad.size(), RingOps<R>::zero(like));
  for (int j = 0; j < row.cols; ++j) row.at(0, j) = grad[j];
  auto ker = kernel_basis(row, like);
  std::vector<std::vector<R>> rows{P};
  std::vector<std::vector<R>> w;
  int r = 1;
  for (auto& k : ker) {
    rows.push_back(k);
    if (rows_rank(rows, like) > r) {
      w.push_back(k);
      ++r;
    } else {
      rows.pop_back();
    }
    if (r == 3) break;
  }
  if (r != 3) throw std::logic_error("tangent frame failed to close");
  return w;
}

// Coefficient forms of F(s*P + t*(v_1 B_1 + ... + v_k B_k)) as a binary
// form in (s, t): entry j is homogeneous of degree j in (v_1..v_k) and
// multiplies s^(d-j) t^j. Entry 0 vanishes when P is on the surface.
template <class R>
std::vector<Poly<R>> cone_forms(const Poly<R>& F, const std::vector<R>& P,
                                const std::vector<std::vector<R>>& B, const R& like) {
  int k = (int)B.size();
  int nv = 2 + k;
  R one = RingOps<R>::one(like);
  std::vector<Poly<R>> args;
  for (int i = 0; i < F.nvars; ++i) {
    Poly<R> a = poly_scale(poly_var(nv, VarKind::Projective, 0, one), P[i]);
    Poly<R> dir = poly_zero<R>(nv, VarKind::Projective);
    for (int m = 0; m < k; ++m)
      dir = poly_add(dir, poly_scale(poly_var(nv, VarKind::Projective, 2 + m, one), B[m][i]));
    args.push_back(poly_add(a, poly_mul(poly_var(nv, VarKind::Projective, 1, one), dir)));
  }
  auto comp = poly_compose(F, args);
  int d = poly_degree(F);
  std::vector<Poly<R>> h((size_t)d + 1, poly_zero<R>(k, VarKind::Projective));
  for (auto& tm : comp.t) {
    int j = tm.first.e[1];
    std::vector<int32_t> e(tm.first.e.begin() + 2, tm.first.e.end());
    h[j].t.push_back({mon_make(e), tm.second});
  }
  for (auto& hh : h) poly_normalize(hh);
  return h;
}

// Binary form h(alpha, beta) = beta^bv * homogenization of u(alpha).
// Returns {-1, {}} for the zero form.
template <class R>
std::pair<int, std::vector<R>> binary_split(const Poly<R>& h, const R& like) {
  if (h.t.empty()) return {-1, {}};
  int n = poly_degree(h);
  int amax = 0;
  for (auto& tm : h.t) amax = std::max(amax, (int)tm.first.e[0]);
  std::vector<R> u((size_t)amax + 1, RingOps<R>::zero(like));
  for (auto& tm : h.t) u[tm.first.e[0]] = tm.second;
  return {n - amax, u};
}

template <class R>
void uv_trim(std::vector<R>& f) {
  while (!f.empty() && RingOps<R>::is_zero(f.back())) f.pop_back();
}

template <class R>
std::vector<R> uv_rem(std::vector<R> f, std::vector<R> g, const R& like) {
  uv_trim(f);
  uv_trim(g);
  if (g.empty()) throw std::invalid_argument("remainder by the zero polynomial");
  R lg = RingOps<R>::inv(g.back());
  while (f.size() >= g.size()) {
    R c = f.back() * lg;
    size_t off = f.size() - g.size();
    if (!RingOps<R>::is_zero(c))
      for (size_t i = 0; i + 1 < g.size(); ++i) f[off + i] = f[off + i] - c * g[i];
    f.pop_back();
    uv_trim(f);
  }
  (void)like;
  return f;
}

template <class R>
std::vector<R> uv_gcd(std::vector<R> a, std::vector<R> b, const R& like) {
  uv_trim(a);
  uv_trim(b);
  while (!b.empty()) {
    auto r = uv_rem(a, b, like);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    R inv = RingOps<R>::inv(a.back());
    for (auto& c : a) c = c * inv;
  }
  return a;
}

// Common divisor of the pencil forms: beta power and monic univariate gcd
// in alpha. Zero entries are skipped; at least one form must be nonzero.
template <class R>
std::pair<int, std::vector<R>> pencil_gcd(const std::vector<Poly<R>>& h, int from,
                                          const R& like) {
  int bmin = -1;
  std::vector<R> g;
  bool first = true;
  for (size_t j = from; j < h.size(); ++j) {
    auto [bv, u] = binary_split(h[j], like);
    if (bv < 0) continue;
    bmin = bmin < 0 ? bv : std::min(bmin, bv);
    if (first) {
      g = u;
      first = false;
    } else {
      g = uv_gcd(g, u, like);
    }
  }
  if (first) return {-1, {}};
  if (!g.empty()) {
    R inv = RingOps<R>::inv(g.back());
    for (auto& c : g) c = c * inv;
  }
  return {bmin, g};
}

void verify_line_fq(const Poly<Fq>& F, const std::vector<Fq>& P, const std::vector<Fq>& V) {
  const FqCtx* k = P[0].k;
  Fq one = fq_one(k);
  std::vector<Poly<Fq>> args;
  for (int i = 0; i < F.nvars; ++i) {
    Poly<Fq> a = poly_scale(poly_var(2, VarKind::Projective, 0, one), P[i]);
    a = poly_add(a, poly_scale(poly_var(2, VarKind::Projective, 1, one), V[i]));
    args.push_back(a);
  }
  if (!poly_compose(F, args).t.empty())
    throw std::logic_error("line witness fails the binary identity");
}

void verify_line_q(const Poly<mpq_class>& F, const std::vector<mpq_class>& P,
                   const std::vector<mpq_class>& V) {
  mpq_class one(1);
  std::vector<Poly<mpq_class>> args;
  for (int i = 0; i < F.nvars; ++i) {
    Poly<mpq_class> a = poly_scale(poly_var(2, VarKind::Projective, 0, one), P[i]);
    a = poly_add(a, poly_scale(poly_var(2, VarKind::Projective, 1, one), V[i]));
    args.push_back(a);
  }
  if (!poly_compose(F, args).t.empty())
    throw std::logic_error("line witness fails the binary identity");
}

// Distinct roots of an F_p-coefficient univariate, grouped by the minimal
// extension carrying them. Levels beyond e_max (or the field cap) are
// dropped and flagged.
struct RootList {
  std::vector<std::pair<int, Fq>> roots;  // (level, root)
  bool all_listed = true;
};

RootList fp_roots_in_extensions(const std::vector<Fp>& u, uint64_t p, int e_max,
                                double cap_log2) {
  const FqCtx* k1 = fq_context(p, 1);
  FqUPoly f1;
  for (const Fp& c : u) f1.push_back(fq_from_int(k1, (long long)c.v));
  auto fac = up_factor(f1, k1);
  RootList out;
  for (auto& [g, m] : fac.factors) {
    (void)m;
    int delta = updeg(g);
    if (delta < 1) continue;
    if (delta > e_max || delta * std::log2((double)p) > cap_log2 + 1e-9) {
      out.all_listed = false;
      continue;
    }
    const FqCtx* kd = fq_context(p, delta);
    FqUPoly gd;
    for (const Fq& c : g) gd.push_back(fq_embed(kd, Fp{c.c[0], p}));
    for (auto& r : up_roots(gd, kd)) out.roots.push_back({delta, r});
  }
  return out;
}

std::vector<Fq> fq_point_from_fp(const std::vector<Fp>& P, const FqCtx* k) {
  std::vector<Fq> out;
  for (const Fp& c : P) out.push_back(fq_embed(k, c));
  return out;
}

// Whether every coordinate is fixed by the Frobenius power p^f, i.e. the
// tuple already lives in the subfield F_{p^f}.
bool tuple_in_subfield(const std::vector<Fq>& v, uint64_t p, int f) {
  __uint128_t q = 1;
  for (int i = 0; i < f; ++i) q *= p;
  for (const Fq& c : v)
    if (fq_pow(c, q) != c) return false;
  return true;
}

// Projective representatives of P^(k-1) over the context field, first
// nonzero coordinate one. Calls fn for each tuple.
template <class Fn>
void scan_projective(const FqCtx* k, int dim, Fn&& fn) {
  uint64_t q = 1;
  for (int i = 0; i < k->e; ++i) q *= k->p;
  std::vector<Fq> v((size_t)dim, fq_zero(k));
  // lead = index of the first nonzero coordinate, set to one
  for (int lead = dim - 1; lead >= 0; --lead) {
    int tail = dim - lead - 1;
    uint64_t total = 1;
    for (int i = 0; i < tail; ++i) total *= q;
    for (uint64_t idx = 0; idx < total; ++idx) {
      for (int i = 0; i < lead; ++i) v[i] = fq_zero(k);
      v[lead] = fq_one(k);
      uint64_t rest = idx;
      for (int i = 0; i < tail; ++i) {
        v[lead + 1 + i] = fq_from_index(k, rest % q);
        rest /= q;
      }
      fn(v);
    }
  }
}

std::string fq_field_name(uint64_t p, int e) {
  std::string s = "F_" + std::to_string(p);
  if (e > 1) s += "^" + std::to_string(e);
  return s;
}

// Zero-dimensionality of an affine ideal from a Groebner basis: every
// variable carries a pure-power leading term (the staircase is finite).
template <class F>
bool affine_zero_dimensional(const GroebnerBasis<F>& gb) {
  if (gb.gens.empty()) return false;  // the zero ideal, full-dimensional
  std::vector<bool> covered((size_t)gb.nvars, false);
  bool unit = false;
  for (const auto& g : gb.gens) {
    const Monomial& lm = leading_monomial(g, gb.order);
    if (lm.deg == 0) unit = true;
    int var = -1;
    bool pure = true;
    for (int i = 0; i < gb.nvars; ++i) {
      if (!lm.e[i]) continue;
      if (var >= 0) pure = false;
      var = i;
    }
    if (pure && var >= 0) covered[var] = true;
  }
  if (unit) return true;  // empty scheme
  for (bool c : covered)
    if (!c) return false;
  return true;
}

struct LineChart {
  int i, j, k, l;                // identity columns i<j, free columns k<l
  std::vector<Poly<Fp>> coeffs;  // binary coefficient forms in (a,b,c,d)
};

// The six row-reduced charts of the family of lines in P^3. In chart
// (i, j) the line is spanned by u (1 at i, 0 at j, a at k, b at l) and
// v (0 at i, 1 at j, c at k, d at l); membership in the surface is the
// vanishing of every coefficient of F(s*u + t*v) as a binary form.
std::vector<LineChart> line_charts(const Poly<Fp>& F) {
  uint64_t p = form_prime(F);
  Fp one = fp_make(p, 1);
  int d = poly_degree(F);
  std::vector<LineChart> charts;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      LineChart ch;
      ch.i = i;
      ch.j = j;
      ch.k = -1;
      ch.l = -1;
      for (int m = 0; m < 4; ++m) {
        if (m == i || m == j) continue;
        (ch.k < 0 ? ch.k : ch.l) = m;
      }
      // ring (s, t, a, b, c, d)
      auto var = [&](int idx) { return poly_var(6, VarKind::Affine, idx, one); };
      std::vector<Poly<Fp>> args(4, poly_zero<Fp>(6, VarKind::Affine));
      args[ch.i] = var(0);
      args[ch.j] = var(1);
      args[ch.k] = poly_add(poly_mul(var(0), var(2)), poly_mul(var(1), var(4)));
      args[ch.l] = poly_add(poly_mul(var(0), var(3)), poly_mul(var(1), var(5)));
      auto comp = poly_compose(F, args);
      std::vector<Poly<Fp>> em((size_t)d + 1, poly_zero<Fp>(4, VarKind::Affine));
      for (auto& tm : comp.t) {
        int m = tm.first.e[1];
        std::vector<int32_t> e(tm.first.e.begin() + 2, tm.first.e.end());
        em[m].t.push_back({mon_make(e), tm.second});
      }
      for (auto& f : em) poly_normalize(f);
      ch.coeffs = std::move(em);
      charts.push_back(std::move(ch));
    }
  return charts;
}

// Normalized index tuple identifying a line by the 2x2 minors of its
// spanning pair; independent of the chart and the chosen basis.
std::vector<uint64_t> plucker_key(const std::vector<Fq>& u, const std::vector<Fq>& v) {
  std::vector<Fq> m;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) m.push_back(u[a] * v[b] - u[b] * v[a]);
  Fq scale = fq_zero(m[0].k);
  for (const Fq& c : m)
    if (!fq_is_zero(c)) {
      scale = fq_inv(c);
      break;
    }
  if (fq_is_zero(scale)) throw std::logic_error("degenerate spanning pair for a line");
  std::vector<uint64_t> key;
  for (const Fq& c : m) key.push_back(fq_index(c * scale));
  return key;
}

int probe_component_count(const AbsoluteFactorization& abs) {
  int n = 0;
  for (auto& [g, m] : abs.factors) {
    (void)g;
    n += m;
  }
  return n;
}

}  // namespace

bool jacobian_nonsingular(const Poly<Fp>& F, const std::vector<uint64_t>& P) {
  uint64_t p = form_prime(F);
  auto Pf = fp_point(P, p);
  require_on_surface(F, Pf);
  return !all_zero(gradient_at(F, Pf));
}

bool jacobian_nonsingular_q(const Poly<mpz_class>& F, const IntPoint& P) {
  if ((int)P.x.size() != F.nvars) throw std::invalid_argument("point dimension mismatch");
  require_on_surface(F, P.x);
  return !all_zero(gradient_at(F, P.x));
}

template <class R>
static Poly<R> tangent_section_impl(const Poly<R>& F, const std::vector<R>& P,
                                    const R& like) {
  require_on_surface(F, P);
  auto w = tangent_complement(F, P, like);
  R one = RingOps<R>::one(like);
  std::vector<Poly<R>> args;
  for (int i = 0; i < F.nvars; ++i) {
    Poly<R> a = poly_scale(poly_var(3, VarKind::Projective, 0, one), P[i]);
    a = poly_add(a, poly_scale(poly_var(3, VarKind::Projective, 1, one), w[0][i]));
    a = poly_add(a, poly_scale(poly_var(3, VarKind::Projective, 2, one), w[1][i]));
    args.push_back(a);
  }
  return poly_compose(F, args);
}

Poly<Fq> tangent_plane_section(const Poly<Fq>& F, const std::vector<Fq>& P) {
  if (P.empty()) throw std::invalid_argument("empty point");
  return tangent_section_impl(F, P, P[0]);
}

Poly<mpq_class> tangent_plane_section_q(const Poly<mpq_class>& F,
                                        const std::vector<mpq_class>& P) {
  return tangent_section_impl(F, P, mpq_class(1));
}

template <class R>
static int tangent_order_impl(const Poly<R>& F, const std::vector<R>& P, const R& like) {
  auto sec = tangent_section_impl(F, P, like);
  if (sec.t.empty()) return kPlaneInsideSurface;
  auto g = poly_dehomogenize(sec, 0);
  std::vector<R> origin(2, RingOps<R>::zero(like));
  int o = order_of_vanishing(g, origin);
  if (o < 2) throw std::logic_error("tangent contact order fell below two");
  return o;
}

int tangent_section_order(const Poly<Fp>& F, const std::vector<uint64_t>& P) {
  uint64_t p = form_prime(F);
  auto Pf = fp_point(P, p);
  return tangent_order_impl(F, Pf, fp_make(p, 1));
}

int tangent_section_order_q(const Poly<mpz_class>& F, const IntPoint& P) {
  auto Fq_ = poly_z_to_q(F);
  std::vector<mpq_class> Pq(P.x.begin(), P.x.end());
  return tangent_order_impl(Fq_, Pq, mpq_class(1));
}

LinesReport lines_through_point(const Poly<Fp>& F, const std::vector<uint64_t>& P,
                                int e_max) {
  uint64_t p = form_prime(F);
  if (e_max < 1) throw std::invalid_argument("e_max must be at least one");
  auto Pf = fp_point(P, p);
  require_on_surface(F, Pf);
  Fp like = fp_make(p, 1);
  int d = poly_degree(F);
  LinesReport out;

  auto grad = gradient_at(F, Pf);
  if (!all_zero(grad)) {
    // Nonsingular: candidate directions sweep the tangent pencil. The
    // binary coefficient forms have a well-defined gcd whose degree counts
    // the lines through P over the closure, multiplicity included.
    auto w = tangent_complement(F, Pf, like);
    auto h = cone_forms(F, Pf, w, like);
    if (!h[1].t.empty())
      throw std::logic_error("first-order form survived on the tangent pencil");
    auto [bpow, g] = pencil_gcd(h, 2, like);
    if (bpow < 0) {
      out.conclusive = true;
      out.positive_dimensional = true;
      out.any_over_closure = true;
      out.note = "the tangent plane lies on the surface";
      return out;
    }
    int total = bpow + (int)g.size() - 1;
    out.conclusive = true;
    out.any_over_closure = total >= 1;
    if (bpow >= 1) {
      const FqCtx* k1 = fq_context(p, 1);
      LineOnSurface ln;
      ln.field = k1;
      ln.point = fq_point_from_fp(Pf, k1);
      ln.direction = fq_point_from_fp(w[0], k1);
      verify_line_fq(poly_fp_to_fq(F, k1), ln.point, ln.direction);
      out.lines.push_back(std::move(ln));
    }
    auto roots = fp_roots_in_extensions(g, p, e_max, 40.0);
    for (auto& [level, a0] : roots.roots) {
      const FqCtx* kd = fq_context(p, level);
      LineOnSurface ln;
      ln.field = kd;
      ln.point = fq_point_from_fp(Pf, kd);
      for (int i = 0; i < 4; ++i)
        ln.direction.push_back(a0 * fq_embed(kd, w[0][i]) + fq_embed(kd, w[1][i]));
      verify_line_fq(poly_fp_to_fq(F, kd), ln.point, ln.direction);
      out.lines.push_back(std::move(ln));
    }
    if (!roots.all_listed)
      out.note = "some lines through the point live beyond the listing cap";
    return out;
  }

  // Singular base point: the directions form a projective scheme cut out
  // by forms of degrees 2..d in the quotient coordinates.
  auto B = extend_basis({Pf}, like);
  auto h = cone_forms(F, Pf, B, like);
  std::vector<Poly<Fp>> gens;
  for (size_t j = 1; j < h.size(); ++j)
    if (!h[j].t.empty()) gens.push_back(h[j]);
  if (gens.empty()) throw std::logic_error("a nonzero form cannot vanish on every line");
  auto gb = buchberger(gens, TermOrder{OrderKind::GRevLex, 0}, 40);
  if (gb.capped) {
    out.note = "direction scheme basis exceeded the degree cap";
    return out;
  }
  auto fit = hilbert_fit(gb);
  if (!fit.ok) {
    out.note = "direction scheme dimension did not stabilize";
    return out;
  }
  out.conclusive = true;
  if (fit.r >= 1) {
    out.positive_dimensional = true;
    out.any_over_closure = true;
  } else if (fit.r < 0) {
    out.any_over_closure = false;
    return out;
  } else {
    out.any_over_closure = true;
  }

  // List directions by scanning extensions, smallest field first; tuples
  // already defined over a subfield were reported at their own level.
  bool complete = true;
  int e_limit = out.positive_dimensional ? 1 : e_max;
  for (int e = 1; e <= e_limit; ++e) {
    uint64_t q = 1;
    bool overflow = false;
    for (int i = 0; i < e; ++i) {
      q *= p;
      if (q > (uint64_t(1) << 40)) overflow = true;
    }
    if (overflow || q > (uint64_t(1) << 11) || q * q > kScanPointCap) {
      complete = false;
      break;
    }
    const FqCtx* ke = fq_context(p, e);
    std::vector<Poly<Fq>> gq;
    for (auto& gg : gens) gq.push_back(poly_fp_to_fq(gg, ke));
    auto Fk = poly_fp_to_fq(F, ke);
    auto Pk = fq_point_from_fp(Pf, ke);
    scan_projective(ke, 3, [&](const std::vector<Fq>& v) {
      for (auto& gg : gq)
        if (!fq_is_zero(poly_evaluate(gg, v))) return;
      bool minimal = true;
      for (int f = 1; minimal && f < e; ++f)
        if (e % f == 0 && tuple_in_subfield(v, p, f)) minimal = false;
      if (!minimal) return;
      LineOnSurface ln;
      ln.field = ke;
      ln.point = Pk;
      for (int i = 0; i < 4; ++i) {
        Fq c = fq_zero(ke);
        for (int m = 0; m < 3; ++m) c = c + v[m] * fq_embed(ke, B[m][i]);
        ln.direction.push_back(c);
      }
      verify_line_fq(Fk, ln.point, ln.direction);
      out.lines.push_back(std::move(ln));
    });
  }
  if (out.positive_dimensional)
    out.note = "positive-dimensional family; prime-field members listed";
  else if (!complete)
    out.note = "direction scan truncated by the work cap";
  return out;
}

LinesReport lines_through_point_q(const Poly<mpz_class>& F, const IntPoint& P) {
  auto Fq_ = poly_z_to_q(F);
  std::vector<mpq_class> Pq(P.x.begin(), P.x.end());
  require_on_surface(Fq_, Pq);
  mpq_class like(1);
  LinesReport out;

  auto grad = gradient_at(Fq_, Pq);
  if (all_zero(grad)) {
    // Dimension of the direction scheme settles the existence question;
    // listing rational members is not attempted from a singular point.
    auto B = extend_basis({Pq}, like);
    auto h = cone_forms(Fq_, Pq, B, like);
    std::vector<Poly<mpq_class>> gens;
    for (size_t j = 1; j < h.size(); ++j)
      if (!h[j].t.empty()) gens.push_back(h[j]);
    if (gens.empty()) throw std::logic_error("a nonzero form cannot vanish on every line");
    auto gb = buchberger(gens, TermOrder{OrderKind::GRevLex, 0}, 40);
    if (gb.capped) {
      out.note = "direction scheme basis exceeded the degree cap";
      return out;
    }
    auto fit = hilbert_fit(gb);
    if (!fit.ok) {
      out.note = "direction scheme dimension did not stabilize";
      return out;
    }
    out.conclusive = true;
    out.positive_dimensional = fit.r >= 1;
    out.any_over_closure = fit.r >= 0;
    if (fit.r == 0) out.note = "finite direction scheme; rational members not listed";
    return out;
  }

  auto w = tangent_complement(Fq_, Pq, like);
  auto h = cone_forms(Fq_, Pq, w, like);
  if (!h[1].t.empty())
    throw std::logic_error("first-order form survived on the tangent pencil");
  auto [bpow, g] = pencil_gcd(h, 2, like);
  if (bpow < 0) {
    out.conclusive = true;
    out.positive_dimensional = true;
    out.any_over_closure = true;
    out.note = "the tangent plane lies on the surface";
    return out;
  }
  int total = bpow + (int)g.size() - 1;
  out.conclusive = true;
  out.any_over_closure = total >= 1;

  auto push_line = [&](const std::vector<mpq_class>& dir) {
    verify_line_q(Fq_, Pq, dir);
    LineOnSurface ln;
    mpz_class den(1);
    for (const auto& c : dir) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den().get_mpz_t());
    std::vector<mpz_class> zdir;
    mpz_class content(0);
    for (const auto& c : dir) {
      mpq_class s = c * den;
      zdir.push_back(s.get_num());
      mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), zdir.back().get_mpz_t());
    }
    if (content != 0)
      for (auto& c : zdir) c /= content;
    ln.point_q = P.x;
    ln.direction_q = std::move(zdir);
    out.lines.push_back(std::move(ln));
  };

  if (bpow >= 1) push_line(std::vector<mpq_class>(w[0].begin(), w[0].end()));

  // Rational roots of the gcd: candidates num/den divide the outer
  // coefficients of the primitive integer form.
  if (g.size() >= 2) {
    std::vector<mpz_class> gz;
    mpz_class den(1);
    for (const auto& c : g) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den().get_mpz_t());
    mpz_class content(0);
    for (const auto& c : g) {
      mpq_class s = c * den;
      gz.push_back(s.get_num());
      mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), s.get_num().get_mpz_t());
    }
    if (content != 0)
      for (auto& c : gz) c /= content;
    size_t low = 0;
    while (low < gz.size() && gz[low] == 0) ++low;
    auto eval_at = [&](const mpq_class& x) {
      mpq_class acc(0);
      for (size_t i = gz.size(); i-- > 0;) acc = acc * x + mpq_class(gz[i]);
      return acc;
    };
    std::set<mpq_class> found;
    if (low > 0) found.insert(mpq_class(0));
    auto divisors = [](mpz_class n) {
      std::vector<mpz_class> ds;
      n = abs(n);
      for (mpz_class i = 1; i * i <= n; ++i)
        if (n % i == 0) {
          ds.push_back(i);
          ds.push_back(n / i);
        }
      return ds;
    };
    for (const auto& a : divisors(gz[low]))
      for (const auto& b : divisors(gz.back())) {
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          mpq_class cand(a * sgn, b);
          cand.canonicalize();
          if (eval_at(cand) == 0) found.insert(cand);
        }
      }
    for (const auto& a0 : found) {
      std::vector<mpq_class> dir;
      for (int i = 0; i < 4; ++i) dir.push_back(a0 * w[0][i] + w[1][i]);
      push_line(dir);
    }
    // Deflate the found roots to full multiplicity; whatever survives has
    // only irrational roots.
    std::vector<mpq_class> rem(gz.begin() + low, gz.end());
    auto eval_dense = [](const std::vector<mpq_class>& v, const mpq_class& x) {
      mpq_class acc(0);
      for (size_t i = v.size(); i-- > 0;) acc = acc * x + v[i];
      return acc;
    };
    for (const auto& r : found) {
      if (r == 0) continue;
      while (rem.size() >= 2 && eval_dense(rem, r) == 0) {
        size_t n = rem.size() - 1;
        std::vector<mpq_class> quo(n, mpq_class(0));
        quo[n - 1] = rem[n];
        for (size_t i = n - 1; i-- > 0;) quo[i] = rem[i + 1] + r * quo[i + 1];
        rem = std::move(quo);
      }
    }
    if (rem.size() >= 2) out.note = "remaining lines through the point are irrational";
  }
  return out;
}

template <class F>
static int chart_dimension_verdict(const std::vector<Poly<F>>& coeffs, int gb_cap) {
  // 1 = zero-dimensional or empty, 0 = positive-dimensional, -1 = capped
  std::vector<Poly<F>> gens;
  for (const auto& f : coeffs)
    if (!f.t.empty()) gens.push_back(f);
  if (gens.empty()) return 0;  // the whole chart lies on the surface
  auto gb = buchberger(gens, TermOrder{OrderKind::GRevLex, 0}, gb_cap);
  if (gb.capped) return -1;
  return affine_zero_dimensional(gb) ? 1 : 0;
}

LineFamilyReport lines_on_surface_finite(const Poly<Fp>& F, int e_scan, int gb_cap) {
  uint64_t p = form_prime(F);
  if (poly_degree(F) < 1) throw std::invalid_argument("the form must be nonconstant");
  if (e_scan < 1) throw std::invalid_argument("scan level must be at least one");
  LineFamilyReport out;
  auto charts = line_charts(F);
  bool capped = false;
  for (const auto& ch : charts) {
    int verdict = chart_dimension_verdict(ch.coeffs, gb_cap);
    if (verdict == 0) {
      out.conclusive = true;
      out.finite = false;
      out.note = "a grassmannian chart carries a positive-dimensional family";
      return out;
    }
    if (verdict < 0) capped = true;
  }
  if (capped) {
    out.note = "Groebner degree cap exceeded in a grassmannian chart";
    return out;
  }
  out.conclusive = true;
  out.finite = true;

  uint64_t q = 1;
  bool overflow = false;
  for (int i = 0; i < e_scan; ++i) {
    q *= p;
    if (q > (uint64_t(1) << 13)) {
      overflow = true;
      break;
    }
  }
  double qd = std::pow((double)p, (double)e_scan);
  if (overflow || qd * qd * qd * qd > (double)kLineScanCap) {
    out.note = "line scan skipped: field too large for the work cap";
    return out;
  }
  const FqCtx* ke = fq_context(p, e_scan);
  std::set<std::vector<uint64_t>> keys;
  for (const auto& ch : charts) {
    std::vector<Poly<Fq>> cq;
    for (const auto& f : ch.coeffs) cq.push_back(poly_fp_to_fq(f, ke));
    std::vector<Fq> x(4, fq_zero(ke));
    uint64_t total = q * q * q * q;
    for (uint64_t idx = 0; idx < total; ++idx) {
      uint64_t rest = idx;
      for (int i = 0; i < 4; ++i) {
        x[i] = fq_from_index(ke, rest % q);
        rest /= q;
      }
      bool onall = true;
      for (const auto& f : cq)
        if (!fq_is_zero(poly_evaluate(f, x))) {
          onall = false;
          break;
        }
      if (!onall) continue;
      std::vector<Fq> u(4, fq_zero(ke)), v(4, fq_zero(ke));
      u[ch.i] = fq_one(ke);
      u[ch.k] = x[0];
      u[ch.l] = x[1];
      v[ch.j] = fq_one(ke);
      v[ch.k] = x[2];
      v[ch.l] = x[3];
      keys.insert(plucker_key(u, v));
    }
  }
  out.count = (long)keys.size();
  return out;
}

LineFamilyReport lines_on_surface_finite_q(const Poly<mpz_class>& F, int gb_cap) {
  if (poly_degree(F) < 1) throw std::invalid_argument("the form must be nonconstant");
  auto Fq_ = poly_z_to_q(F);
  mpq_class one(1);
  LineFamilyReport out;
  bool capped = false;
  // Rebuild the charts over Q; the shape matches the prime-field version.
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      int kk = -1, ll = -1;
      for (int m = 0; m < 4; ++m) {
        if (m == i || m == j) continue;
        (kk < 0 ? kk : ll) = m;
      }
      auto var = [&](int idx) { return poly_var(6, VarKind::Affine, idx, one); };
      std::vector<Poly<mpq_class>> args(4, poly_zero<mpq_class>(6, VarKind::Affine));
      args[i] = var(0);
      args[j] = var(1);
      args[kk] = poly_add(poly_mul(var(0), var(2)), poly_mul(var(1), var(4)));
      args[ll] = poly_add(poly_mul(var(0), var(3)), poly_mul(var(1), var(5)));
      auto comp = poly_compose(Fq_, args);
      int d = poly_degree(Fq_);
      std::vector<Poly<mpq_class>> em((size_t)d + 1, poly_zero<mpq_class>(4, VarKind::Affine));
      for (auto& tm : comp.t) {
        int m = tm.first.e[1];
        std::vector<int32_t> e(tm.first.e.begin() + 2, tm.first.e.end());
        em[m].t.push_back({mon_make(e), tm.second});
      }
      for (auto& f : em) poly_normalize(f);
      int verdict = chart_dimension_verdict(em, gb_cap);
      if (verdict == 0) {
        out.conclusive = true;
        out.finite = false;
        out.note = "a grassmannian chart carries a positive-dimensional family";
        return out;
      }
      if (verdict < 0) capped = true;
    }
  if (capped) {
    out.note = "Groebner degree cap exceeded in a grassmannian chart";
    return out;
  }
  out.conclusive = true;
  out.finite = true;
  out.note = "rational line count not scanned";
  return out;
}

CubicConditionReport cubic_condition(const Poly<Fp>& F, const std::vector<uint64_t>& P,
                                     int e_max, double field_cap_log2) {
  uint64_t p = form_prime(F);
  if (e_max < 1) throw std::invalid_argument("e_max must be at least one");
  auto Pf = fp_point(P, p);
  require_on_surface(F, Pf);
  if (all_zero(gradient_at(F, Pf)))
    throw std::invalid_argument("the cubic check needs a nonsingular base point");
  Fp like = fp_make(p, 1);
  CubicConditionReport out;

  auto sec = tangent_section_impl(F, Pf, like);
  if (sec.t.empty()) {
    // Tangent plane inside the surface: cubics through P inside that plane
    // include singular ones, so the condition fails outright.
    out.conclusive = true;
    out.ok = false;
    out.witness = "tangent plane lies on the surface";
    return out;
  }

  auto abs = absolute_factor_form(sec, e_max, field_cap_log2);
  out.e_used = abs.e;
  if (!abs.ok) {
    out.note = abs.note.empty() ? "tangent section factorization not certified" : abs.note;
    return out;
  }
  const FqCtx* k = abs.ctx;
  std::vector<Fq> Pu{fq_one(k), fq_zero(k), fq_zero(k)};

  int nf = (int)abs.factors.size();
  std::vector<int> degs(nf), caps(nf);
  std::vector<bool> through(nf);
  for (int i = 0; i < nf; ++i) {
    degs[i] = poly_degree(abs.factors[i].first);
    caps[i] = abs.factors[i].second;
    through[i] = fq_is_zero(poly_evaluate(abs.factors[i].first, Pu));
  }

  std::vector<int> pick((size_t)nf, 0);
  std::vector<Fq> origin2{fq_zero(k), fq_zero(k)};
  std::function<bool(int, int)> walk = [&](int idx, int rem) -> bool {
    if (rem == 0) {
      bool hits = false;
      for (int i = 0; i < nf; ++i)
        if (pick[i] > 0 && through[i]) hits = true;
      if (!hits) return true;
      Poly<Fq> D = poly_const(3, VarKind::Projective, fq_one(k));
      for (int i = 0; i < nf; ++i)
        if (pick[i] > 0) D = poly_mul(D, poly_pow(abs.factors[i].first, pick[i]));
      int o = order_of_vanishing(poly_dehomogenize(D, 0), origin2);
      if (o != 1) {
        out.ok = false;
        out.witness = poly_to_string(D);
        out.witness_mult = o;
        return false;
      }
      return true;
    }
    if (idx == nf) return true;
    for (int n = 0; n <= caps[idx] && n * degs[idx] <= rem; ++n) {
      pick[idx] = n;
      bool cont = walk(idx + 1, rem - n * degs[idx]);
      pick[idx] = 0;
      if (!cont) return false;
    }
    return true;
  };
  out.conclusive = true;
  out.ok = walk(0, 3);
  return out;
}

GoodPointPartition good_point_filter(const IntegralModel& m, uint64_t p,
                                     const std::vector<std::vector<uint64_t>>& pts,
                                     int e_max) {
  if (m.nvars != 4 || m.gens.size() != 1)
    throw std::invalid_argument("the filter expects a single quaternary form");
  auto red = reduce_model(m, p);
  const Poly<Fp>& F = red[0];
  if (F.t.empty()) throw std::invalid_argument("the surface form vanishes mod p");
  int d = poly_degree(F);
  if (e_max <= 0) e_max = d * d;

  std::vector<std::vector<Fp>> fps;
  for (const auto& pt : pts) {
    fps.push_back(fp_point(pt, p));
    require_on_surface(F, fps.back());
  }

  GoodPointPartition out;
  out.reports.resize(pts.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long idx = 0; idx < (long long)pts.size(); ++idx) {
    ConditionReport r;
    r.point = pts[idx];
    r.field = fq_field_name(p, 1);
    try {
      r.nonsingular = !all_zero(gradient_at(F, fps[idx]));
      if (!r.nonsingular) {
        r.note = "singular point on the reduction";
      } else {
        r.tangent_order = tangent_section_order(F, pts[idx]);
        r.contact_ok = r.tangent_order == 2;
        auto lr = lines_through_point(F, pts[idx], e_max);
        if (!lr.conclusive) {
          r.conclusive = false;
          r.note += (r.note.empty() ? "" : "; ") + lr.note;
        }
        r.no_lines = lr.conclusive && !lr.any_over_closure && !lr.positive_dimensional;
        r.line_witnesses = lr.lines;
        auto cc = cubic_condition(F, pts[idx], e_max);
        if (!cc.conclusive) {
          r.conclusive = false;
          r.note += (r.note.empty() ? "" : "; ") + cc.note;
        }
        r.cubic_ok = cc.conclusive && cc.ok;
        if (cc.conclusive && !cc.ok) {
          r.cubic_witness = cc.witness;
          r.cubic_witness_mult = cc.witness_mult;
        }
      }
    } catch (const std::exception& ex) {
      // never leak across the parallel region; an undecided point is bad
      r.conclusive = false;
      r.note = ex.what();
    }
    r.good = r.nonsingular && r.contact_ok && r.no_lines && r.cubic_ok;
    out.reports[idx] = std::move(r);
  }
  for (size_t i = 0; i < out.reports.size(); ++i)
    (out.reports[i].good ? out.good : out.bad).push_back(i);
  return out;
}

MultBoundReport mult_bound_check(const IntegralModel& surface,
                                 const std::vector<uint64_t>& P,
                                 const std::vector<Poly<mpz_class>>& curve, uint64_t p) {
  MultBoundReport out;
  if (surface.nvars != 4 || surface.gens.size() != 1)
    throw std::invalid_argument("the bound check expects a single quaternary form");
  if (curve.empty()) throw std::invalid_argument("empty curve ideal");
  for (const auto& g : curve)
    if (g.nvars != 4) throw std::invalid_argument("curve generators must be quaternary");

  // Hypotheses: the curve lies on the surface, is one-dimensional of
  // degree e, and the base point is good on the reduction.
  std::vector<Poly<mpq_class>> cq;
  for (const auto& g : curve)
    if (!g.t.empty()) cq.push_back(poly_z_to_q(g));
  if (cq.empty()) throw std::invalid_argument("empty curve ideal");
  auto gb = buchberger(cq, TermOrder{OrderKind::GRevLex, 0});
  if (!normal_form(poly_z_to_q(surface.gens[0]), gb).t.empty()) {
    out.note = "hypothesis: the curve ideal does not contain the surface form";
    return out;
  }
  auto fit = hilbert_fit(gb);
  if (!fit.ok) {
    out.note = "hypothesis: curve dimension did not stabilize";
    return out;
  }
  if (fit.r != 1) {
    out.note = "hypothesis: the curve scheme is not one-dimensional";
    return out;
  }
  mpq_class deg = fit.d;
  if (deg.get_den() != 1 || deg <= 0) {
    out.note = "hypothesis: curve degree is not a positive integer";
    return out;
  }
  out.e = (long)deg.get_num().get_si();
  auto part = good_point_filter(surface, p, {P});
  if (!part.reports[0].good) {
    out.note = "hypothesis: the base point is not good on the reduction";
    return out;
  }
  out.hypothesis_ok = true;

  std::vector<Poly<Fp>> cp;
  for (const auto& g : curve) {
    auto r = poly_reduce_p(g, p);
    if (!r.t.empty()) cp.push_back(std::move(r));
  }
  if (cp.empty()) {
    out.note = "curve reduction vanishes mod p";
    return out;
  }
  auto Pf = fp_point(P, p);
  bool on = true;
  for (const auto& g : cp)
    if (!RingOps<Fp>::is_zero(poly_evaluate(g, Pf))) on = false;
  if (!on) {
    out.computed = true;
    out.mu = 0;
    out.bound_ok = true;
    out.note = "the reduced curve misses the point";
    return out;
  }
  // Smooth-point fast path: every component of the curve scheme through the
  // point has dimension one, so a rank-two Jacobian certifies a regular local
  // ring and multiplicity one without the graded scan.
  {
    Mat<Fp> jac((int)cp.size(), 4, fp_make(p, 0));
    for (int i = 0; i < (int)cp.size(); ++i)
      for (int j = 0; j < 4; ++j)
        jac.at(i, j) = poly_evaluate(poly_derivative(cp[i], j), Pf);
    if (matrix_rank(std::move(jac), fp_make(p, 1)) == 2) {
      out.computed = true;
      out.mu = 1;
      out.bound_ok = 2 <= out.e;
      if (!out.bound_ok) out.note = "bound violation: 2*mu exceeds the curve degree";
      return out;
    }
  }
  int kmax = (int)std::max(10L, std::min(28L, 2 * out.e + 8));
  auto mres = multiplicity_at(cp, Pf, 1, kmax, fp_make(p, 1));
  if (!mres.ok) {
    out.note = "multiplicity did not stabilize: " + mres.note;
    return out;
  }
  out.computed = true;
  out.mu = mres.mu;
  out.bound_ok = 2 * out.mu <= out.e;
  if (!out.bound_ok) out.note = "bound violation: 2*mu exceeds the curve degree";
  return out;
}

ProbeReport abs_irreducibility_probe(const Poly<mpz_class>& f, int trials) {
  if (f.nvars != 2 || f.vk != VarKind::Affine)
    throw std::invalid_argument("the probe expects an affine plane curve");
  if (trials < 1) throw std::invalid_argument("at least one trial prime is needed");
  int d = poly_degree(f);
  if (f.t.empty() || d < 1) throw std::invalid_argument("the probe needs a nonconstant input");
  ProbeReport out;
  if (d == 1) {
    out.verdict = ProbeVerdict::Certified;
    out.note = "degree one";
    return out;
  }

  int m0 = d + 1, m1 = d + 1;
  for (auto& tm : f.t) {
    m0 = std::min(m0, (int)tm.first.e[0]);
    m1 = std::min(m1, (int)tm.first.e[1]);
  }
  if (m0 + m1 >= 1) {
    out.verdict = ProbeVerdict::Refuted;
    out.note = f.t.size() == 1 ? "a degree-two-or-more monomial splits into variables"
                               : "visible monomial content";
    return out;
  }

  bool homog = true;
  for (auto& tm : f.t)
    if (tm.first.deg != d) homog = false;
  if (homog) {
    // A binary form of degree >= 2 splits into linear forms over the
    // closure. Record a prime where the splitting becomes visible.
    out.verdict = ProbeVerdict::Refuted;
    out.note = "homogeneous plane form splits over the closure";
    mpz_class pz(2);
    for (int t = 0; t < trials; ++t) {
      mpz_nextprime(pz.get_mpz_t(), pz.get_mpz_t());
      uint64_t p = pz.get_ui();
      auto fp = poly_reduce_p(f, p);
      if (fp.t.empty() || poly_degree(fp) != d) continue;
      auto u = poly_dehomogenize(fp, 1);
      const FqCtx* k1 = fq_context(p, 1);
      FqUPoly uc((size_t)d + 1, fq_zero(k1));
      for (auto& tm : u.t) uc[tm.first.e[0]] = fq_from_int(k1, (long long)tm.second.v);
      up_trim(uc);
      // a drop in the dehomogenized degree is a visible second-variable factor
      int parts = d - updeg(uc);
      auto fac = up_factor(uc, k1);
      for (auto& [g, m] : fac.factors) parts += updeg(g) >= 1 ? m : 0;
      if (parts >= 2) {
        out.prime = p;
        out.note += "; splits over " + fq_field_name(p, 1);
        break;
      }
    }
    return out;
  }

  auto fh = poly_homogenize(f);
  mpz_class pz(2);
  int tested = 0;
  while (tested < trials) {
    mpz_nextprime(pz.get_mpz_t(), pz.get_mpz_t());
    uint64_t p = pz.get_ui();
    if (p == 2) continue;
    auto Fh = poly_reduce_p(fh, p);
    if (Fh.t.empty() || poly_degree(Fh) != d) continue;  // degenerate reduction
    ++tested;
    auto abs = absolute_factor_form(Fh, d * d, 40.0);
    if (!abs.ok) continue;
    if (probe_component_count(abs) == 1 && abs.factors[0].second == 1) {
      out.verdict = ProbeVerdict::Certified;
      out.prime = p;
      out.note = "absolutely irreducible modulo the witness prime, which lifts";
      return out;
    }
  }
  out.note = "no tested prime certified absolute irreducibility";
  return out;
}

}  // namespace detcount
