#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "detcount/geometry.hpp"
#include "detcount/zmodel.hpp"

using namespace detcount;

namespace {

Poly<Fp> form_mod(const char* txt, uint64_t p) {
  return poly_reduce_p(poly_q_to_z_primitive(parse_poly(txt, 4)), p);
}

Poly<mpz_class> form_z(const char* txt) { return poly_q_to_z_primitive(parse_poly(txt, 4)); }

IntegralModel model_of(const char* txt) {
  IntegralModel m;
  m.nvars = 4;
  m.gens = {form_z(txt)};
  return m;
}

// All F_p-points of the surface, as normalized projective representatives.
std::vector<std::vector<uint64_t>> surface_points(const Poly<Fp>& F) {
  uint64_t p = F.t.front().second.p;
  std::vector<std::vector<uint64_t>> out;
  for (int lead = 0; lead < 4; ++lead) {
    uint64_t total = 1;
    for (int i = 0; i < 3 - lead; ++i) total *= p;
    for (uint64_t idx = 0; idx < total; ++idx) {
      std::vector<uint64_t> P(4, 0);
      P[lead] = 1;
      uint64_t rest = idx;
      for (int i = lead + 1; i < 4; ++i) {
        P[i] = rest % p;
        rest /= p;
      }
      std::vector<Fp> Pf;
      for (auto c : P) Pf.push_back(fp_make(p, (long long)c));
      if (RingOps<Fp>::is_zero(poly_evaluate(F, Pf))) out.push_back(P);
    }
  }
  return out;
}

// Normalized Pluecker key of the span of u, v; empty if they do not span a line.
std::vector<uint64_t> line_key(const FqCtx* k, const std::vector<Fq>& u,
                               const std::vector<Fq>& v) {
  std::vector<Fq> m;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) m.push_back(u[a] * v[b] - u[b] * v[a]);
  Fq sc = fq_zero(k);
  for (auto& c : m)
    if (!fq_is_zero(c)) {
      sc = fq_inv(c);
      break;
    }
  if (fq_is_zero(sc)) return {};
  std::vector<uint64_t> key;
  for (auto& c : m) key.push_back(fq_index(c * sc));
  return key;
}

// True when the whole span of u, v lies on F: F(s*u + t*v) is the zero binary form.
bool span_on_surface(const Poly<Fq>& F, const FqCtx* k, const std::vector<Fq>& u,
                     const std::vector<Fq>& v) {
  Fq one = fq_one(k);
  std::vector<Poly<Fq>> args;
  for (int i = 0; i < 4; ++i) {
    Poly<Fq> a = poly_scale(poly_var(2, VarKind::Projective, 0, one), u[i]);
    a = poly_add(a, poly_scale(poly_var(2, VarKind::Projective, 1, one), v[i]));
    args.push_back(a);
  }
  return poly_compose(F, args).t.empty();
}

// Oracle: count lines on the surface through P over F_{p^e} by scanning every
// direction of P^3(F_{p^e}) and testing the binary identity directly.
int scan_lines_through(const Poly<Fp>& F, const std::vector<uint64_t>& P, int e) {
  uint64_t p = F.t.front().second.p;
  const FqCtx* k = fq_context(p, e);
  auto Fk = poly_fp_to_fq(F, k);
  std::vector<Fq> Pk;
  for (auto c : P) Pk.push_back(fq_embed(k, fp_make(p, (long long)c)));
  uint64_t q = 1;
  for (int i = 0; i < e; ++i) q *= p;
  std::set<std::vector<uint64_t>> keys;
  std::vector<Fq> V(4, fq_zero(k));
  for (int lead = 3; lead >= 0; --lead) {
    uint64_t total = 1;
    for (int i = 0; i < 3 - lead; ++i) total *= q;
    for (uint64_t idx = 0; idx < total; ++idx) {
      for (int i = 0; i < lead; ++i) V[i] = fq_zero(k);
      V[lead] = fq_one(k);
      uint64_t rest = idx;
      for (int i = lead + 1; i < 4; ++i) {
        V[i] = fq_from_index(k, rest % q);
        rest /= q;
      }
      auto key = line_key(k, Pk, V);
      if (key.empty()) continue;
      if (!span_on_surface(Fk, k, Pk, V)) continue;
      keys.insert(key);
    }
  }
  return (int)keys.size();
}

// Oracle: count all lines on the surface over F_p. Every line on the surface
// contains at least two F_p-points of it, so pairs of surface points find all
// of them; dedupe by Pluecker key.
int scan_lines_on_surface(const Poly<Fp>& F) {
  uint64_t p = F.t.front().second.p;
  const FqCtx* k = fq_context(p, 1);
  auto Fk = poly_fp_to_fq(F, k);
  auto pts = surface_points(F);
  std::vector<std::vector<Fq>> emb;
  for (auto& P : pts) {
    std::vector<Fq> v;
    for (auto c : P) v.push_back(fq_embed(k, fp_make(p, (long long)c)));
    emb.push_back(v);
  }
  std::set<std::vector<uint64_t>> keys;
  for (size_t i = 0; i < emb.size(); ++i)
    for (size_t j = i + 1; j < emb.size(); ++j) {
      auto key = line_key(k, emb[i], emb[j]);
      if (key.empty()) continue;
      if (keys.count(key)) continue;
      if (span_on_surface(Fk, k, emb[i], emb[j])) keys.insert(key);
    }
  return (int)keys.size();
}

// External re-check of a reported finite-field line: recompose the binary form.
bool witness_holds(const Poly<Fp>& F, const LineOnSurface& ln) {
  if (ln.field == nullptr) return false;
  auto Fk = poly_fp_to_fq(F, ln.field);
  return span_on_surface(Fk, ln.field, ln.point, ln.direction);
}

bool witness_holds_q(const Poly<mpz_class>& F, const LineOnSurface& ln) {
  auto Fq_ = poly_z_to_q(F);
  std::vector<Poly<mpq_class>> args;
  for (int i = 0; i < 4; ++i) {
    Poly<mpq_class> a =
        poly_scale(poly_var(2, VarKind::Projective, 0, mpq_class(1)), mpq_class(ln.point_q[i]));
    a = poly_add(a,
                 poly_scale(poly_var(2, VarKind::Projective, 1, mpq_class(1)),
                            mpq_class(ln.direction_q[i])));
    args.push_back(a);
  }
  return poly_compose(Fq_, args).t.empty();
}

Poly<mpz_class> affine_plane_curve(const char* txt) {
  auto f = poly_q_to_z_primitive(parse_poly(txt, 2));
  f.vk = VarKind::Affine;
  return f;
}

}  // namespace

TEST_CASE("nonsingular point detection") {
  auto quad = form_mod("x0*x3 - x1*x2", 7);
  CHECK(jacobian_nonsingular(quad, {1, 0, 0, 0}));
  auto cone = form_mod("x1^2 + x2^2 - x3^2", 5);
  CHECK_FALSE(jacobian_nonsingular(cone, {1, 0, 0, 0}));
  CHECK(jacobian_nonsingular(cone, {1, 0, 3, 2}));  // on the cone, away from the vertex
  CHECK_THROWS_AS(jacobian_nonsingular(quad, {1, 1, 1, 0}), std::invalid_argument);

  IntPoint P;
  P.x = {1, 0, 0, 0};
  auto nodal_surface = form_z("(x0*x1 - x2^2 - x3^2)*x0^2 + x2*x3*(x1^2 + x2*x3)");
  CHECK(jacobian_nonsingular_q(nodal_surface, P));
  auto cone_z = form_z("x1^2 + x2^2 - x3^2");
  CHECK_FALSE(jacobian_nonsingular_q(cone_z, P));
}

TEST_CASE("tangent plane contact order") {
  // smooth quadric: section is a pair of rulings, order exactly two
  auto quad = form_mod("x0*x3 - x1*x2", 7);
  CHECK(tangent_section_order(quad, {1, 0, 0, 0}) == 2);

  // order-three contact: lowest section term is cubic
  auto tac = form_mod("x0^3*x3 + x0*x1^3 + x1^4 + x1*x2^3", 7);
  CHECK(tangent_section_order(tac, {1, 0, 0, 0}) == 3);

  // the tangent plane lies inside the surface: sentinel value
  auto plane_in = form_mod("x3*(x0^3 + x1^3 + x2^3 + x3^3)", 7);
  CHECK(tangent_section_order(plane_in, {1, 0, 0, 0}) == kPlaneInsideSurface);

  // singular base point has no tangent plane
  auto cone = form_mod("x1^2 + x2^2 - x3^2", 5);
  CHECK_THROWS_AS(tangent_section_order(cone, {1, 0, 0, 0}), std::invalid_argument);

  // rational route agrees on the same fixtures
  IntPoint P;
  P.x = {1, 0, 0, 0};
  CHECK(tangent_section_order_q(form_z("x0*x3 - x1*x2"), P) == 2);
  CHECK(tangent_section_order_q(form_z("x0^3*x3 + x0*x1^3 + x1^4 + x1*x2^3"), P) == 3);
  CHECK(tangent_section_order_q(form_z("x3*(x0^3 + x1^3 + x2^3 + x3^3)"), P) ==
        kPlaneInsideSurface);

  // oracle: the order is the smallest t-valuation of F(P + t*V) over tangent
  // directions V, provided the field is large enough to expose the lowest form
  auto section_order_by_rays = [](const Poly<Fp>& F, const std::vector<uint64_t>& Pt) {
    uint64_t p = F.t.front().second.p;
    const FqCtx* k = fq_context(p, 1);
    auto Fk = poly_fp_to_fq(F, k);
    std::vector<Fq> Pk;
    for (auto c : Pt) Pk.push_back(fq_embed(k, fp_make(p, (long long)c)));
    int best = 1 << 20;
    std::vector<Fq> V(4, fq_zero(k));
    for (int lead = 3; lead >= 0; --lead) {
      uint64_t total = 1;
      for (int i = 0; i < 3 - lead; ++i) total *= p;
      for (uint64_t idx = 0; idx < total; ++idx) {
        for (int i = 0; i < lead; ++i) V[i] = fq_zero(k);
        V[lead] = fq_one(k);
        uint64_t rest = idx;
        for (int i = lead + 1; i < 4; ++i) {
          V[i] = fq_from_index(k, rest % p);
          rest /= p;
        }
        if (line_key(k, Pk, V).empty()) continue;
        // tangent directions only: grad(P) . V = 0
        Fq dot = fq_zero(k);
        for (int i = 0; i < 4; ++i) {
          auto d = poly_derivative(Fk, i);
          dot = dot + poly_evaluate(d, Pk) * V[i];
        }
        if (!fq_is_zero(dot)) continue;
        // t-valuation of F(P + tV)
        Fq one = fq_one(k);
        std::vector<Poly<Fq>> args;
        for (int i = 0; i < 4; ++i) {
          Poly<Fq> a = poly_scale(poly_var(2, VarKind::Projective, 0, one), Pk[i]);
          a = poly_add(a, poly_scale(poly_var(2, VarKind::Projective, 1, one), V[i]));
          args.push_back(a);
        }
        auto bin = poly_compose(Fk, args);
        int val = 1 << 20;
        for (auto& [m, c] : bin.t)
          if (m.e[1] < val) val = m.e[1];
        if (val < best) best = val;
      }
    }
    return best;
  };
  CHECK(section_order_by_rays(quad, {1, 0, 0, 0}) == 2);
  CHECK(section_order_by_rays(tac, {1, 0, 0, 0}) == 3);
}

TEST_CASE("lines through a point match an exhaustive direction scan") {
  // smooth quadric carries exactly two rulings through each point
  auto quad = form_mod("x0*x3 - x1*x2", 7);
  auto lr = lines_through_point(quad, {1, 0, 0, 0}, 2);
  CHECK(lr.conclusive);
  CHECK_FALSE(lr.positive_dimensional);
  CHECK(lr.any_over_closure);
  CHECK(lr.lines.size() == 2);
  CHECK(scan_lines_through(quad, {1, 0, 0, 0}, 1) == 2);
  for (auto& ln : lr.lines) CHECK(witness_holds(quad, ln));

  // quartic with four concurrent lines at (1,9,0,0): 9^4 = -1 mod 17
  auto f17 = form_mod("x0^4 + x1^4 + x2^4 + x3^4", 17);
  auto l17 = lines_through_point(f17, {1, 9, 0, 0}, 2);
  CHECK(l17.conclusive);
  CHECK(l17.any_over_closure);
  CHECK(l17.lines.size() == 4);
  CHECK(scan_lines_through(f17, {1, 9, 0, 0}, 1) == 4);
  for (auto& ln : l17.lines) CHECK(witness_holds(f17, ln));

  // a line-free point on the same surface shape over F_13
  auto f13 = form_mod("x0^4 + x1^4 + x2^4 + x3^4", 13);
  auto l13 = lines_through_point(f13, {1, 4, 2, 0}, 4);
  CHECK(l13.conclusive);
  CHECK_FALSE(l13.any_over_closure);
  CHECK(l13.lines.empty());
  CHECK(scan_lines_through(f13, {1, 4, 2, 0}, 1) == 0);

  // nonsingular point whose tangent plane lies on the surface
  auto plane_in = form_mod("x3*(x0^3 + x1^3 + x2^3 + x3^3)", 7);
  auto lp = lines_through_point(plane_in, {1, 0, 0, 0}, 1);
  CHECK(lp.conclusive);
  CHECK(lp.positive_dimensional);
  CHECK(lp.any_over_closure);

  CHECK_THROWS_AS(lines_through_point(quad, {1, 1, 1, 0}, 1), std::invalid_argument);
}

TEST_CASE("lines through a singular point") {
  // quadric cone: the whole ruling passes through the vertex
  auto cone = form_mod("x1^2 + x2^2 - x3^2", 5);
  auto cr = lines_through_point(cone, {1, 0, 0, 0}, 1);
  CHECK(cr.conclusive);
  CHECK(cr.positive_dimensional);
  CHECK(cr.any_over_closure);
  // listed prime-field members: one line per point of a smooth conic over F_5
  CHECK(cr.lines.size() == 6);
  for (auto& ln : cr.lines) CHECK(witness_holds(cone, ln));

  IntPoint P;
  P.x = {1, 0, 0, 0};
  auto lrq = lines_through_point_q(form_z("x1^2 + x2^2 - x3^2"), P);
  CHECK(lrq.conclusive);
  CHECK(lrq.positive_dimensional);
}

TEST_CASE("rational lines through a point") {
  IntPoint P;
  P.x = {1, 0, 0, 0};
  auto quad_z = form_z("x0*x3 - x1*x2");
  auto lr = lines_through_point_q(quad_z, P);
  CHECK(lr.conclusive);
  CHECK(lr.lines.size() == 2);
  std::set<std::vector<int>> dirs;
  for (auto& ln : lr.lines) {
    CHECK(witness_holds_q(quad_z, ln));
    std::vector<int> d;
    for (auto& c : ln.direction_q) d.push_back((int)c.get_si());
    dirs.insert(d);
  }
  CHECK(dirs.count({0, 1, 0, 0}) == 1);
  CHECK(dirs.count({0, 0, 1, 0}) == 1);

  // all four lines through the point are irrational here
  auto g = form_z("x0^3*x3 - x1^4 - x2^4 - x3^4");
  auto lg = lines_through_point_q(g, P);
  CHECK(lg.conclusive);
  CHECK(lg.any_over_closure);
  CHECK(lg.lines.empty());
  CHECK(lg.note.find("irrational") != std::string::npos);
}

TEST_CASE("line families on a surface match a point-pair scan") {
  // quadric and cone both carry infinitely many lines
  auto quad = form_mod("x0*x3 - x1*x2", 7);
  auto fam_q = lines_on_surface_finite(quad, 1);
  CHECK(fam_q.conclusive);
  CHECK_FALSE(fam_q.finite);
  auto cone = form_mod("x1^2 + x2^2 - x3^2", 5);
  auto fam_c = lines_on_surface_finite(cone, 1);
  CHECK(fam_c.conclusive);
  CHECK_FALSE(fam_c.finite);

  // diagonal quartic over F_13: finitely many lines, none rational
  auto f13 = form_mod("x0^4 + x1^4 + x2^4 + x3^4", 13);
  auto fam13 = lines_on_surface_finite(f13, 1);
  CHECK(fam13.conclusive);
  CHECK(fam13.finite);
  REQUIRE(fam13.count.has_value());
  CHECK(*fam13.count == 0);
  CHECK(scan_lines_on_surface(f13) == 0);

  // over F_17 fourth roots of -1 exist and all 48 lines are rational
  auto f17 = form_mod("x0^4 + x1^4 + x2^4 + x3^4", 17);
  auto fam17 = lines_on_surface_finite(f17, 1);
  CHECK(fam17.conclusive);
  CHECK(fam17.finite);
  REQUIRE(fam17.count.has_value());
  CHECK(*fam17.count == 48);
  CHECK(scan_lines_on_surface(f17) == 48);

  // rational route reports the dichotomy without a count
  auto famz = lines_on_surface_finite_q(form_z("x0^4 + x1^4 + x2^4 + x3^4"));
  CHECK(famz.conclusive);
  CHECK(famz.finite);
  CHECK_FALSE(famz.count.has_value());
  auto famzq = lines_on_surface_finite_q(form_z("x0*x3 - x1*x2"));
  CHECK(famzq.conclusive);
  CHECK_FALSE(famzq.finite);
}

TEST_CASE("cubic divisors of the tangent section") {
  // section = line * nodal cubic, base point at the node: fails with a witness
  auto nodal = form_mod("x0*x1^3 - x0*x1*x2^2 + x1^4 + x0^3*x3", 7);
  auto c1 = cubic_condition(nodal, {1, 0, 0, 0}, 16);
  CHECK(c1.conclusive);
  CHECK_FALSE(c1.ok);
  CHECK(c1.witness_mult == 2);
  CHECK_FALSE(c1.witness.empty());

  // section = conic * two lines, point on the lines only: every cubic divisor
  // through it is a conic plus one line, nonsingular there
  auto twolines = form_mod("x0^2*x1*x2 + x1^2*x2^2 + x0^3*x3", 7);
  auto c2 = cubic_condition(twolines, {1, 0, 0, 0}, 16);
  CHECK(c2.conclusive);
  CHECK(c2.ok);

  // conjugate line pair: needs a quadratic extension to split, and the verdict
  // is monotone in the extension budget: never conclusive-true then false
  auto conj = form_mod("(x1^2 + x2^2)*(x0^2 + x1*x2) + x0^3*x3", 7);
  bool seen_true = false;
  for (int em : {1, 2, 4, 8, 16}) {
    auto c3 = cubic_condition(conj, {1, 0, 0, 0}, em);
    if (seen_true) {
      CHECK(c3.conclusive);
      CHECK(c3.ok);
    }
    if (c3.conclusive) {
      CHECK(c3.ok);
      seen_true = true;
    }
  }
  CHECK(seen_true);
  auto c3a = cubic_condition(conj, {1, 0, 0, 0}, 1);
  CHECK_FALSE(c3a.conclusive);

  // irreducible quartic section: no cubic divisors at all, vacuously fine
  auto f13 = form_mod("x0^4 + x1^4 + x2^4 + x3^4", 13);
  auto c4 = cubic_condition(f13, {1, 4, 2, 0}, 16);
  CHECK(c4.conclusive);
  CHECK(c4.ok);

  // the tangent plane inside the surface is an immediate failure
  auto plane_in = form_mod("x3*(x0^3 + x1^3 + x2^3 + x3^3)", 7);
  auto c5 = cubic_condition(plane_in, {1, 0, 0, 0}, 16);
  CHECK(c5.conclusive);
  CHECK_FALSE(c5.ok);

  auto cone = form_mod("x1^2 + x2^2 - x3^2", 5);
  CHECK_THROWS_AS(cubic_condition(cone, {1, 0, 0, 0}, 4), std::invalid_argument);
}

TEST_CASE("good point filter over a small prime field") {
  // every F_13-point of the diagonal quartic passes all four conditions
  auto f13 = form_mod("x0^4 + x1^4 + x2^4 + x3^4", 13);
  auto pts = surface_points(f13);
  CHECK(pts.size() == 128);
  auto m = model_of("x0^4 + x1^4 + x2^4 + x3^4");
  auto part = good_point_filter(m, 13, pts);
  CHECK(part.reports.size() == pts.size());
  CHECK(part.good.size() == pts.size());
  CHECK(part.bad.empty());
  for (auto& r : part.reports) {
    CHECK(r.conclusive);
    CHECK(r.nonsingular);
    CHECK(r.tangent_order == 2);
    CHECK(r.no_lines);
    CHECK(r.cubic_ok);
    CHECK(r.good);
  }

  // on a smooth quadric every point sits on two rulings: all bad via lines
  auto quad = form_mod("x0*x3 - x1*x2", 7);
  auto qpts = surface_points(quad);
  auto mq = model_of("x0*x3 - x1*x2");
  auto qpart = good_point_filter(mq, 7, qpts);
  CHECK(qpart.good.empty());
  for (auto& r : qpart.reports) {
    CHECK(r.conclusive);
    CHECK(r.nonsingular);
    CHECK_FALSE(r.no_lines);
    CHECK_FALSE(r.good);
    CHECK(r.line_witnesses.size() == 2);
  }

  // singular point: rejected on the spot
  auto mc = model_of("x1^2 + x2^2 - x3^2");
  auto cpart = good_point_filter(mc, 5, {{1, 0, 0, 0}});
  CHECK(cpart.good.empty());
  CHECK_FALSE(cpart.reports[0].nonsingular);
  CHECK_FALSE(cpart.reports[0].good);
  CHECK(cpart.reports[0].conclusive);

  // a point on a line of the surface: bad, with the lines as witnesses
  auto m17 = model_of("x0^4 + x1^4 + x2^4 + x3^4");
  auto p17 = good_point_filter(m17, 17, {{1, 9, 0, 0}});
  CHECK(p17.good.empty());
  auto& r17 = p17.reports[0];
  CHECK(r17.conclusive);
  CHECK(r17.nonsingular);
  CHECK_FALSE(r17.no_lines);
  CHECK(r17.line_witnesses.size() == 4);

  // a cramped extension budget turns the cubic check inconclusive: the point
  // is then bad by fiat, never good
  auto mconj = model_of("(x1^2 + x2^2)*(x0^2 + x1*x2) + x0^3*x3");
  auto pc = good_point_filter(mconj, 7, {{1, 0, 0, 0}}, 1);
  CHECK(pc.good.empty());
  CHECK_FALSE(pc.reports[0].conclusive);
  CHECK_FALSE(pc.reports[0].good);

  IntegralModel bad_shape;
  bad_shape.nvars = 3;
  bad_shape.gens = {poly_q_to_z_primitive(parse_poly("x0^2 + x1^2 + x2^2", 3))};
  CHECK_THROWS_AS(good_point_filter(bad_shape, 7, {{1, 0, 0}}), std::invalid_argument);
}

TEST_CASE("multiplicity bound for curves through a good point") {
  // quartic surface built to contain a smooth conic and a nodal degree-four
  // curve, both through the good point (1,0,0,0)
  auto m = model_of("(x0*x1 - x2^2 - x3^2)*x0^2 + x2*x3*(x1^2 + x2*x3)");

  std::vector<Poly<mpz_class>> conic = {form_z("x3"), form_z("x0*x1 - x2^2")};
  auto mb1 = mult_bound_check(m, {1, 0, 0, 0}, conic, 13);
  CHECK(mb1.hypothesis_ok);
  CHECK(mb1.computed);
  CHECK(mb1.mu == 1);
  CHECK(mb1.e == 2);
  CHECK(mb1.bound_ok);

  // two smooth branches crossing at the point: equality at the boundary
  std::vector<Poly<mpz_class>> nodal = {form_z("x0*x1 - x2^2 - x3^2"), form_z("x2*x3")};
  auto mb2 = mult_bound_check(m, {1, 0, 0, 0}, nodal, 13);
  CHECK(mb2.hypothesis_ok);
  CHECK(mb2.computed);
  CHECK(mb2.mu == 2);
  CHECK(mb2.e == 4);
  CHECK(mb2.bound_ok);

  // a line through the point cannot lie on this surface: hypothesis violation,
  // reported as such rather than as a bound failure
  std::vector<Poly<mpz_class>> line = {form_z("x1"), form_z("x2")};
  auto mb3 = mult_bound_check(m, {1, 0, 0, 0}, line, 13);
  CHECK_FALSE(mb3.hypothesis_ok);
  CHECK(mb3.note.find("does not contain the surface form") != std::string::npos);

  // the surface itself is not a curve
  std::vector<Poly<mpz_class>> self = {m.gens[0]};
  auto mb4 = mult_bound_check(m, {1, 0, 0, 0}, self, 13);
  CHECK_FALSE(mb4.hypothesis_ok);
  CHECK(mb4.note.find("not one-dimensional") != std::string::npos);

  // base point not good: the cone vertex
  auto mc = model_of("x1^2 + x2^2 - x3^2");
  std::vector<Poly<mpz_class>> ruling = {form_z("x1"), form_z("x2 - x3")};
  auto mb5 = mult_bound_check(mc, {1, 0, 0, 0}, ruling, 13);
  CHECK_FALSE(mb5.hypothesis_ok);
  CHECK(mb5.note.find("not good") != std::string::npos);
}

TEST_CASE("absolute irreducibility probe") {
  // binary quadratic form: splits over the closure, witnessed at p = 5
  auto pr1 = abs_irreducibility_probe(affine_plane_curve("x0^2 + x1^2"), 8);
  CHECK(pr1.verdict == ProbeVerdict::Refuted);
  CHECK(pr1.prime == 5);

  // smooth affine cubic: certified by a degree-preserving good prime
  auto pr2 = abs_irreducibility_probe(affine_plane_curve("x0^2 - x1^3 + x1"), 8);
  CHECK(pr2.verdict == ProbeVerdict::Certified);
  CHECK(pr2.prime >= 3);

  // visible factorization
  auto pr3 = abs_irreducibility_probe(affine_plane_curve("x0*x1"), 8);
  CHECK(pr3.verdict == ProbeVerdict::Refuted);

  // cuspidal cubic is still irreducible over the closure
  auto pr4 = abs_irreducibility_probe(affine_plane_curve("x0^2 - x1^3"), 8);
  CHECK(pr4.verdict == ProbeVerdict::Certified);

  // projective input is rejected: the probe wants an affine plane curve
  CHECK_THROWS_AS(abs_irreducibility_probe(poly_q_to_z_primitive(parse_poly("x0^2 + x1^2", 2)), 4),
                  std::invalid_argument);
}
