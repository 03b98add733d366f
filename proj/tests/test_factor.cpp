#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <random>

#include "detcount/factor.hpp"
#include "detcount/poly.hpp"

using namespace detcount;

namespace {

Poly<Fq> mk2(const FqCtx* k, const std::vector<std::array<long long, 3>>& terms) {
  Poly<Fq> f{2, VarKind::Affine, {}};
  for (const auto& t : terms)
    f.t.push_back({mon_make({(int32_t)t[0], (int32_t)t[1]}), fq_from_int(k, t[2])});
  poly_normalize(f);
  return f;
}

Poly<Fq> mk3(const FqCtx* k, const std::vector<std::array<long long, 4>>& terms) {
  Poly<Fq> f{3, VarKind::Projective, {}};
  for (const auto& t : terms)
    f.t.push_back(
        {mon_make({(int32_t)t[0], (int32_t)t[1], (int32_t)t[2]}), fq_from_int(k, t[3])});
  poly_normalize(f);
  return f;
}

Poly<Fq> refold(const FqFactorization& fac, int nvars, VarKind vk, const FqCtx* k) {
  Poly<Fq> r = poly_const(nvars, vk, fac.unit);
  for (const auto& [g, m] : fac.factors)
    for (int i = 0; i < m; ++i) r = poly_mul(r, g);
  return r;
}

bool peq(const Poly<Fq>& a, const Poly<Fq>& b) { return poly_sub(a, b).t.empty(); }

FqUPoly up_product(const std::vector<std::pair<FqUPoly, int>>& fs, const Fq& unit,
                   const FqCtx* k) {
  FqUPoly r = {unit};
  for (const auto& [g, m] : fs)
    for (int i = 0; i < m; ++i) r = up_mul(r, g, k);
  return r;
}

}  // namespace

TEST_CASE("univariate arithmetic, gcd, powmod") {
  const FqCtx* k = fq_context(5, 1);
  FqUPoly f = up_make(k, {1, 1, 0, 2, 0, 1});  // x^5 + 2x^3 + x + 1
  FqUPoly g = up_make(k, {3, 0, 1});           // x^2 + 3
  auto [q, r] = up_divrem(f, g, k);
  CHECK(updeg(r) < updeg(g));
  CHECK(up_add(up_mul(q, g, k), r, k) == f);

  FqUPoly a = up_mul(up_make(k, {1, 1}), up_make(k, {2, 1}), k);
  FqUPoly b = up_mul(up_make(k, {1, 1}), up_make(k, {3, 1}), k);
  CHECK(up_gcd(a, b, k) == up_make(k, {1, 1}));

  FqUPoly x = up_make(k, {0, 1});
  CHECK(up_powmod(x, mpz_class(8), up_make(k, {1, 0, 1}), k) == up_make(k, {1}));
}

TEST_CASE("squarefree split unwinds p-th powers") {
  const FqCtx* k = fq_context(5, 1);
  FqUPoly xp1 = up_make(k, {1, 1});
  FqUPoly f = {fq_one(k)};
  for (int i = 0; i < 5; ++i) f = up_mul(f, xp1, k);
  auto parts = up_squarefree(f, k);
  REQUIRE(parts.size() == 1);
  CHECK(parts[0].first == xp1);
  CHECK(parts[0].second == 5);

  FqUPoly g = up_mul(f, up_make(k, {2, 1}), k);
  parts = up_squarefree(g, k);
  REQUIRE(parts.size() == 2);
  for (const auto& [h, m] : parts) {
    if (h == xp1) CHECK(m == 5);
    if (h == up_make(k, {2, 1})) CHECK(m == 1);
  }

  const FqCtx* k7 = fq_context(7, 1);
  FqUPoly u = up_make(k7, {1, 1}), v = up_make(k7, {2, 1});
  FqUPoly h = up_mul(up_mul(u, u, k7), up_mul(v, up_mul(v, v, k7), k7), k7);
  parts = up_squarefree(h, k7);
  REQUIRE(parts.size() == 2);
  for (const auto& [w, m] : parts) CHECK(m == (w == u ? 2 : 3));
}

TEST_CASE("univariate factorization in odd characteristic") {
  const FqCtx* k = fq_context(5, 1);
  auto fac = up_factor(up_make(k, {1, 0, 1}), k);  // x^2 + 1
  REQUIRE(fac.factors.size() == 2);
  CHECK(fac.factors[0].first == up_make(k, {2, 1}));
  CHECK(fac.factors[1].first == up_make(k, {3, 1}));
  CHECK(fac.unit == fq_one(k));

  // (x^2+1)^2 (x+3) = (x+2)^2 (x+3)^3
  FqUPoly f = up_make(k, {1, 0, 1});
  f = up_mul(f, f, k);
  f = up_mul(f, up_make(k, {3, 1}), k);
  fac = up_factor(f, k);
  REQUIRE(fac.factors.size() == 2);
  CHECK(fac.factors[0].first == up_make(k, {2, 1}));
  CHECK(fac.factors[0].second == 2);
  CHECK(fac.factors[1].first == up_make(k, {3, 1}));
  CHECK(fac.factors[1].second == 3);

  fac = up_factor(up_make(k, {3, 0, 3}), k);  // 3(x^2+1)
  CHECK(fac.unit == fq_from_int(k, 3));
  CHECK(fac.factors.size() == 2);

  CHECK_THROWS_AS(up_factor({}, k), std::invalid_argument);
}

TEST_CASE("univariate factorization in characteristic two") {
  const FqCtx* k = fq_context(2, 1);
  FqUPoly a = up_make(k, {1, 1, 0, 1});  // x^3 + x + 1
  FqUPoly b = up_make(k, {1, 0, 1, 1});  // x^3 + x^2 + 1
  auto fac = up_factor(up_mul(a, b, k), k);
  REQUIRE(fac.factors.size() == 2);
  CHECK(up_product(fac.factors, fac.unit, k) == up_mul(a, b, k));
  for (const auto& [g, m] : fac.factors) {
    CHECK(updeg(g) == 3);
    CHECK(m == 1);
    CHECK(up_irreducible(g, k));
  }

  auto roots = up_roots(up_make(k, {0, 1, 1}), k);  // x^2 + x = x(x+1)
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == fq_zero(k));
  CHECK(roots[1] == fq_one(k));
}

TEST_CASE("irreducibility tests") {
  const FqCtx* k2 = fq_context(2, 1);
  CHECK(up_irreducible(up_make(k2, {1, 1, 0, 0, 1}), k2));   // x^4+x+1
  CHECK(!up_irreducible(up_make(k2, {1, 0, 1, 0, 1}), k2));  // (x^2+x+1)^2
  const FqCtx* k5 = fq_context(5, 1);
  CHECK(up_irreducible(up_make(k5, {1, 1, 1}), k5));
  CHECK(!up_irreducible(up_make(k5, {1, 0, 1}), k5));
  CHECK(up_irreducible(up_make(k5, {4, 1}), k5));
  CHECK(!up_irreducible(up_make(k5, {3}), k5));
  const FqCtx* k7 = fq_context(7, 1);
  CHECK(up_irreducible(up_make(k7, {1, 0, 1}), k7));
}

TEST_CASE("roots are sorted and complete") {
  const FqCtx* k = fq_context(7, 1);
  FqUPoly f = up_make(k, {0, 6, 0, 1});  // x^3 - x
  auto roots = up_roots(f, k);
  REQUIRE(roots.size() == 3);
  CHECK(roots[0] == fq_from_int(k, 0));
  CHECK(roots[1] == fq_from_int(k, 1));
  CHECK(roots[2] == fq_from_int(k, 6));

  const FqCtx* k5 = fq_context(5, 1);
  roots = up_roots(up_make(k5, {1, 0, 1}), k5);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == fq_from_int(k5, 2));
  CHECK(roots[1] == fq_from_int(k5, 3));
}

TEST_CASE("random univariate products over an extension field") {
  const FqCtx* k = fq_context(3, 2);
  std::mt19937_64 rng(20260817);
  int done = 0;
  for (int trial = 0; trial < 8; ++trial) {
    FqUPoly f(7, fq_zero(k));
    for (int i = 0; i < 6; ++i) f[i] = fq_from_index(k, rng() % 9);
    f[6] = fq_one(k);
    auto fac = up_factor(f, k, 7 + trial);
    CHECK(up_product(fac.factors, fac.unit, k) == f);
    int degsum = 0;
    for (const auto& [g, m] : fac.factors) {
      CHECK(up_irreducible(g, k));
      degsum += updeg(g) * m;
    }
    CHECK(degsum == 6);
    ++done;
  }
  CHECK(done == 8);
}

TEST_CASE("bivariate factorization splits a difference of squares") {
  const FqCtx* k = fq_context(7, 1);
  Poly<Fq> f = mk2(k, {{0, 2, 1}, {2, 0, 6}});  // t^2 - w^2
  auto fac = factor_poly2(f, k);
  REQUIRE(fac.factors.size() == 2);
  for (const auto& [g, m] : fac.factors) {
    CHECK(poly_degree(g) == 1);
    CHECK(m == 1);
  }
  CHECK(peq(refold(fac, 2, VarKind::Affine, k), f));
}

TEST_CASE("bivariate factorization with univariate content") {
  const FqCtx* k = fq_context(7, 1);
  Poly<Fq> c = mk2(k, {{1, 0, 1}, {0, 0, 1}});             // w + 1
  Poly<Fq> a = mk2(k, {{0, 1, 1}, {2, 0, 6}});             // t - w^2
  Poly<Fq> b = mk2(k, {{0, 2, 1}, {1, 1, 1}, {0, 0, 1}});  // t^2 + wt + 1
  Poly<Fq> f = poly_mul(poly_mul(c, a), b);
  auto fac = factor_poly2(f, k);
  REQUIRE(fac.factors.size() == 3);
  bool saw_content = false;
  for (const auto& [g, m] : fac.factors) {
    CHECK(m == 1);
    if (peq(g, c)) saw_content = true;
  }
  CHECK(saw_content);
  CHECK(peq(refold(fac, 2, VarKind::Affine, k), f));
}

TEST_CASE("bivariate p-th power") {
  const FqCtx* k = fq_context(5, 1);
  Poly<Fq> lin = mk2(k, {{1, 0, 1}, {0, 1, 1}});  // w + t
  Poly<Fq> f = poly_pow(lin, 5);
  auto fac = factor_poly2(f, k);
  REQUIRE(fac.factors.size() == 1);
  CHECK(fac.factors[0].second == 5);
  CHECK(peq(fac.factors[0].first, lin));
  CHECK(peq(refold(fac, 2, VarKind::Affine, k), f));
}

TEST_CASE("bivariate non-monic leading coefficient") {
  const FqCtx* k = fq_context(7, 1);
  Poly<Fq> a = mk2(k, {{1, 1, 1}, {0, 0, 1}});  // wt + 1
  Poly<Fq> b = mk2(k, {{0, 1, 1}, {1, 0, 1}});  // t + w
  Poly<Fq> f = poly_mul(a, b);
  auto fac = factor_poly2(f, k);
  REQUIRE(fac.factors.size() == 2);
  for (const auto& [g, m] : fac.factors) CHECK(m == 1);
  CHECK(peq(refold(fac, 2, VarKind::Affine, k), f));
}

TEST_CASE("bivariate factorization swaps into the live variable") {
  const FqCtx* k = fq_context(5, 1);
  Poly<Fq> f = mk2(k, {{2, 0, 1}, {0, 5, 4}});  // w^2 - t^5
  auto fac = factor_poly2(f, k);
  REQUIRE(fac.factors.size() == 1);
  CHECK(fac.factors[0].second == 1);
  CHECK(poly_degree(fac.factors[0].first) == 5);
  CHECK(peq(refold(fac, 2, VarKind::Affine, k), f));
}

TEST_CASE("bivariate mixed multiplicities") {
  const FqCtx* k = fq_context(7, 1);
  Poly<Fq> a = mk2(k, {{0, 1, 1}, {1, 0, 1}});  // t + w
  Poly<Fq> b = mk2(k, {{0, 1, 1}, {2, 0, 1}});  // t + w^2
  Poly<Fq> f = poly_mul(poly_pow(a, 2), poly_pow(b, 3));
  auto fac = factor_poly2(f, k);
  REQUIRE(fac.factors.size() == 2);
  for (const auto& [g, m] : fac.factors) {
    if (peq(g, a)) CHECK(m == 2);
    if (peq(g, b)) CHECK(m == 3);
  }
  CHECK(peq(refold(fac, 2, VarKind::Affine, k), f));

  CHECK_THROWS_AS(factor_poly2(Poly<Fq>{3, VarKind::Affine, {}}, k),
                  std::invalid_argument);
}

TEST_CASE("exact division accepts factors and rejects non-factors") {
  const FqCtx* k = fq_context(7, 1);
  Poly<Fq> f = mk2(k, {{0, 2, 1}, {2, 0, 6}});     // t^2 - w^2
  Poly<Fq> g = mk2(k, {{0, 1, 1}, {1, 0, 1}});     // t + w
  Poly<Fq> h = mk2(k, {{0, 1, 1}, {0, 0, 1}});     // t + 1
  Poly<Fq> want = mk2(k, {{0, 1, 1}, {1, 0, 6}});  // t - w
  auto quo = poly_div_exact(f, g, k);
  REQUIRE(quo.has_value());
  CHECK(peq(*quo, want));
  CHECK(!poly_div_exact(f, h, k).has_value());
}

TEST_CASE("ternary form factorization") {
  const FqCtx* k = fq_context(7, 1);
  // x2^2 (x0^2 + x1 x2)
  Poly<Fq> F = mk3(k, {{2, 0, 2, 1}, {0, 1, 3, 1}});
  auto fac = factor_ternary_form(F, k);
  REQUIRE(fac.factors.size() == 2);
  Poly<Fq> x2 = mk3(k, {{0, 0, 1, 1}});
  Poly<Fq> conic = mk3(k, {{2, 0, 0, 1}, {0, 1, 1, 1}});
  for (const auto& [g, m] : fac.factors) {
    if (peq(g, x2)) CHECK(m == 2);
    if (peq(g, conic)) CHECK(m == 1);
    CHECK((peq(g, x2) || peq(g, conic)));
  }
  CHECK(peq(refold(fac, 3, VarKind::Projective, k), F));

  // not homogeneous
  CHECK_THROWS_AS(factor_ternary_form(mk3(k, {{1, 0, 0, 1}, {0, 0, 0, 1}}), k),
                  std::invalid_argument);
}

TEST_CASE("absolute factorization certifies or reports the obstruction") {
  // x0^2 + x1^2 splits over F_5 already (-1 is a square)
  Poly<Fp> F5 = poly_reduce_p(
      poly_q_to_z_primitive(parse_poly("x0^2 + x1^2", 3)), 5);
  auto a5 = absolute_factor_form(F5, 8);
  CHECK(a5.ok);
  CHECK(a5.e == 1);
  REQUIRE(a5.factors.size() == 2);
  for (const auto& [g, m] : a5.factors) CHECK(poly_degree(g) == 1);

  // over F_7 it needs the quadratic extension
  Poly<Fp> F7 = poly_reduce_p(
      poly_q_to_z_primitive(parse_poly("x0^2 + x1^2", 3)), 7);
  auto a7 = absolute_factor_form(F7, 8);
  CHECK(a7.ok);
  CHECK(a7.e == 2);
  CHECK(a7.factors.size() == 2);

  // capping the extension level leaves it inconclusive
  auto capped = absolute_factor_form(F7, 1);
  CHECK(!capped.ok);
  CHECK(!capped.note.empty());
  CHECK(capped.e == 1);
  REQUIRE(capped.factors.size() == 1);
  CHECK(capped.factors[0].first.t.size() == 2);

  // char 2: the same form is a perfect square of a line
  Poly<Fp> F2 = poly_reduce_p(
      poly_q_to_z_primitive(parse_poly("x0^2 + x1^2", 3)), 2);
  auto a2 = absolute_factor_form(F2, 8);
  CHECK(a2.ok);
  CHECK(a2.e == 1);
  REQUIRE(a2.factors.size() == 1);
  CHECK(a2.factors[0].second == 2);
  CHECK(poly_degree(a2.factors[0].first) == 1);

  // a smooth conic stays irreducible over every extension
  Poly<Fp> C = poly_reduce_p(
      poly_q_to_z_primitive(parse_poly("x0*x2 - x1^2", 3)), 5);
  auto ac = absolute_factor_form(C, 8);
  CHECK(ac.ok);
  REQUIRE(ac.factors.size() == 1);
  CHECK(ac.factors[0].second == 1);
  CHECK(poly_degree(ac.factors[0].first) == 2);
}
