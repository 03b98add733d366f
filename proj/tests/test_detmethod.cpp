#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "detcount/detmethod.hpp"

using namespace detcount;

namespace {

IntegralModel conic() { return make_model({parse_poly("x0*x2 - x1^2", 3)}); }
IntegralModel nodal_cubic() {
  return make_model({parse_poly("x1^2*x2 - x0^3 - x0^2*x2", 3)});
}
IntegralModel three_lines() { return make_model({parse_poly("x0^2*x1 - x0*x1^2", 3)}); }
IntegralModel plane_line() { return make_model({parse_poly("x2", 3)}); }

GroebnerBasis<mpq_class> basis_of(const IntegralModel& m) {
  std::vector<Poly<mpq_class>> q;
  for (const auto& g : m.gens) q.push_back(poly_z_to_q(g));
  return buchberger(q, TermOrder{OrderKind::GRevLex, 0});
}

IntPoint pt(std::vector<long> c) {
  IntPoint p;
  for (long v : c) p.x.emplace_back(v);
  return p;
}

bool poly_eq(const Poly<mpz_class>& a, const Poly<mpz_class>& b) {
  return poly_sub(a, b).t.empty();
}

}  // namespace

TEST_CASE("degree selection matches the staircase counts") {
  auto gb = basis_of(conic());
  // h(k) = 2k + 1
  CHECK(select_degree(gb, 1) == 1);
  CHECK(select_degree(gb, 3) == 1);
  CHECK(select_degree(gb, 4) == 2);
  CHECK(select_degree(gb, 5) == 2);
  CHECK(select_degree(gb, 6) == 3);

  auto quartic = make_model({parse_poly("x0^4 + x1^4 + x2^4 - x3^4", 4)});
  auto gbq = basis_of(quartic);
  // h(3) = 20 < 34 <= h(4) = 34
  CHECK(select_degree(gbq, 34) == 4);
  CHECK(select_degree(gbq, 20) == 3);
  CHECK(select_degree(gbq, 21) == 4);
  CHECK(select_degree(gbq, 1) == 1);
}

TEST_CASE("degree selection is consistent over the whole range") {
  for (const auto& m : {conic(), nodal_cubic()}) {
    auto gb = basis_of(m);
    int k_cap = 7;
    long top = hilbert_function(gb, k_cap);
    for (int s = 1; s <= top; ++s) {
      int k = select_degree(gb, s, k_cap);
      CHECK(hilbert_function(gb, k) >= s);
      if (s == 1)
        CHECK(k == 1);
      else
        CHECK(hilbert_function(gb, k - 1) < s);
    }
  }
}

TEST_CASE("degree selection fails for a zero-dimensional staircase") {
  auto m = make_model({parse_poly("x1", 3), parse_poly("x2", 3)});
  auto gb = basis_of(m);
  CHECK(select_degree(gb, 1) == 1);
  CHECK_THROWS(select_degree(gb, 2, 10));
}

TEST_CASE("evaluation matrix holds exact monomial values") {
  auto gb = basis_of(plane_line());
  auto mons = smallest_standard_monomials(gb, 2, 3);
  // staircase of (x2) at degree 2, ascending: x0^2, x0 x1, x1^2
  std::vector<IntPoint> pts = {pt({1, 0, 0}), pt({1, 7, 0}), pt({1, 14, 0})};
  EvalMatrix em = build_eval_matrix(pts, mons);
  REQUIRE(em.entries.rows == 3);
  REQUIRE(em.entries.cols == 3);
  for (int i = 0; i < 3; ++i) {
    long t = 7 * i;
    CHECK(em.entries.at(i, 0) == 1);
    CHECK(em.entries.at(i, 1) == t);
    CHECK(em.entries.at(i, 2) == t * t);
  }
}

TEST_CASE("determinant valuation basics") {
  mpz_class p(7);
  Mat<mpz_class> id(3, 3, mpz_class(0));
  for (int i = 0; i < 3; ++i) id.at(i, i) = 1;
  auto dv = det_valuation(id, p);
  CHECK(dv.det == 1);
  CHECK(!dv.infinite);
  CHECK(dv.v == 0);

  // Vandermonde rows at arguments all congruent mod p: every difference is
  // divisible by p, so v >= s(s-1)/2.
  std::vector<long> args = {3, 10, 24, 31, 45};
  int s = (int)args.size();
  Mat<mpz_class> vand(s, s, mpz_class(0));
  for (int i = 0; i < s; ++i) {
    mpz_class pw = 1;
    for (int j = 0; j < s; ++j) {
      vand.at(i, j) = pw;
      pw *= args[i];
    }
  }
  auto dvv = det_valuation(vand, p);
  CHECK(!dvv.infinite);
  CHECK(dvv.v >= s * (s - 1) / 2);

  Mat<mpz_class> rep(2, 2, mpz_class(0));
  rep.at(0, 0) = 2;
  rep.at(0, 1) = 3;
  rep.at(1, 0) = 2;
  rep.at(1, 1) = 3;
  auto dvr = det_valuation(rep, p);
  CHECK(dvr.infinite);
  CHECK(dvr.det == 0);
}

TEST_CASE("lambda bound from growth sequences") {
  // smooth point on a curve: g = 1,1,1,... gives Lambda(s) = s(s-1)/2
  std::vector<long> smooth(20, 1);
  for (int s = 1; s <= 12; ++s) CHECK(lambda_bound(smooth, s) == s * (s - 1) / 2);

  // node: g = 1,2,2,2,... gives n = 0,1,1,2,2,3,3,...
  std::vector<long> node = {1, 2, 2, 2, 2, 2, 2};
  std::vector<int> n;
  CHECK(lambda_bound(node, 4, &n) == 4);
  CHECK(n == std::vector<int>({0, 1, 1, 2}));
  CHECK(lambda_bound(node, 7) == 0 + 1 + 1 + 2 + 2 + 3 + 3);

  // smooth point on a surface: g(k) = k+1 gives n = 0,1,1,2,2,2,...
  std::vector<long> surf = {1, 2, 3, 4, 5};
  CHECK(lambda_bound(surf, 6) == 8);
  CHECK(lambda_bound(surf, 1) == 0);

  CHECK_THROWS(lambda_bound(std::vector<long>{1, 1}, 3));
}

TEST_CASE("divisibility certificate for collinear points") {
  auto m = plane_line();
  // all congruent to (1,0,0) mod 7
  std::vector<IntPoint> pts = {pt({1, 0, 0}), pt({1, 7, 0}), pt({1, 14, 0})};
  auto cert = verify_divisibility(m, 7, {1, 0, 0}, pts);
  CHECK(cert.s == 3);
  CHECK(cert.k == 2);
  CHECK(cert.lambda == 3);  // smooth point: 0 + 1 + 2
  CHECK(!cert.det_zero);
  // det is Vandermonde in 0, 7, 14: 7 * 14 * 7 = 2 * 7^3
  CHECK(cert.valuation == 3);
  CHECK(cert.ok);
  CHECK(cert.mu == 1);
  CHECK(cert.mu_stable);
  CHECK(cert.n_seq == std::vector<int>({0, 1, 2}));
}

TEST_CASE("divisibility certificate at a node") {
  auto m = nodal_cubic();
  EnumOptions opt;
  opt.B = 60;
  opt.p = 5;
  opt.class_rep = {0, 0, 1};
  auto res = projective_points(m.gens, opt);
  REQUIRE((int)res.points.size() >= 4);
  std::vector<IntPoint> pts(res.points.begin(), res.points.begin() + 4);
  auto cert = verify_divisibility(m, 5, {0, 0, 1}, pts);
  CHECK(cert.s == 4);
  CHECK(cert.mu == 2);
  CHECK(cert.mu_stable);
  CHECK(cert.lambda == 4);  // n-sequence 0,1,1,2 at a double point
  CHECK(cert.ok);
  if (!cert.det_zero) CHECK(cert.valuation >= 4);
  CHECK(!cert.predictor.empty());
}

TEST_CASE("divisibility with a single point passes") {
  auto m = nodal_cubic();
  auto cert = verify_divisibility(m, 5, {0, 0, 1}, {pt({0, 0, 1})});
  CHECK(cert.s == 1);
  CHECK(cert.lambda == 0);
  CHECK(cert.ok);
}

TEST_CASE("divisibility precondition violations throw") {
  auto m = plane_line();
  // off the model
  CHECK_THROWS_AS(verify_divisibility(m, 7, {1, 0, 0}, {pt({1, 0, 1})}),
                  std::invalid_argument);
  // wrong congruence class
  CHECK_THROWS_AS(verify_divisibility(m, 7, {1, 0, 0}, {pt({1, 1, 0})}),
                  std::invalid_argument);
  // non-primitive point
  CHECK_THROWS_AS(verify_divisibility(m, 7, {1, 0, 0}, {pt({2, 14, 0})}),
                  std::invalid_argument);
  // no points at all
  CHECK_THROWS_AS(verify_divisibility(m, 7, {1, 0, 0}, {}), std::invalid_argument);
}

TEST_CASE("divisibility holds over randomized configurations") {
  struct Fixture {
    IntegralModel m;
    std::vector<uint64_t> class_rep;
    long mu;
  };
  std::vector<std::pair<Fixture, std::vector<uint64_t>>> pool;

  std::vector<Fixture> fixtures;
  fixtures.push_back({conic(), {1, 1, 1}, 1});
  fixtures.push_back({nodal_cubic(), {0, 0, 1}, 2});
  fixtures.push_back({three_lines(), {0, 0, 1}, 3});

  std::mt19937_64 rng(20240817);
  int checked = 0;
  for (const auto& fx : fixtures) {
    for (uint64_t p : {5ull, 7ull}) {
      EnumOptions opt;
      opt.B = fx.m.d >= 3 ? 70 : 40;
      opt.p = p;
      opt.class_rep = fx.class_rep;
      auto res = projective_points(fx.m.gens, opt);
      if (res.points.size() < 2) continue;
      std::vector<IntPoint> pts = res.points;
      std::shuffle(pts.begin(), pts.end(), rng);
      int s = (int)std::min<size_t>(12, pts.size());
      std::uniform_int_distribution<int> pick(2, s);
      for (int trial = 0; trial < 2; ++trial) {
        int take = pick(rng);
        std::vector<IntPoint> sel(pts.begin(), pts.begin() + take);
        auto cert = verify_divisibility(fx.m, p, fx.class_rep, sel);
        CHECK(cert.ok);
        if (!cert.det_zero) CHECK(cert.valuation >= cert.lambda);
        if (cert.mu_stable) CHECK(cert.mu == fx.mu);
        ++checked;
      }
    }
  }
  CHECK(checked >= 8);
}

TEST_CASE("condition check examples") {
  // no primes, unit bounds: both sides are empty products
  std::vector<mpq_class> a = {mpq_class(1, 2), mpq_class(1, 6), mpq_class(1, 6),
                              mpq_class(1, 6)};
  auto empty = condition_check({}, {mpz_class(1), mpz_class(1), mpz_class(1), mpz_class(1)},
                               a, 1, 4, mpq_class(1, 10));
  CHECK(empty.ok);
  CHECK(empty.margin == doctest::Approx(0.0));

  // curve case: bounds (1, B, B, B), one prime just above B^((1+eps)/2)
  mpz_class B("10000");
  std::vector<mpz_class> bounds = {mpz_class(1), B, B, B};
  BigFloat thr = BigFloat::pow(BigFloat(B), BigFloat(mpq_class(11, 20)));
  auto primes = prime_window(thr, 1);
  REQUIRE(primes.size() == 1);
  auto good = condition_check({{primes[0], 1}}, bounds, a, 1, 4, mpq_class(1, 10));
  CHECK(good.ok);
  CHECK(good.margin > 0.0);

  // tiny prime, huge box: fails with a negative margin
  mpz_class big("1000000");
  std::vector<mpz_class> bounds2 = {mpz_class(1), big, big, big};
  auto bad = condition_check({{mpz_class(2), 1}}, bounds2, a, 1, 4, mpq_class(1, 10));
  CHECK(!bad.ok);
  CHECK(bad.margin < 0.0);
}

TEST_CASE("condition check rejects bad inputs") {
  CHECK_THROWS(condition_check({}, {mpz_class(1)}, {}, 1, 4, mpq_class(1, 10)));
  CHECK_THROWS(condition_check({}, {mpz_class(1)}, {mpq_class(1)}, 0, 4, mpq_class(1, 10)));
  CHECK_THROWS(
      condition_check({{mpz_class(1), 1}}, {mpz_class(1)}, {mpq_class(1)}, 1, 4, mpq_class(0)));
}

TEST_CASE("auxiliary form for the full conic point set") {
  auto m = conic();
  auto cert = aux_form(m, 10, 0, {});
  CHECK(cert.s == 16);
  CHECK(cert.k == 8);
  CHECK(cert.rank == 16);  // points on a conic impose independent conditions
  CHECK(!cert.empty_class);
  CHECK(cert.nf_nonzero);
  CHECK(cert.vanishes_on_points);
  CHECK(poly_degree(cert.G) == 8);
  CHECK(cert.exponent_convention == std::string("(d/mu)^(1/r)"));
  // the form is primitive with positive leading sign
  mpz_class content = 0;
  for (const auto& tm : cert.G.t) content = gcd(content, tm.second);
  CHECK(content == 1);
}

TEST_CASE("auxiliary form from a single point is linear") {
  auto m = conic();
  auto cert = aux_form(m, 4, 5, {1, 1, 1});
  CHECK(cert.s == 1);
  CHECK(cert.k == 1);
  CHECK(cert.rank == 1);
  auto expect = poly_q_to_z_primitive(parse_poly("x0 - x1", 3));
  CHECK(poly_eq(cert.G, expect));
  CHECK(cert.mu == 1);
  CHECK(cert.nf_nonzero);
}

TEST_CASE("auxiliary form for an empty class") {
  auto m = conic();
  auto cert = aux_form(m, 3, 5, {1, 2, 4});
  CHECK(cert.empty_class);
  CHECK(cert.s == 0);
  CHECK(cert.k == 1);
  auto expect = poly_q_to_z_primitive(parse_poly("x0", 3));
  CHECK(poly_eq(cert.G, expect));
  CHECK(cert.nf_nonzero);
  CHECK(cert.vanishes_on_points);
}

TEST_CASE("auxiliary form from supplied points matches the enumerating route") {
  auto m = nodal_cubic();
  EnumOptions opt;
  opt.B = 30;
  opt.p = 5;
  opt.class_rep = {0, 0, 1};
  auto res = projective_points(m.gens, opt);
  auto direct = aux_form(m, 30, 5, {0, 0, 1});
  auto fed = aux_form_for_points(m, 30, 5, {0, 0, 1}, res.points);
  CHECK(fed.s == direct.s);
  CHECK(fed.k == direct.k);
  CHECK(fed.rank == direct.rank);
  CHECK(poly_eq(fed.G, direct.G));
  CHECK(fed.mu == direct.mu);
  CHECK(fed.class_point == direct.class_point);
  CHECK(fed.condition_margin == direct.condition_margin);

  // classless route as well
  auto m2 = conic();
  EnumOptions opt2;
  opt2.B = 10;
  auto res2 = projective_points(m2.gens, opt2);
  auto d2 = aux_form(m2, 10, 0, {});
  auto f2 = aux_form_for_points(m2, 10, 0, {}, res2.points);
  CHECK(poly_eq(f2.G, d2.G));
  CHECK(f2.rank == d2.rank);

  // empty list is the designated empty-class certificate
  auto e = aux_form_for_points(m2, 3, 5, {1, 2, 4}, {});
  CHECK(e.empty_class);
  CHECK(poly_eq(e.G, poly_q_to_z_primitive(parse_poly("x0", 3))));

  CHECK_THROWS_AS(aux_form_for_points(m2, 0, 0, {}, res2.points), std::invalid_argument);
}

TEST_CASE("auxiliary form certificates re-verify") {
  auto m = nodal_cubic();
  auto cert = aux_form(m, 30, 5, {0, 0, 1});
  REQUIRE(cert.s >= 1);
  auto gb = basis_of(m);
  CHECK(!normal_form(poly_z_to_q(cert.G), gb).t.empty());
  EnumOptions opt;
  opt.B = 30;
  opt.p = 5;
  opt.class_rep = {0, 0, 1};
  auto res = projective_points(m.gens, opt);
  REQUIRE((int)res.points.size() == cert.s);
  for (const auto& q : res.points) CHECK(evaluate_at_point(cert.G, q) == 0);
  CHECK(cert.mu == 2);
}

TEST_CASE("prime windows") {
  auto w = prime_window(BigFloat(10.0), 3);
  REQUIRE(w.size() == 3);
  CHECK(w[0] == 11);
  CHECK(w[1] == 13);
  CHECK(w[2] == 17);

  // 1000^(0.55) is about 44.7, so the window starts at 47
  BigFloat thr = BigFloat::pow(BigFloat(mpz_class(1000)), BigFloat(mpq_class(11, 20)));
  auto w2 = prime_window(thr, 1);
  REQUIRE(w2.size() == 1);
  CHECK(w2[0] == 47);

  auto w3 = prime_window(BigFloat(2.0), 5);
  CHECK(w3 == std::vector<mpz_class>({mpz_class(2), mpz_class(3), mpz_class(5), mpz_class(7),
                                      mpz_class(11)}));

  auto w4 = prime_window(BigFloat(0.5), 2);
  CHECK(w4[0] == 2);
  CHECK(w4[1] == 3);
}
