#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "detcount/enumerate.hpp"
#include "detcount/zmodel.hpp"

using namespace detcount;

namespace {

std::vector<Poly<mpz_class>> as_z(const std::vector<std::string>& ss, int nvars) {
  std::vector<Poly<mpz_class>> out;
  for (const auto& s : ss) out.push_back(poly_q_to_z_primitive(parse_poly(s, nvars)));
  return out;
}

std::vector<mpz_class> zc(std::initializer_list<long> v) {
  return std::vector<mpz_class>(v.begin(), v.end());
}

}  // namespace

TEST_CASE("univariate integer roots: closed forms and scan") {
  auto r = integer_roots_in_range(zc({0}), 10);
  CHECK(r.whole_range);
  r = integer_roots_in_range(zc({-6, 2}), 10);
  CHECK(r.roots == std::vector<long>{3});
  r = integer_roots_in_range(zc({-5, 2}), 10);
  CHECK(r.roots.empty());
  r = integer_roots_in_range(zc({-4, 0, 1}), 10);
  CHECK(r.roots == std::vector<long>{-2, 2});
  r = integer_roots_in_range(zc({1, 0, 1}), 10);
  CHECK(r.roots.empty());
  r = integer_roots_in_range(zc({-2, 0, 1}), 10);
  CHECK(r.roots.empty());  // sqrt(2) is not rational
  r = integer_roots_in_range(zc({1, -4, 4}), 10);
  CHECK(r.roots.empty());  // double root at 1/2
  r = integer_roots_in_range(zc({-16, 0, 0, 0, 1}), 10);
  CHECK(r.roots == std::vector<long>{-2, 2});
  r = integer_roots_in_range(zc({8, 0, 0, 1}), 10);
  CHECK(r.roots == std::vector<long>{-2});
  r = integer_roots_in_range(zc({-7, 0, 0, 1}), 10);
  CHECK(r.roots.empty());
  r = integer_roots_in_range(zc({4, -4, -1, 1}), 10);  // (t-1)(t-2)(t+2)
  CHECK(r.roots == std::vector<long>{-2, 1, 2});
  r = integer_roots_in_range(zc({0, -1, 0, 1}), 10);  // t(t-1)(t+1)
  CHECK(r.roots == std::vector<long>{-1, 0, 1});
  // range clipping
  r = integer_roots_in_range(zc({-36, 0, 1}), 5);
  CHECK(r.roots.empty());
}

TEST_CASE("projective kernel matches the reference box scan") {
  struct Fixture {
    std::vector<std::string> gens;
    int nvars;
    long B;
  };
  std::vector<Fixture> fixtures = {
      {{"x0*x2 - x1^2"}, 3, 10},
      {{"x0*x2 - x1^2", "x0*x3 - x1*x2", "x1*x3 - x2^2"}, 4, 8},
      {{"x0^3*x3 - x1^4 + x2^4"}, 4, 5},
      {{"x0^4 + x1^4 + x2^4 - x3^4"}, 4, 6},
      {{"x0*x2 - x1^2"}, 4, 4},  // cone: no constraint on the last coordinate
  };
  for (const auto& fx : fixtures) {
    auto gens = as_z(fx.gens, fx.nvars);
    auto ref = projective_points_reference(gens, fx.B);
    EnumOptions opt;
    opt.B = fx.B;
    auto got = projective_points(gens, opt);
    CHECK(got.points == ref);
    for (const auto& p : got.points) {
      CHECK(is_primitive(p));
      int lead = 0;
      while (lead < (int)p.x.size() && p.x[lead] == 0) ++lead;
      REQUIRE(lead < (int)p.x.size());
      CHECK(p.x[lead] > 0);
    }
  }
}

TEST_CASE("conic height-one points by hand") {
  auto gens = as_z({"x0*x2 - x1^2"}, 3);
  EnumOptions opt;
  opt.B = 1;
  auto got = projective_points(gens, opt);
  REQUIRE(got.points.size() == 4);
  CHECK(point_str(got.points[0]) == "(0,0,1)");
  CHECK(point_str(got.points[1]) == "(1,-1,1)");
  CHECK(point_str(got.points[2]) == "(1,0,0)");
  CHECK(point_str(got.points[3]) == "(1,1,1)");
}

TEST_CASE("affine kernel matches the reference box scan") {
  auto gens = as_z({"y1^2 + y2^2 - y3^2"}, 3);
  EnumOptions opt;
  opt.B = 12;
  auto got = affine_points(gens, opt);
  auto ref = affine_points_reference(gens, 12);
  CHECK(got.points == ref);

  auto two = as_z({"y1*y2 - y3", "y1 + y2 + y3"}, 3);
  opt.B = 9;
  CHECK(affine_points(two, opt).points == affine_points_reference(two, 9));
}

TEST_CASE("x0 restriction drops the hyperplane at infinity") {
  auto gens = as_z({"x0*x2 - x1^2"}, 3);
  EnumOptions all, aff;
  all.B = aff.B = 15;
  aff.x0_nonzero = true;
  auto a = projective_points(gens, all);
  auto b = projective_points(gens, aff);
  std::vector<IntPoint> manual;
  for (const auto& p : a.points)
    if (p.x[0] != 0) manual.push_back(p);
  CHECK(b.points == manual);
}

TEST_CASE("congruence class filter agrees with post-hoc filtering") {
  auto gens = as_z({"x0*x2 - x1^2", "x0*x3 - x1*x2", "x1*x3 - x2^2"}, 4);
  const FqCtx* k5 = fq_context(5, 1);
  auto ref = projective_points_reference(gens, 12);

  EnumOptions opt;
  opt.B = 12;
  opt.p = 5;
  opt.class_rep = {1, 1, 1, 1};
  auto got = projective_points(gens, opt);

  std::vector<IntPoint> manual;
  for (const auto& pt : ref) {
    auto sp = specialize_point(pt, k5);
    REQUIRE(sp.has_value());
    bool match = true;
    for (int i = 0; i < 4; ++i)
      if (!((*sp)[i] == fq_from_int(k5, (long long)opt.class_rep[i]))) match = false;
    if (match) manual.push_back(pt);
  }
  CHECK(got.points == manual);
  CHECK(got.outer_candidates < (uint64_t)25 * 25 * 25);  // residue-restricted loops
}

TEST_CASE("classes of the reduction partition the point set") {
  auto model = make_model({parse_poly("x0*x2 - x1^2", 4), parse_poly("x0*x3 - x1*x2", 4),
                           parse_poly("x1*x3 - x2^2", 4)});
  const FqCtx* k5 = fq_context(5, 1);
  auto classes = points_on_reduction(reduce_model_fq(model, k5), k5);
  REQUIRE(classes.points.size() == 6);
  auto all = projective_points_reference(model.gens, 12);
  size_t total = 0;
  for (const auto& cl : classes.points) {
    EnumOptions opt;
    opt.B = 12;
    opt.p = 5;
    for (const auto& c : cl) opt.class_rep.push_back(fq_index(c));
    total += projective_points(model.gens, opt).points.size();
  }
  CHECK(total == all.size());
}

TEST_CASE("work cap aborts enumeration") {
  auto gens = as_z({"x0^4 + x1^4 + x2^4 - x3^4"}, 4);
  EnumOptions opt;
  opt.B = 20;
  opt.work_cap = 100;
  CHECK_THROWS_AS(projective_points(gens, opt), WorkCapExceeded);
}

TEST_CASE("sharded parallel kernel returns the serial answer") {
  auto gens = as_z({"x0*x2 - x1^2", "x0*x3 - x1*x2", "x1*x3 - x2^2"}, 4);
  EnumOptions serial, par;
  serial.B = par.B = 10;
  par.threads = 2;
  auto a = projective_points(gens, serial);
  auto b = projective_points(gens, par);
  CHECK(a.points == b.points);
}

TEST_CASE("fibration count equals the point count") {
  auto f = poly_q_to_z_primitive(parse_poly("y1*y2 - y3", 3));
  EnumOptions opt;
  opt.B = 10;
  auto byfiber = fibration_count(f, opt);
  auto direct = affine_points({f}, opt);
  CHECK(byfiber.count == (long)direct.points.size());
  CHECK(byfiber.degenerate_fibers == 0);

  // product form: the diagonal slices are whole lines
  auto g = poly_q_to_z_primitive(parse_poly("y1*y3 - y2*y3", 3));
  auto fc = fibration_count(g, opt);
  auto dc = affine_points({g}, opt);
  CHECK(fc.count == (long)dc.points.size());
  CHECK(fc.degenerate_fibers == 21);
  CHECK(!fc.bad_slices.empty());
  CHECK(fc.bad_slices[0].first == fc.bad_slices[0].second);

  // no dependence on the fiber coordinate at all
  auto h = poly_q_to_z_primitive(parse_poly("y1^2 + y2^2", 3));
  auto hc = fibration_count(h, opt);
  CHECK(hc.count == 21);
  CHECK(hc.degenerate_fibers == 1);
  REQUIRE(hc.bad_slices.size() == 1);
  CHECK(hc.bad_slices[0] == std::pair<long, long>(0, 0));
}

TEST_CASE("affine residue filter restricts to one congruence class") {
  auto f = as_z({"y1 + y2 + y3"}, 3);
  EnumOptions opt;
  opt.B = 10;
  opt.p = 7;
  opt.residues = {1, 2, 4};
  auto got = affine_points(f, opt);
  auto ref = affine_points_reference(f, 10);
  std::vector<IntPoint> manual;
  for (const auto& pt : ref) {
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
      mpz_class r = pt.x[i] % 7;
      if (r < 0) r += 7;
      if (r != (long)opt.residues[i]) ok = false;
    }
    if (ok) manual.push_back(pt);
  }
  CHECK(got.points == manual);
}

TEST_CASE("curve chart count by double slicing") {
  // coordinate line: one free chart coordinate
  auto line = as_z({"x2", "x3"}, 4);
  EnumOptions opt;
  opt.B = 7;
  auto lc = curve_fibration_count(line, opt);
  CHECK(lc.count == 15);

  // twisted cubic: chart points are (1, t, t^2, t^3)
  auto tc = as_z({"x0*x2 - x1^2", "x0*x3 - x1*x2", "x1*x3 - x2^2"}, 4);
  opt.B = 5;
  std::vector<IntPoint> got;
  auto cc = curve_fibration_count(tc, opt, &got);
  CHECK(cc.count == 3);
  // oracle: the plain affine kernel on the dehomogenized system
  std::vector<Poly<mpz_class>> aff;
  for (auto& g : tc) aff.push_back(poly_dehomogenize(g, 0));
  auto ref = affine_points(aff, opt);
  CHECK(mpz_class((long)ref.points.size()) == cc.count);
  REQUIRE(got.size() == 3);
  for (auto& pt : got) {
    CHECK(pt.x[0] == 1);
    CHECK(pt.x[2] == pt.x[1] * pt.x[1]);
    CHECK(pt.x[3] == pt.x[1] * pt.x[1] * pt.x[1]);
  }

  // plane conic in P^3
  auto conic = as_z({"x3", "x0*x2 - x1^2"}, 4);
  opt.B = 10;
  auto nc = curve_fibration_count(conic, opt);
  CHECK(nc.count == 7);
  std::vector<Poly<mpz_class>> caff;
  for (auto& g : conic) caff.push_back(poly_dehomogenize(g, 0));
  CHECK(mpz_class((long)affine_points(caff, opt).points.size()) == nc.count);

  // congruence class filter
  opt.B = 5;
  opt.p = 3;
  opt.residues = {1, 1, 1};
  auto fc = curve_fibration_count(tc, opt);
  CHECK(fc.count == 1);

  // degenerate fibers: a plane component turns whole fiber lines on
  auto planey = as_z({"x3*x2", "x3*(x1 - x2)"}, 4);
  EnumOptions opt2;
  opt2.B = 2;
  std::vector<IntPoint> pl;
  auto pc = curve_fibration_count(planey, opt2, &pl);
  CHECK(pc.count == 29);
  CHECK(pc.degenerate_fibers == 5);
  CHECK(mpz_class((long)pl.size()) == pc.count);
  std::vector<Poly<mpz_class>> paff;
  for (auto& g : planey) paff.push_back(poly_dehomogenize(g, 0));
  CHECK(mpz_class((long)affine_points(paff, opt2).points.size()) == pc.count);
}
