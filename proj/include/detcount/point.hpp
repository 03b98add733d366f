#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "detcount/poly.hpp"

namespace detcount {

// Integer tuple; projective uses call it with the primitive sign-normalized
// representative (gcd 1, first nonzero coordinate positive).
struct IntPoint {
  std::vector<mpz_class> x;
};

inline bool operator==(const IntPoint& a, const IntPoint& b) { return a.x == b.x; }

inline bool operator<(const IntPoint& a, const IntPoint& b) {
  if (a.x.size() != b.x.size()) return a.x.size() < b.x.size();
  for (size_t i = 0; i < a.x.size(); ++i)
    if (a.x[i] != b.x[i]) return a.x[i] < b.x[i];
  return false;
}

inline mpz_class point_content(const IntPoint& p) {
  mpz_class g = 0;
  for (auto& c : p.x) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;
}

inline IntPoint make_primitive(IntPoint p) {
  mpz_class g = point_content(p);
  if (g == 0) return p;  // zero tuple stays zero
  for (auto& c : p.x) c /= g;
  for (auto& c : p.x) {
    if (c == 0) continue;
    if (c < 0)
      for (auto& d : p.x) d = -d;
    break;
  }
  return p;
}

inline bool is_primitive(const IntPoint& p) { return point_content(p) == 1; }

inline mpz_class point_height(const IntPoint& p) {
  mpz_class h = 0;
  for (auto& c : p.x) {
    mpz_class a = abs(c);
    if (a > h) h = a;
  }
  return h;
}

inline mpz_class evaluate_at_point(const Poly<mpz_class>& f, const IntPoint& p) {
  return poly_evaluate(f, p.x);
}

inline std::string point_str(const IntPoint& p) {
  std::string s = "(";
  for (size_t i = 0; i < p.x.size(); ++i) {
    if (i) s += ",";
    s += p.x[i].get_str();
  }
  return s + ")";
}

IntPoint parse_point(const std::string& text);

}  // namespace detcount
