#include "detcount/poly.hpp"

#include <cctype>
#include <sstream>

#include "detcount/point.hpp"

namespace detcount {

std::vector<Monomial> monomials_of_degree(int nvars, int k) {
  std::vector<Monomial> out;
  std::vector<int32_t> cur(nvars, 0);
  // lexicographic descent on exponents produces graded-lex descending order
  auto rec = [&](auto&& self, int pos, int rem) -> void {
    if (pos == nvars - 1) {
      cur[pos] = rem;
      out.push_back(mon_make(cur));
      cur[pos] = 0;
      return;
    }
    for (int e = rem; e >= 0; --e) {
      cur[pos] = e;
      self(self, pos + 1, rem - e);
    }
    cur[pos] = 0;
  };
  if (nvars == 0) {
    if (k == 0) out.push_back(mon_one(0));
    return out;
  }
  rec(rec, 0, k);
  return out;
}

Poly<mpz_class> poly_q_to_z_primitive(const Poly<mpq_class>& f) {
  Poly<mpz_class> r{f.nvars, f.vk, {}};
  if (f.t.empty()) return r;
  mpz_class den = 1;
  for (auto& tm : f.t) {
    mpz_class d = tm.second.get_den();
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
    den = den / g * d;
  }
  for (auto& tm : f.t) {
    mpq_class c = tm.second * mpq_class(den);
    r.t.push_back({tm.first, c.get_num()});
  }
  poly_normalize(r);
  return poly_primitive_part(r);
}

Poly<mpz_class> poly_primitive_part(const Poly<mpz_class>& f) {
  if (f.t.empty()) return f;
  mpz_class g = 0;
  for (auto& tm : f.t) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), tm.second.get_mpz_t());
  Poly<mpz_class> r = f;
  for (auto& tm : r.t) tm.second /= g;
  if (sgn(r.t.front().second) < 0)
    for (auto& tm : r.t) tm.second = -tm.second;
  return r;
}

mpz_class poly_height(const Poly<mpz_class>& f) {
  Poly<mpz_class> pf = poly_primitive_part(f);
  mpz_class h = 0;
  for (auto& tm : pf.t) {
    mpz_class a = abs(tm.second);
    if (a > h) h = a;
  }
  return h;
}

namespace {

std::string var_name(VarKind vk, int i) {
  return vk == VarKind::Projective ? "x" + std::to_string(i) : "y" + std::to_string(i + 1);
}

std::string mon_str(const Monomial& m, VarKind vk) {
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < m.e.size(); ++i) {
    if (!m.e[i]) continue;
    if (!first) os << "*";
    first = false;
    os << var_name(vk, (int)i);
    if (m.e[i] > 1) os << "^" << m.e[i];
  }
  return os.str();
}

// Signed coefficient rendering for Q/Z: returns (is_negative, magnitude text).
template <class R>
std::string to_string_signed(const Poly<R>& f) {
  if (f.t.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& tm : f.t) {
    R c = tm.second;
    bool neg = sgn(c) < 0;
    if (neg) c = -c;
    if (first) {
      if (neg) os << "-";
      first = false;
    } else {
      os << (neg ? " - " : " + ");
    }
    std::string cs = RingOps<R>::str(c);
    bool unit = (cs == "1");
    if (mon_is_one(tm.first)) {
      os << cs;
    } else {
      if (!unit) os << cs << "*";
      os << mon_str(tm.first, f.vk);
    }
  }
  return os.str();
}

template <class R>
std::string to_string_plain(const Poly<R>& f) {
  if (f.t.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& tm : f.t) {
    if (!first) os << " + ";
    first = false;
    std::string cs = RingOps<R>::str(tm.second);
    if (mon_is_one(tm.first)) {
      os << cs;
    } else {
      if (cs != "1") os << cs << "*";
      os << mon_str(tm.first, f.vk);
    }
  }
  return os.str();
}

}  // namespace

std::string poly_to_string(const Poly<mpq_class>& f) { return to_string_signed(f); }
std::string poly_to_string(const Poly<mpz_class>& f) { return to_string_signed(f); }
std::string poly_to_string(const Poly<Fp>& f) { return to_string_plain(f); }
std::string poly_to_string(const Poly<Fq>& f) { return to_string_plain(f); }

namespace {

struct Parser {
  const std::string& s;
  size_t i = 0;
  int nvars;
  int var_kind = -1;  // -1 unknown, 0 projective, 1 affine

  explicit Parser(const std::string& text, int nv) : s(text), nvars(nv) {}

  void skip() {
    while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
  }

  [[noreturn]] void fail(const std::string& why) {
    throw std::invalid_argument("parse_poly: " + why + " at offset " + std::to_string(i));
  }

  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }

  mpz_class integer() {
    skip();
    size_t j = i;
    while (j < s.size() && std::isdigit((unsigned char)s[j])) ++j;
    if (j == i) fail("expected integer");
    mpz_class v(s.substr(i, j - i));
    i = j;
    return v;
  }

  Poly<mpq_class> primary() {
    skip();
    if (i >= s.size()) fail("unexpected end");
    if (eat('(')) {
      Poly<mpq_class> e = expr();
      if (!eat(')')) fail("expected )");
      return e;
    }
    if (s[i] == '-') {
      ++i;
      return poly_neg(primary_pow());
    }
    if (s[i] == 'x' || s[i] == 'y') {
      bool affine = s[i] == 'y';
      if (var_kind == -1)
        var_kind = affine ? 1 : 0;
      else if (var_kind != (affine ? 1 : 0))
        fail("mixed x/y variables");
      ++i;
      mpz_class idx = integer();
      long v = idx.get_si();
      int slot = affine ? (int)v - 1 : (int)v;
      if (slot < 0 || slot >= nvars) fail("variable index out of declared arity");
      return poly_var(nvars, affine ? VarKind::Affine : VarKind::Projective, slot, mpq_class(1));
    }
    if (std::isdigit((unsigned char)s[i])) {
      mpz_class num = integer();
      skip();
      if (i < s.size() && s[i] == '/') {
        ++i;
        mpz_class den = integer();
        if (sgn(den) == 0) fail("zero denominator");
        mpq_class q(num, den);
        q.canonicalize();
        return poly_const(nvars, cur_kind(), q);
      }
      return poly_const(nvars, cur_kind(), mpq_class(num));
    }
    fail("unexpected character");
  }

  VarKind cur_kind() const { return var_kind == 1 ? VarKind::Affine : VarKind::Projective; }

  Poly<mpq_class> primary_pow() {
    Poly<mpq_class> b = primary();
    skip();
    if (i < s.size() && s[i] == '^') {
      ++i;
      mpz_class e = integer();
      if (e < 0 || e > 512) fail("exponent out of range");
      b = poly_pow(b, (int)e.get_si());
    }
    return b;
  }

  Poly<mpq_class> term() {
    Poly<mpq_class> r = primary_pow();
    for (;;) {
      skip();
      if (i < s.size() && s[i] == '*') {
        ++i;
        r = poly_mul(r, primary_pow());
      } else {
        break;
      }
    }
    return r;
  }

  Poly<mpq_class> expr() {
    skip();
    bool lead_neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      lead_neg = s[i] == '-';
      ++i;
    }
    Poly<mpq_class> r = term();
    if (lead_neg) r = poly_neg(r);
    for (;;) {
      skip();
      if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        bool neg = s[i] == '-';
        ++i;
        Poly<mpq_class> t = term();
        r = neg ? poly_sub(r, t) : poly_add(r, t);
      } else {
        break;
      }
    }
    return r;
  }
};

}  // namespace

Poly<mpq_class> parse_poly(const std::string& text, int nvars) {
  if (nvars < 1) throw std::invalid_argument("parse_poly: arity must be positive");
  Parser P(text, nvars);
  Poly<mpq_class> f = P.expr();
  P.skip();
  if (P.i != text.size()) P.fail("trailing input");
  f.vk = P.cur_kind();
  f.nvars = nvars;
  return f;
}

IntPoint parse_point(const std::string& text) {
  IntPoint p;
  std::string cur;
  auto flush = [&]() {
    size_t pos = cur.find_first_not_of(" \t");
    size_t end = cur.find_last_not_of(" \t");
    if (pos == std::string::npos) throw std::invalid_argument("parse_point: empty coordinate");
    p.x.emplace_back(cur.substr(pos, end - pos + 1));
    cur.clear();
  };
  for (char c : text) {
    if (c == ',')
      flush();
    else if (c != '(' && c != ')')
      cur += c;
  }
  flush();
  return p;
}

std::string poly_hash(const std::string& canonical) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return std::string(buf);
}

}  // namespace detcount
