#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "detcount/matrix.hpp"

using namespace detcount;

TEST_CASE("rref rank and kernel over Q") {
  Mat<mpq_class> m(2, 3, mpq_class(0));
  // x + 2y + 3z, 2x + 4y + 6z: rank 1
  m.at(0, 0) = 1;
  m.at(0, 1) = 2;
  m.at(0, 2) = 3;
  m.at(1, 0) = 2;
  m.at(1, 1) = 4;
  m.at(1, 2) = 6;
  CHECK(matrix_rank(m, mpq_class(0)) == 1);
  auto ker = kernel_basis(m, mpq_class(0));
  REQUIRE(ker.size() == 2);
  for (auto& v : ker) {
    mpq_class dot = v[0] * 1 + v[1] * 2 + v[2] * 3;
    CHECK(sgn(dot) == 0);
  }
}

TEST_CASE("rref over a prime field") {
  Fp like{0, 7};
  Mat<Fp> m(3, 3, Fp{0, 7});
  int vals[3][3] = {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};  // rank 2 mod 7
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m.at(i, j) = fp_make(7, vals[i][j]);
  CHECK(matrix_rank(m, like) == 2);
}

TEST_CASE("bareiss determinant") {
  Mat<mpz_class> m(3, 3, mpz_class(0));
  int vals[3][3] = {{2, 0, 1}, {1, 3, 2}, {1, 1, 5}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m.at(i, j) = vals[i][j];
  CHECK(bareiss_det(m) == 24);
  // Vandermonde 4x4 at 1,2,3,4: det = prod_{i<j}(x_j - x_i) = 1*2*3*1*2*1 = 12
  Mat<mpz_class> v(4, 4, mpz_class(0));
  long xs[4] = {1, 2, 3, 4};
  for (int i = 0; i < 4; ++i) {
    mpz_class pw = 1;
    for (int j = 0; j < 4; ++j) {
      v.at(i, j) = pw;
      pw *= xs[i];
    }
  }
  CHECK(bareiss_det(v) == 12);
  // singular matrix
  Mat<mpz_class> s(2, 2, mpz_class(0));
  s.at(0, 0) = 1;
  s.at(0, 1) = 2;
  s.at(1, 0) = 2;
  s.at(1, 1) = 4;
  CHECK(bareiss_det(s) == 0);
}

TEST_CASE("padic valuation") {
  CHECK(*padic_valuation(mpz_class(250), mpz_class(5)) == 3);
  CHECK(*padic_valuation(mpz_class(7), mpz_class(5)) == 0);
  CHECK(!padic_valuation(mpz_class(0), mpz_class(5)).has_value());
}

TEST_CASE("integer matrix rank over Q") {
  Mat<mpz_class> m(2, 2, mpz_class(0));
  m.at(0, 0) = 2;
  m.at(0, 1) = 4;
  m.at(1, 0) = 3;
  m.at(1, 1) = 6;
  CHECK(integer_matrix_rank_q(m) == 1);
}
