#include "detcount/bigfloat.hpp"

#include <vector>

namespace detcount {

mpz_class BigFloat::ceil_z() const {
  mpfr_t c;
  mpfr_init2(c, kPrec);
  mpfr_ceil(c, v_);
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), c, MPFR_RNDN);
  mpfr_clear(c);
  return z;
}

std::string BigFloat::str(int digits) const {
  char fmt[32];
  std::snprintf(fmt, sizeof fmt, "%%.%dRg", digits);
  char* raw = nullptr;
  mpfr_asprintf(&raw, fmt, v_);
  std::string out(raw);
  mpfr_free_str(raw);
  return out;
}

}  // namespace detcount
