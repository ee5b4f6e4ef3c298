#include "semproc/rational.hpp"

#include <limits>

namespace semproc {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

void Rational::assign(std::int64_t num, std::int64_t den) {
  *this = from128(num, den);
}

Rational Rational::from128(__int128 num, __int128 den) {
  if (den == 0) throw Error(Errc::invalid_argument, "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const __int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num == 0) den = 1;
  constexpr __int128 lim = std::numeric_limits<std::int64_t>::max();
  if (num > lim || num < -lim || den > lim) throw Error(Errc::overflow, "rational overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

std::int64_t Rational::floor_times(std::int64_t k) const {
  const __int128 p = static_cast<__int128>(num_) * k;
  __int128 q = p / den_;
  if (p % den_ != 0 && p < 0) --q;
  return static_cast<std::int64_t>(q);
}

}  // namespace semproc
