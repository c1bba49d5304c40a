#pragma once

#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace unfold {

/// 113-bit significand arithmetic for deep parameter windows.
using Extended = boost::multiprecision::float128;

enum class Precision { Double, Extended };

std::string_view to_string(Precision p);
/// Accepts "double" or "extended"; throws Error(Domain) otherwise.
Precision parse_precision(std::string_view text);

template <class Real>
inline constexpr int significand_bits = std::numeric_limits<Real>::digits;

template <class Real>
inline bool is_finite(const Real& x) {
  return (boost::math::isfinite)(x);
}

template <class Real>
inline double to_double(const Real& x) {
  return static_cast<double>(x);
}

/// Unit in the last place of |x| (of 1 when x == 0).
template <class Real>
Real ulp(const Real& x) {
  using std::abs;
  using std::frexp;
  using std::ldexp;
  int e = 0;
  Real ax = abs(x);
  if (ax == 0) ax = 1;
  frexp(ax, &e);
  return ldexp(Real(1), e - significand_bits<Real>);
}

/// A parameter bracket of half-width `half_width` around `center` is
/// resolvable when it spans at least 2^18 representable parameters.
template <class Real>
bool resolvable(const Real& center, const Real& half_width) {
  using std::ldexp;
  return half_width >= ldexp(ulp(center), 18);
}

/// Largest period n whose nearest-to-2 super-stable bracket
/// (2 - 4^(4-n), 2) is still resolvable at the given precision.
int period_cap(Precision p);

/// Full-precision decimal rendering (17 digits for double, 36 for Extended).
std::string to_text(double x);
std::string to_text(const Extended& x);

/// Parses a decimal string at the requested precision.
template <class Real>
Real parse_real(const std::string& text);
template <>
double parse_real<double>(const std::string& text);
template <>
Extended parse_real<Extended>(const std::string& text);

}  // namespace unfold
