#include "unfold/dynamics.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace unfold {

MapParam::MapParam(double a) : a_(require_param(a)) {}

template <class Real>
Real require_param(const Real& a) {
  if (!(a > 0 && a <= 2)) {
    throw Error(ErrorKind::Domain, "parameter a=" + to_text(a) + " outside (0, 2]");
  }
  return a;
}

template <class Real>
Real to_phase(const Real& x) {
  if (x > 1) {
    if (x - 1 <= kPhaseSlack) return Real(1);
  } else if (x < -1) {
    if (-1 - x <= kPhaseSlack) return Real(-1);
  } else {
    return x;
  }
  throw Error(ErrorKind::Domain, "phase point x=" + to_text(x) + " outside [-1, 1]");
}

double eval_map(MapParam a, double x) { return apply_map(a.value(), to_phase(x)); }

template <class Real>
void LogMagnitude<Real>::multiply(const Real& factor) {
  using std::frexp;
  if (factor == 0) {
    zero_ = true;
    return;
  }
  int e = 0;
  mantissa_ = frexp(mantissa_ * factor, &e);
  exponent_ += e;
}

template <class Real>
Real LogMagnitude<Real>::log() const {
  using std::abs;
  using std::log;
  if (zero_) return -std::numeric_limits<Real>::infinity();
  return log(abs(mantissa_)) + Real(exponent_) * log(Real(2));
}

template <class Real>
Real LogMagnitude<Real>::value() const {
  using std::ldexp;
  if (zero_) return Real(0);
  constexpr std::int64_t kMax = std::numeric_limits<int>::max();
  const auto e = static_cast<int>(exponent_ > kMax ? kMax : (exponent_ < -kMax ? -kMax : exponent_));
  return ldexp(mantissa_, e);
}

OrbitTrace iterate_orbit(MapParam a, double x0, int n) {
  if (n < 0) throw Error(ErrorKind::Domain, "orbit length must be >= 0");
  OrbitTrace trace{a, {}, {}, std::nullopt};
  trace.points.reserve(static_cast<std::size_t>(n) + 1);
  trace.log_deriv_partial.reserve(static_cast<std::size_t>(n) + 1);

  const double av = a.value();
  double x = to_phase(x0);
  LogMagnitude<double> deriv;
  for (int k = 0; k <= n; ++k) {
    trace.points.push_back(x);
    trace.log_deriv_partial.push_back(deriv.log());
    if (x == 0 && !trace.first_zero) trace.first_zero = static_cast<std::size_t>(k);
    if (k == n) break;
    deriv.multiply(-2 * av * x);
    x = to_phase(apply_map(av, x));
  }
  return trace;
}

DerivativeProduct derivative_along_orbit(MapParam a, double x0, int n) {
  if (n < 1) throw Error(ErrorKind::Domain, "derivative needs n >= 1");
  const double av = a.value();
  double x = to_phase(x0);
  double product = 1;
  LogMagnitude<double> mag;
  for (int k = 0; k < n; ++k) {
    const double d = -2 * av * x;
    product *= d;
    mag.multiply(d);
    x = to_phase(apply_map(av, x));
  }
  return {product, mag.log(), mag.is_zero()};
}

template <class Real>
CriticalTrace<Real> critical_trace(const Real& a, int n) {
  if (n < 0) throw Error(ErrorKind::Domain, "depth must be >= 0");
  require_param(a);
  CriticalTrace<Real> t{a, {}, {}};
  t.xi.reserve(static_cast<std::size_t>(n) + 1);
  t.dxi_da.reserve(static_cast<std::size_t>(n) + 1);
  Real x = 0;
  Real d = 0;
  t.xi.push_back(x);
  t.dxi_da.push_back(d);
  for (int k = 0; k < n; ++k) {
    d = -x * x - 2 * a * x * d;
    x = apply_map(a, x);
    if (!is_finite(d)) {
      throw Error(ErrorKind::Overflow, "D_a xi_" + std::to_string(k + 1) + " overflowed");
    }
    t.xi.push_back(x);
    t.dxi_da.push_back(d);
  }
  return t;
}

template <class Real>
Real critical_value(const Real& a, int n) {
  Real x = 0;
  for (int k = 0; k < n; ++k) x = apply_map(a, x);
  return x;
}

template <class Real>
ValueAndSlope<Real> critical_value_and_slope(const Real& a, int n) {
  Real x = 0;
  Real d = 0;
  for (int k = 0; k < n; ++k) {
    d = -x * x - 2 * a * x * d;
    x = apply_map(a, x);
  }
  if (!is_finite(d)) throw Error(ErrorKind::Overflow, "D_a xi_n overflowed");
  return {x, d};
}

template <class Real>
LogMagnitude<Real> critical_value_derivative(const Real& a, int n) {
  LogMagnitude<Real> mag;
  Real x = 1;
  for (int i = 0; i < n; ++i) {
    mag.multiply(-2 * a * x);
    x = apply_map(a, x);
  }
  return mag;
}

double lyapunov_exponent(MapParam a, double x0, long n, long burn) {
  if (n < 1) throw Error(ErrorKind::Domain, "lyapunov_exponent needs n >= 1");
  if (burn < 0) throw Error(ErrorKind::Domain, "burn-in must be >= 0");
  const double av = a.value();
  double x = to_phase(x0);
  for (long k = 0; k < burn; ++k) x = to_phase(apply_map(av, x));
  LogMagnitude<double> mag;
  for (long k = 0; k < n; ++k) {
    if (x == 0) return -std::numeric_limits<double>::infinity();
    mag.multiply(-2 * av * x);
    x = to_phase(apply_map(av, x));
  }
  return mag.log() / static_cast<double>(n);
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double seeded_phase_point(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const double u = (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
  return 2 * u - 1;
}

template double require_param<double>(const double&);
template Extended require_param<Extended>(const Extended&);
template double to_phase<double>(const double&);
template Extended to_phase<Extended>(const Extended&);
template class LogMagnitude<double>;
template class LogMagnitude<Extended>;
template CriticalTrace<double> critical_trace<double>(const double&, int);
template CriticalTrace<Extended> critical_trace<Extended>(const Extended&, int);
template double critical_value<double>(const double&, int);
template Extended critical_value<Extended>(const Extended&, int);
template ValueAndSlope<double> critical_value_and_slope<double>(const double&, int);
template ValueAndSlope<Extended> critical_value_and_slope<Extended>(const Extended&, int);
template LogMagnitude<double> critical_value_derivative<double>(const double&, int);
template LogMagnitude<Extended> critical_value_derivative<Extended>(const Extended&, int);

}  // namespace unfold
