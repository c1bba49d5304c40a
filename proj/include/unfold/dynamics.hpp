#pragma once

// Exact-formula evaluation of the quadratic family f_a(x) = 1 - a x^2 on
// [-1, 1]: orbits, space derivatives along orbits, the critical-orbit maps
// xi_n(a) = f_a^n(0) with their parameter derivatives, and Lyapunov
// exponents.

#include "unfold/errors.hpp"
#include "unfold/precision.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace unfold {

/// Rounding drift allowed outside [-1, 1] before a phase point is rejected.
inline constexpr double kPhaseSlack = 1e-12;

/// A parameter of the quadratic family, 0 < a <= 2.
class MapParam {
 public:
  explicit MapParam(double a);
  double value() const noexcept { return a_; }

 private:
  double a_;
};

/// Throws Error(Domain) unless 0 < a <= 2.
template <class Real>
Real require_param(const Real& a);

/// Clamps x into [-1, 1] when it is within kPhaseSlack; throws otherwise.
template <class Real>
Real to_phase(const Real& x);

template <class Real>
inline Real apply_map(const Real& a, const Real& x) {
  return 1 - a * x * x;
}

double eval_map(MapParam a, double x);

/// Running product of real factors kept as mantissa * 2^exponent, so that
/// products of thousands of derivatives neither overflow nor lose the log.
template <class Real>
class LogMagnitude {
 public:
  void multiply(const Real& factor);
  bool is_zero() const noexcept { return zero_; }
  /// log|product|; -infinity once a zero factor was seen.
  Real log() const;
  /// The signed product itself (may overflow to +-inf).
  Real value() const;

 private:
  Real mantissa_ = 1;
  std::int64_t exponent_ = 0;
  bool zero_ = false;
};

struct OrbitTrace {
  MapParam a;
  std::vector<double> points;  ///< x_0 .. x_n
  /// Entry k is sum_{i<k} log|-2a x_i|; -infinity from the first exact zero on.
  std::vector<double> log_deriv_partial;
  std::optional<std::size_t> first_zero;  ///< index of the first x_k == 0
};

OrbitTrace iterate_orbit(MapParam a, double x0, int n);

struct DerivativeProduct {
  double value;    ///< prod_{k<n} (-2a x_k); may be +-inf for long orbits
  double log_abs;  ///< log|value|, accurate even when value overflows
  bool hits_zero;  ///< some x_k == 0 exactly
};

DerivativeProduct derivative_along_orbit(MapParam a, double x0, int n);

template <class Real>
struct CriticalTrace {
  Real a;
  std::vector<Real> xi;      ///< xi_0 .. xi_n, xi_0 = 0
  std::vector<Real> dxi_da;  ///< D_a xi_0 .. D_a xi_n
};

/// xi_k(a) and D_a xi_k(a) for k <= n via
///   xi_{k+1} = 1 - a xi_k^2,  D_a xi_{k+1} = -xi_k^2 - 2a xi_k D_a xi_k.
/// Throws Error(Overflow) if the derivative leaves the representable range.
template <class Real>
CriticalTrace<Real> critical_trace(const Real& a, int n);

/// xi_n(a) without storing the trace.
template <class Real>
Real critical_value(const Real& a, int n);

template <class Real>
struct ValueAndSlope {
  Real value;
  Real slope;
};

/// (xi_n(a), D_a xi_n(a)).
template <class Real>
ValueAndSlope<Real> critical_value_and_slope(const Real& a, int n);

/// Df_a^n(1) = prod_{i=1}^{n} (-2a xi_i): the space derivative along the
/// critical value's orbit.
template <class Real>
LogMagnitude<Real> critical_value_derivative(const Real& a, int n);

/// (1/n) * sum_{k=burn}^{burn+n-1} log|-2a x_k|; -infinity if the orbit
/// lands exactly on the critical point.
double lyapunov_exponent(MapParam a, double x0, long n, long burn);

/// Splits one seed into independent, reproducible streams.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniform point of (-1, 1) drawn from a seeded generator; bit-reproducible.
double seeded_phase_point(std::uint64_t seed);

}  // namespace unfold
