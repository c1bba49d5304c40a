#pragma once

// Solvers on parameter windows: images of windows under xi_n, super-stable
// and Misiurewicz parameters, periodic orbits and their continuation,
// attractor detection and refinement of escape windows.

#include "unfold/bracket.hpp"
#include "unfold/dynamics.hpp"
#include "unfold/periodic_orbit.hpp"

#include <optional>
#include <string>
#include <vector>

namespace unfold {

/// Closed parameter interval 0 < lo <= hi <= 2.
template <class Real>
struct Window {
  Real lo;
  Real hi;

  Window(const Real& l, const Real& h);
  Real width() const { return hi - lo; }
  bool degenerate() const { return hi == lo; }
  bool contains(const Real& a) const { return lo <= a && a <= hi; }
};

using ParamWindow = Window<double>;

/// Parses "lo:hi".
template <class Real>
Window<Real> parse_window(const std::string& text);

struct WindowImage {
  int n = 0;
  double hull_lo = 0;
  double hull_hi = 0;
  bool monotone = true;
  int samples = 0;

  double length() const { return hull_hi - hull_lo; }
  bool intersects(double lo, double hi) const { return hull_hi > lo && hull_lo < hi; }
  bool contains(double x) const { return hull_lo <= x && x <= hull_hi; }
};

/// Hull of xi_n over an adaptively refined sample of w: neighbouring samples
/// whose values differ by more than a hundredth of the current hull get a
/// midpoint, up to `max_samples` points in total.
template <class Real>
WindowImage window_image(const Window<Real>& w, int n, int min_samples, int max_samples = 1 << 14);

template <class Real>
struct SolverResult {
  std::string kind;  ///< "superstable", "misiurewicz", ...
  Real a = 0;
  int period = 0;
  Real residual = 0;
  Real multiplier = 0;
};

/// Super-stable parameter of period n in w. Sign-change brackets of xi_n
/// are visited nearest `anchor` first (default w.hi); each is bisected to
/// full precision and polished by at most five Newton steps. The first
/// root whose orbit avoids 0 before time n is returned.
/// Throws NoSignChange or MinimalityViolated.
template <class Real>
SolverResult<Real> find_superstable(const Window<Real>& w, int n, std::optional<Real> anchor = std::nullopt,
                                    int samples = 4096);

/// Refines a sign-change bracket of xi_n and checks minimality.
template <class Real>
std::optional<SolverResult<Real>> solve_superstable_bracket(const Bracket<Real>& b, int n);

/// Super-stable root of period p nearest b (below b only when b = 2),
/// searched within a bracket scaled by 1/|D_a xi_p(b)|.
/// Throws PrecisionCapExceeded when that bracket is not resolvable at Real's
/// precision, NoRootInBracket when no minimal root is found.
template <class Real>
SolverResult<Real> nearest_superstable(const Real& b, int p);

/// The cycle 0 = xi_0, xi_1, ..., xi_{n-1} at a super-stable parameter.
template <class Real>
PeriodicOrbit<Real> superstable_cycle(const Real& a, int n);

/// Newton on f_a^p(x) - x from `seed`; iterates live on the whole real line.
/// Throws NoConvergence or NotMinimalPeriod.
template <class Real>
PeriodicOrbit<Real> find_periodic_orbit(const Real& a, int p, const Real& seed);

inline constexpr double kHyperbolicMargin = 1.05;

template <class Real>
struct ContinuationPath {
  std::vector<PeriodicOrbit<Real>> nodes;  ///< sorted by a along the path

  Real a_min() const;
  Real a_max() const;
  /// First cycle point of the continued orbit at any a covered by the path,
  /// re-solved by Newton from the interpolated neighbours.
  PeriodicOrbit<Real> at(const Real& a) const;
  Real z_at(const Real& a) const { return at(a).points.front(); }
};

/// Natural-parameter continuation of a repelling orbit towards a_target in
/// max_steps equal steps, halving a step whenever Newton fails or the orbit
/// jumps by more than 0.1. Throws HyperbolicityLost if |multiplier| < 1.05.
template <class Real>
ContinuationPath<Real> continue_orbit(const PeriodicOrbit<Real>& orbit, const Real& a_target, int max_steps);

/// Concatenates two paths sharing their starting orbit into one sorted path.
template <class Real>
ContinuationPath<Real> join_paths(const ContinuationPath<Real>& down, const ContinuationPath<Real>& up);

/// Solves xi_N(a) = z(a) in w, z taken from the path. Brackets are visited
/// nearest `anchor` first (default w.hi).
/// Throws NoSignChange, MinimalityViolated or PrecisionCapExceeded (if the
/// residual cannot be pushed below 1e-12 at Real's precision).
template <class Real>
SolverResult<Real> find_misiurewicz(const Window<Real>& w, int N, const ContinuationPath<Real>& path,
                                    std::optional<Real> anchor = std::nullopt, int samples = 4096);

/// Attracting (or neutral) cycle reached by the critical orbit after n_max
/// steps, of period at most p_max; absent if none.
std::optional<PeriodicOrbit<double>> find_attractor(MapParam a, long n_max, int p_max, double tol);

template <class Real>
struct EscapeRefinement {
  Real a_star = 0;
  int r_star = 0;
  std::optional<Real> a_hat;
  std::optional<int> r_hat;
  WindowImage image;  ///< the escape image at n_k
};

/// Starting from an escape configuration at n_k (hull meets (-delta^2,
/// delta^2) and has length >= delta), finds the first r* >= 1 whose image
/// covers 0 and, given a path, the first r_hat >= r* whose image crosses the
/// continuation z. Throws NotEscapeWindow or CoverageNotReached.
template <class Real>
EscapeRefinement<Real> refine_escape_window(const Window<Real>& w, int n_k, double delta,
                                            const ContinuationPath<Real>* path = nullptr);

}  // namespace unfold
