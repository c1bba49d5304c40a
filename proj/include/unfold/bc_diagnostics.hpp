#pragma once

// Diagnostics for the critical orbit near the critical point: the
// logarithmic partition of (-delta, delta), the exponential-growth and
// slow-recurrence checks, bound periods, return itineraries of parameter
// windows and the empirical checkers built on them.

#include "unfold/dynamics.hpp"
#include "unfold/parameter_space.hpp"

#include <cmath>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace unfold {

struct BCConfig {
  double delta = std::exp(-7.0);
  double lambda = 0.4;
  std::optional<double> alpha;    ///< defaults to lambda / 300
  std::optional<double> lambda0;  ///< measured when absent

  double alpha_value() const { return alpha.value_or(lambda / 300); }
  /// Smallest |mu| of the partition, ceil(-log delta).
  int mu_min() const;
  /// Checks 0 < delta <= 0.01, 0 < lambda <= log 4 and alpha <= lambda/300.
  void validate() const;
};

struct PartitionIndex {
  int mu = 0;
  int nu = 0;
  /// Set when x lies in the sliver [e^-mu_min, delta) that only the
  /// neighbourhood of I_{mu_min} reaches.
  bool extended = false;
};

/// (mu, nu) of x with nu = 1 at the piece nearest 0; absent when x = 0 or
/// |x| >= delta.
std::optional<PartitionIndex> classify(double x, const BCConfig& cfg);

/// [left, right) of the piece I_{mu nu} (mirrored for negative mu).
std::pair<double, double> piece_bounds(int mu, int nu);

struct CEReport {
  int depth = 0;
  double min_exponent = 0;
  std::optional<int> first_violation;
  std::vector<int> recurrence_violations;
  bool passed() const { return !first_violation && recurrence_violations.empty(); }
};

/// Growth of |Df_a^j(1)| for j <= n against e^{lambda j}, and slow
/// recurrence |xi_j| >= e^{-alpha j}.
CEReport check_ce(MapParam a, int n, const BCConfig& cfg);

/// Length of the bound period after a return at depth mu: the last j before
/// the image of (-e^-mu, e^-mu) under f_a^j grows past e^{-2 alpha j}.
/// Throws DepthExceeded after 10^4 steps.
int bound_period(MapParam a, int mu, const BCConfig& cfg);

/// Same with the image hull taken over sampled parameters of w.
int bound_period(const ParamWindow& w, int mu, const BCConfig& cfg);

enum class EventKind { EssentialFree, InessentialFree, BoundReturn, Escape };
std::string_view to_string(EventKind k);

struct ReturnEvent {
  int time = 0;
  EventKind kind = EventKind::InessentialFree;
  std::optional<PartitionIndex> index;  ///< of the hull point nearest 0
  WindowImage hull;
  /// Escapes also cover a partition piece and count as essential returns.
  bool essential() const { return kind == EventKind::EssentialFree || kind == EventKind::Escape; }
};

struct BoundPeriod {
  int start = 0;  ///< return time; the bound steps are start+1 .. start+length
  int length = 0;
};

struct ReturnItinerary {
  std::vector<ReturnEvent> events;
  std::vector<BoundPeriod> bound_periods;
  std::vector<WindowImage> images;  ///< hull of xi_n(w) for n = 0 .. n_max
};

/// Returns of xi_n(w) into (-delta, delta) for n <= n_max. Requires CE at
/// depth n_max on `ce_samples` evenly spaced parameters of w.
/// Throws DegenerateWindow or CEViolated.
ReturnItinerary itinerary(const ParamWindow& w, int n_max, const BCConfig& cfg, int min_samples = 257,
                          int ce_samples = 9);

struct BoundDistortionReport {
  double ratio_min = 1;
  double ratio_max = 1;
  double expansion = 0;  ///< min_x |(f^p)'(x)| e^{-lambda p / 4} over x in I_mu
};

/// Distortion |Df^j(y)| / |Df^j(1)| over y in f_a(-e^-mu, e^-mu), j <= p,
/// and the expansion accumulated over a bound period.
BoundDistortionReport check_bound_distortion(MapParam a, int mu, int p, const BCConfig& cfg, int samples = 257);

struct ReturnRatio {
  int from = 0;
  int to = 0;
  double ratio = 0;
};

struct FreeSegment {
  int start = 0;
  int end = 0;           ///< inclusive
  double lambda0 = 0;    ///< least-squares slope of log hull length
  double growth = 0;     ///< hull length at end / at start
};

struct ReturnGrowthReport {
  std::vector<ReturnRatio> ratios;
  std::vector<FreeSegment> segments;  ///< maximal free runs of length >= 5
};

/// Hull-length ratios between consecutive essential returns and exponential
/// growth rates along free stretches outside (-delta, delta).
ReturnGrowthReport check_return_growth(const ReturnItinerary& it, const BCConfig& cfg);

/// Hausdorff distance between the closed intervals [a0, a1] and [b0, b1].
double hausdorff_distance(double a0, double a1, double b0, double b1);

struct ShadowingReport {
  double max_ratio_parameters = 0;           ///< max_j HD(f_lo^j(I), f_hi^j(I)) / |f_lo^j(I)|
  std::optional<double> max_ratio_returns;   ///< the same for xi_{n+j+1}(w) against f_lo^j(xi_{n+1}(w))
};

ShadowingReport check_parameter_shadowing(const ParamWindow& w, int mu, int p, std::optional<int> return_time = std::nullopt,
                          int samples = 257);

/// Sum_{j<n} |xi_j(a) - xi_j(b)|.
template <class Real>
Real deviation_sum(const Real& a, const Real& b, int n);

}  // namespace unfold
