#include "unfold/parameter_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace unfold {

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Attracting: return "attracting";
    case Stability::Superstable: return "superstable";
    case Stability::Repelling: return "repelling";
    case Stability::Neutral: return "neutral";
  }
  return "unknown";
}

template <class Real>
Window<Real>::Window(const Real& l, const Real& h) : lo(l), hi(h) {
  if (!(lo > 0 && lo <= hi && hi <= 2)) {
    throw Error(ErrorKind::Domain, "window [" + to_text(lo) + ", " + to_text(hi) + "] not inside (0, 2]");
  }
}

template <class Real>
Window<Real> parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::Domain, "window must be written lo:hi, got '" + text + "'");
  return Window<Real>(parse_real<Real>(text.substr(0, colon)), parse_real<Real>(text.substr(colon + 1)));
}

template <class Real>
WindowImage window_image(const Window<Real>& w, int n, int min_samples, int max_samples) {
  if (n < 0) throw Error(ErrorKind::Domain, "window_image needs n >= 0");
  if (min_samples < 2) throw Error(ErrorKind::Domain, "window_image needs at least 2 samples");

  WindowImage img;
  img.n = n;
  if (w.degenerate()) {
    const double v = to_double(critical_value(w.lo, n));
    img.hull_lo = img.hull_hi = v;
    img.samples = 1;
    return img;
  }

  struct Sample {
    Real a;
    double v;
  };
  std::vector<Sample> pts;
  pts.reserve(static_cast<std::size_t>(min_samples));
  const Real step = w.width() / (min_samples - 1);
  for (int i = 0; i < min_samples; ++i) {
    const Real a = i == min_samples - 1 ? w.hi : w.lo + step * i;
    pts.push_back({a, to_double(critical_value(a, n))});
  }

  auto hull = [&] {
    auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [](const Sample& l, const Sample& r) { return l.v < r.v; });
    return std::pair{lo->v, hi->v};
  };

  while (static_cast<int>(pts.size()) < max_samples) {
    const auto [lo, hi] = hull();
    const double gap = (hi - lo) / 100;
    std::vector<Sample> next;
    next.reserve(pts.size() * 2);
    bool refined = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      next.push_back(pts[i]);
      if (i + 1 == pts.size()) break;
      if (static_cast<int>(next.size() + pts.size() - i) >= max_samples) continue;
      if (std::abs(pts[i + 1].v - pts[i].v) <= gap) continue;
      const Real mid = pts[i].a + (pts[i + 1].a - pts[i].a) / 2;
      if (mid <= pts[i].a || mid >= pts[i + 1].a) continue;
      next.push_back({mid, to_double(critical_value(mid, n))});
      refined = true;
    }
    pts = std::move(next);
    if (!refined) break;
  }

  // A fold between samples can poke past the sampled hull; locate interior
  // extrema near the hull edges by golden-section search.
  {
    const auto [lo, hi] = hull();
    const double near = 2 * (hi - lo) / 100;
    std::vector<Sample> extra;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      const double l = pts[i - 1].v, m = pts[i].v, r = pts[i + 1].v;
      const bool is_max = m >= l && m >= r && m > std::min(l, r);
      const bool is_min = m <= l && m <= r && m < std::max(l, r);
      if (!((is_max && m >= hi - near) || (is_min && m <= lo + near))) continue;
      const double sign = is_max ? -1 : 1;
      auto f = [&](const Real& a) { return sign * to_double(critical_value(a, n)); };
      const Real phi = (std::sqrt(5.0) - 1) / 2;
      Real x0 = pts[i - 1].a, x3 = pts[i + 1].a;
      Real x1 = x3 - phi * (x3 - x0), x2 = x0 + phi * (x3 - x0);
      double f1 = f(x1), f2 = f(x2);
      for (int it = 0; it < 200 && x1 < x2; ++it) {
        if (f1 <= f2) {
          x3 = x2;
          x2 = x1;
          f2 = f1;
          x1 = x3 - phi * (x3 - x0);
          f1 = f(x1);
        } else {
          x0 = x1;
          x1 = x2;
          f1 = f2;
          x2 = x0 + phi * (x3 - x0);
          f2 = f(x2);
        }
      }
      const Real best = f1 <= f2 ? x1 : x2;
      extra.push_back({best, sign * std::min(f1, f2)});
    }
    if (!extra.empty()) {
      pts.insert(pts.end(), extra.begin(), extra.end());
      std::sort(pts.begin(), pts.end(), [](const Sample& l, const Sample& r) { return l.a < r.a; });
    }
  }

  const auto [lo, hi] = hull();
  img.hull_lo = lo;
  img.hull_hi = hi;
  img.samples = static_cast<int>(pts.size());
  bool up = true;
  bool down = true;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!(pts[i].v > pts[i - 1].v)) up = false;
    if (!(pts[i].v < pts[i - 1].v)) down = false;
  }
  img.monotone = up || down;
  return img;
}

namespace {

template <class Real>
bool orbit_avoids_zero(const Real& a, int n, double tol) {
  using std::abs;
  Real x = 0;
  for (int j = 1; j < n; ++j) {
    x = apply_map(a, x);
    if (abs(x) <= tol) return false;
  }
  return true;
}

template <class Real>
std::vector<Bracket<Real>> order_by_anchor(std::vector<Bracket<Real>> brackets, const Real& anchor) {
  using std::abs;
  auto distance = [&](const Bracket<Real>& b) {
    if (b.lo <= anchor && anchor <= b.hi) return Real(0);
    return std::min<Real>(abs(b.lo - anchor), abs(b.hi - anchor));
  };
  std::stable_sort(brackets.begin(), brackets.end(),
                   [&](const Bracket<Real>& l, const Bracket<Real>& r) { return distance(l) < distance(r); });
  return brackets;
}

}  // namespace

template <class Real>
std::optional<SolverResult<Real>> solve_superstable_bracket(const Bracket<Real>& b, int n) {
  using std::abs;
  auto g = [n](const Real& a) { return critical_value(a, n); };
  Real a = bisect<Real>(g, b);
  Real value = g(a);
  for (int it = 0; it < 5 && value != 0; ++it) {
    const auto vs = critical_value_and_slope(a, n);
    if (vs.slope == 0) break;
    const Real candidate = a - vs.value / vs.slope;
    if (candidate < b.lo || candidate > b.hi) break;
    const Real cv = g(candidate);
    if (!(abs(cv) < abs(value))) break;
    a = candidate;
    value = cv;
  }
  if (!orbit_avoids_zero(a, n, 1e-9)) return std::nullopt;
  SolverResult<Real> r;
  r.kind = "superstable";
  r.a = a;
  r.period = n;
  r.residual = abs(value);
  r.multiplier = 0;
  return r;
}

template <class Real>
SolverResult<Real> find_superstable(const Window<Real>& w, int n, std::optional<Real> anchor, int samples) {
  if (n < 2) throw Error(ErrorKind::Domain, "super-stable period must be >= 2");
  auto g = [n](const Real& a) { return critical_value(a, n); };
  auto brackets = scan_sign_changes<Real>(g, w.lo, w.hi, samples);
  if (brackets.empty()) {
    throw Error(ErrorKind::NoSignChange, "xi_" + std::to_string(n) + " keeps its sign on [" + to_text(w.lo) + ", " +
                                             to_text(w.hi) + "]");
  }
  for (const auto& b : order_by_anchor(std::move(brackets), anchor.value_or(w.hi))) {
    if (auto r = solve_superstable_bracket(b, n)) return *r;
  }
  throw Error(ErrorKind::MinimalityViolated,
              "every zero of xi_" + std::to_string(n) + " in the window has a shorter period");
}

template <class Real>
SolverResult<Real> nearest_superstable(const Real& b, int p) {
  using std::abs;
  require_param(b);
  const Real slope = abs(critical_value_and_slope(b, p).slope);
  Real half_width = Real(64) / (3 * std::max<Real>(slope, Real(1)));
  half_width = std::min<Real>(half_width, b / 2);
  if (!resolvable(b, half_width)) {
    throw Error(ErrorKind::PrecisionCapExceeded, "period " + std::to_string(p) + " near a=" + to_text(b) +
                                                     " needs a bracket of half-width " + to_text(half_width) +
                                                     ", below the " + std::to_string(significand_bits<Real>) +
                                                     "-bit resolution");
  }
  const Side side = b == 2 ? Side::Below : Side::Both;
  auto g = [p](const Real& a) { return critical_value(a, p); };
  for (const auto& br : brackets_near<Real>(g, b, half_width, side, 2048, b / 2, Real(2))) {
    if (auto r = solve_superstable_bracket(br, p)) return *r;
  }
  throw Error(ErrorKind::NoRootInBracket,
              "no minimal period-" + std::to_string(p) + " super-stable root within " + to_text(half_width) +
                  " of a=" + to_text(b));
}

template <class Real>
PeriodicOrbit<Real> superstable_cycle(const Real& a, int n) {
  PeriodicOrbit<Real> orbit;
  orbit.a = a;
  orbit.period = n;
  Real x = 0;
  Real m = 1;
  for (int j = 0; j < n; ++j) {
    orbit.points.push_back(x);
    m *= -2 * a * x;
    x = apply_map(a, x);
  }
  orbit.multiplier = m;
  orbit.stability = classify_multiplier(m);
  return orbit;
}

namespace {

template <class Real>
struct PowerEval {
  Real value;
  Real derivative;
};

template <class Real>
PowerEval<Real> iterate_with_derivative(const Real& a, int p, Real x) {
  Real d = 1;
  for (int k = 0; k < p; ++k) {
    d *= -2 * a * x;
    x = apply_map(a, x);
  }
  return {x, d};
}

}  // namespace

template <class Real>
PeriodicOrbit<Real> find_periodic_orbit(const Real& a, int p, const Real& seed) {
  using std::abs;
  require_param(a);
  if (p < 1) throw Error(ErrorKind::Domain, "period must be >= 1");

  Real x = seed;
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const auto e = iterate_with_derivative(a, p, x);
    const Real g = e.value - x;
    const Real gp = e.derivative - 1;
    if (!is_finite(g) || !is_finite(gp) || gp == 0 || abs(x) > Real(1e8)) break;
    const Real step = g / gp;
    x -= step;
    if (abs(step) <= Real(1e-12) * std::max<Real>(Real(1), abs(x))) {
      converged = true;
      break;
    }
  }
  if (!converged || !is_finite(x)) {
    throw Error(ErrorKind::NoConvergence,
                "Newton for period " + std::to_string(p) + " at a=" + to_text(a) + " from " + to_text(seed));
  }
  for (int it = 0; it < 2; ++it) {
    const auto e = iterate_with_derivative(a, p, x);
    const Real gp = e.derivative - 1;
    if (gp == 0) break;
    const Real candidate = x - (e.value - x) / gp;
    const auto ec = iterate_with_derivative(a, p, candidate);
    if (abs(ec.value - candidate) <= abs(e.value - x)) x = candidate;
  }

  PeriodicOrbit<Real> orbit;
  orbit.a = a;
  orbit.period = p;
  Real y = x;
  Real m = 1;
  for (int k = 0; k < p; ++k) {
    orbit.points.push_back(y);
    m *= -2 * a * y;
    y = apply_map(a, y);
  }
  if (!(abs(y - x) < Real(1e-10))) {
    throw Error(ErrorKind::NoConvergence, "cycle of period " + std::to_string(p) + " does not close");
  }
  for (int q = 1; q < p; ++q) {
    if (p % q != 0) continue;
    if (abs(orbit.points[static_cast<std::size_t>(q)] - x) < Real(1e-8)) {
      throw Error(ErrorKind::NotMinimalPeriod,
                  "orbit of requested period " + std::to_string(p) + " has period " + std::to_string(q));
    }
  }
  orbit.multiplier = m;
  orbit.stability = classify_multiplier(m);
  return orbit;
}

template <class Real>
Real ContinuationPath<Real>::a_min() const {
  return nodes.front().a;
}

template <class Real>
Real ContinuationPath<Real>::a_max() const {
  return nodes.back().a;
}

template <class Real>
PeriodicOrbit<Real> ContinuationPath<Real>::at(const Real& a) const {
  if (nodes.empty()) throw Error(ErrorKind::Domain, "empty continuation path");
  if (a < a_min() || a > a_max()) {
    throw Error(ErrorKind::Domain, "a=" + to_text(a) + " outside the continuation path [" + to_text(a_min()) +
                                       ", " + to_text(a_max()) + "]");
  }
  auto it = std::lower_bound(nodes.begin(), nodes.end(), a,
                             [](const PeriodicOrbit<Real>& o, const Real& v) { return o.a < v; });
  if (it != nodes.end() && it->a == a) return *it;
  const auto& right = *it;
  const auto& left = *(it - 1);
  const Real t = (a - left.a) / (right.a - left.a);
  const Real seed = left.points.front() + t * (right.points.front() - left.points.front());
  return find_periodic_orbit(a, left.period, seed);
}

namespace {

template <class Real>
Real sup_distance(const PeriodicOrbit<Real>& x, const PeriodicOrbit<Real>& y) {
  using std::abs;
  Real d = 0;
  for (std::size_t i = 0; i < x.points.size() && i < y.points.size(); ++i) {
    d = std::max<Real>(d, abs(x.points[i] - y.points[i]));
  }
  return d;
}

template <class Real>
void require_hyperbolic(const PeriodicOrbit<Real>& o, int step) {
  using std::abs;
  if (abs(o.multiplier) < Real(kHyperbolicMargin)) {
    throw Error(ErrorKind::HyperbolicityLost, "|multiplier|=" + to_text(abs(o.multiplier)) + " at a=" + to_text(o.a) +
                                                  " (step " + std::to_string(step) + ")");
  }
}

}  // namespace

template <class Real>
ContinuationPath<Real> continue_orbit(const PeriodicOrbit<Real>& orbit, const Real& a_target, int max_steps) {
  using std::abs;
  require_param(a_target);
  if (max_steps < 1) throw Error(ErrorKind::Domain, "continuation needs max_steps >= 1");
  require_hyperbolic(orbit, 0);

  ContinuationPath<Real> path;
  path.nodes.push_back(orbit);
  const Real h = (a_target - orbit.a) / max_steps;
  Real step = h;
  PeriodicOrbit<Real> current = orbit;
  int count = 0;
  while (current.a != a_target) {
    if (abs(a_target - current.a) <= abs(step)) step = a_target - current.a;
    const Real a_next = abs(a_target - current.a) <= abs(step) ? a_target : current.a + step;
    std::optional<PeriodicOrbit<Real>> next;
    try {
      next = find_periodic_orbit(a_next, current.period, current.points.front());
      if (sup_distance(*next, current) > Real(0.1)) next.reset();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoConvergence && e.kind() != ErrorKind::NotMinimalPeriod) throw;
    }
    if (!next) {
      step /= 2;
      if (abs(step) < Real(1e-14) * abs(h)) {
        throw Error(ErrorKind::NoConvergence, "continuation stalled at a=" + to_text(current.a));
      }
      continue;
    }
    ++count;
    require_hyperbolic(*next, count);
    path.nodes.push_back(*next);
    current = *next;
    if (abs(step) < abs(h)) step *= 2;
    if (abs(step) > abs(h)) step = h;
  }
  std::sort(path.nodes.begin(), path.nodes.end(),
            [](const PeriodicOrbit<Real>& l, const PeriodicOrbit<Real>& r) { return l.a < r.a; });
  return path;
}

template <class Real>
ContinuationPath<Real> join_paths(const ContinuationPath<Real>& down, const ContinuationPath<Real>& up) {
  ContinuationPath<Real> joined;
  joined.nodes = down.nodes;
  for (const auto& node : up.nodes) {
    bool seen = false;
    for (const auto& existing : joined.nodes) seen = seen || existing.a == node.a;
    if (!seen) joined.nodes.push_back(node);
  }
  std::sort(joined.nodes.begin(), joined.nodes.end(),
            [](const PeriodicOrbit<Real>& l, const PeriodicOrbit<Real>& r) { return l.a < r.a; });
  return joined;
}

template <class Real>
SolverResult<Real> find_misiurewicz(const Window<Real>& w, int N, const ContinuationPath<Real>& path,
                                    std::optional<Real> anchor, int samples) {
  using std::abs;
  if (N < 1) throw Error(ErrorKind::Domain, "Misiurewicz depth must be >= 1");
  if (w.lo < path.a_min() || w.hi > path.a_max()) {
    throw Error(ErrorKind::Domain, "window not covered by the continuation path");
  }
  auto h = [&](const Real& a) { return critical_value(a, N) - path.z_at(a); };
  auto brackets = scan_sign_changes<Real>(h, w.lo, w.hi, samples);
  if (brackets.empty()) {
    throw Error(ErrorKind::NoSignChange, "xi_" + std::to_string(N) + " - z keeps its sign on [" + to_text(w.lo) +
                                             ", " + to_text(w.hi) + "]");
  }
  bool residual_failed = false;
  Real worst = 0;
  for (const auto& b : order_by_anchor(std::move(brackets), anchor.value_or(w.hi))) {
    const Real a = bisect<Real>(h, b);
    const auto cycle = path.at(a);
    const Real residual = abs(critical_value(a, N) - cycle.points.front());
    Real x = 0;
    bool minimal = true;
    for (int j = 1; j < N && minimal; ++j) {
      x = apply_map(a, x);
      for (const auto& z : cycle.points) {
        if (abs(x - z) < Real(1e-8)) minimal = false;
      }
    }
    if (!minimal) continue;
    if (!(residual < Real(1e-12))) {
      residual_failed = true;
      worst = std::max<Real>(worst, residual);
      continue;
    }
    SolverResult<Real> r;
    r.kind = "misiurewicz";
    r.a = a;
    r.period = N;
    r.residual = residual;
    r.multiplier = cycle.multiplier;
    return r;
  }
  if (residual_failed) {
    throw Error(ErrorKind::PrecisionCapExceeded, "residual " + to_text(worst) + " for N=" + std::to_string(N) +
                                                     " exceeds 1e-12 at " + std::to_string(significand_bits<Real>) +
                                                     "-bit precision");
  }
  throw Error(ErrorKind::MinimalityViolated,
              "every solution of xi_" + std::to_string(N) + " = z in the window lands on the cycle earlier");
}

std::optional<PeriodicOrbit<double>> find_attractor(MapParam a, long n_max, int p_max, double tol) {
  if (p_max < 1 || n_max < p_max) throw Error(ErrorKind::Domain, "find_attractor needs n_max >= p_max >= 1");
  const double av = a.value();
  double x = 0;
  for (long k = 0; k < n_max; ++k) x = to_phase(apply_map(av, x));
  std::vector<double> ahead{x};
  for (int k = 0; k < p_max; ++k) ahead.push_back(to_phase(apply_map(av, ahead.back())));
  for (int p = 1; p <= p_max; ++p) {
    if (!(std::abs(ahead[static_cast<std::size_t>(p)] - x) < tol)) continue;
    try {
      auto orbit = find_periodic_orbit(av, p, x);
      if (std::abs(orbit.multiplier) <= 1 + 1e-6) return orbit;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoConvergence && e.kind() != ErrorKind::NotMinimalPeriod) throw;
    }
  }
  return std::nullopt;
}

template <class Real>
EscapeRefinement<Real> refine_escape_window(const Window<Real>& w, int n_k, double delta,
                                            const ContinuationPath<Real>* path) {
  if (!(delta > 0 && delta < 1)) throw Error(ErrorKind::Domain, "delta must lie in (0, 1)");
  EscapeRefinement<Real> out;
  out.image = window_image(w, n_k, 257);
  const double d2 = delta * delta;
  if (!(out.image.intersects(-d2, d2) && out.image.length() >= delta)) {
    throw Error(ErrorKind::NotEscapeWindow, "image of xi_" + std::to_string(n_k) + " is [" +
                                                to_text(out.image.hull_lo) + ", " + to_text(out.image.hull_hi) + "]");
  }
  const int limit = static_cast<int>(std::ceil(10 * -std::log(delta)));

  bool found = false;
  for (int r = 1; r <= limit && !found; ++r) {
    try {
      const auto res = find_superstable(w, n_k + r);
      out.a_star = res.a;
      out.r_star = r;
      found = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoSignChange && e.kind() != ErrorKind::MinimalityViolated) throw;
    }
  }
  if (!found) {
    throw Error(ErrorKind::CoverageNotReached, "no image covers 0 within " + std::to_string(limit) + " extra steps");
  }
  if (!path) return out;

  for (int r = out.r_star; r <= limit; ++r) {
    try {
      const auto res = find_misiurewicz(w, n_k + r, *path);
      out.a_hat = res.a;
      out.r_hat = r;
      return out;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoSignChange && e.kind() != ErrorKind::MinimalityViolated) throw;
    }
  }
  throw Error(ErrorKind::CoverageNotReached,
              "no image crosses the continuation within " + std::to_string(limit) + " extra steps");
}

#define UNFOLD_INSTANTIATE(R)                                                                                   \
  template struct Window<R>;                                                                                    \
  template Window<R> parse_window<R>(const std::string&);                                                       \
  template WindowImage window_image<R>(const Window<R>&, int, int, int);                                        \
  template std::optional<SolverResult<R>> solve_superstable_bracket<R>(const Bracket<R>&, int);                 \
  template SolverResult<R> find_superstable<R>(const Window<R>&, int, std::optional<R>, int);                   \
  template SolverResult<R> nearest_superstable<R>(const R&, int);                                               \
  template PeriodicOrbit<R> superstable_cycle<R>(const R&, int);                                                \
  template PeriodicOrbit<R> find_periodic_orbit<R>(const R&, int, const R&);                                    \
  template struct ContinuationPath<R>;                                                                          \
  template ContinuationPath<R> continue_orbit<R>(const PeriodicOrbit<R>&, const R&, int);                       \
  template ContinuationPath<R> join_paths<R>(const ContinuationPath<R>&, const ContinuationPath<R>&);           \
  template SolverResult<R> find_misiurewicz<R>(const Window<R>&, int, const ContinuationPath<R>&,               \
                                               std::optional<R>, int);                                          \
  template EscapeRefinement<R> refine_escape_window<R>(const Window<R>&, int, double, const ContinuationPath<R>*);

UNFOLD_INSTANTIATE(double)
UNFOLD_INSTANTIATE(Extended)

#undef UNFOLD_INSTANTIATE

}  // namespace unfold
