#include "unfold/bc_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace unfold {

namespace {

constexpr int kMaxBoundSteps = 10000;

// Smallest mu used for returns whose hull reaches 0 itself.
int mu_cap(const BCConfig& cfg) { return static_cast<int>(std::ceil(-2 * std::log(cfg.delta) - 1e-9)); }

std::vector<double> critical_neighbourhood(int mu, int samples) {
  const double r = std::exp(-static_cast<double>(std::abs(mu)));
  std::vector<double> xs(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) xs[static_cast<std::size_t>(i)] = -r + 2 * r * i / (samples - 1);
  return xs;
}

std::pair<double, double> hull_of(const std::vector<double>& xs) {
  auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return {*lo, *hi};
}

// Iterates every sample once per step until the hull length exceeds
// e^{-2 alpha j}; returns that j minus one.
int bound_period_from(std::vector<std::pair<double, std::vector<double>>> families, double alpha) {
  for (int j = 1; j <= kMaxBoundSteps; ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (auto& [a, xs] : families) {
      for (double& x : xs) {
        x = to_phase(apply_map(a, x));
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    if (hi - lo > std::exp(-2 * alpha * j)) return j - 1;
  }
  throw Error(ErrorKind::DepthExceeded, "bound period longer than " + std::to_string(kMaxBoundSteps) + " steps");
}

bool covers_piece(const WindowImage& img, const BCConfig& cfg) {
  if (img.length() <= 0 || !img.intersects(-cfg.delta, cfg.delta)) return false;
  if (img.contains(0)) return true;
  const double inner = std::min(std::abs(img.hull_lo), std::abs(img.hull_hi));
  const double outer = std::min(std::max(std::abs(img.hull_lo), std::abs(img.hull_hi)), cfg.delta);
  const auto idx = classify(inner, cfg);
  if (!idx || idx->extended) return false;
  const auto [s, t] = piece_bounds(idx->mu, idx->nu);
  if (s == inner && t <= outer) return true;
  int mu = idx->mu;
  int nu = idx->nu + 1;
  if (nu > mu * mu) {
    --mu;
    nu = 1;
    if (mu < cfg.mu_min()) return false;
  }
  return piece_bounds(mu, nu).second <= outer;
}

}  // namespace

int BCConfig::mu_min() const { return static_cast<int>(std::ceil(-std::log(delta) - 1e-9)); }

void BCConfig::validate() const {
  if (!(delta > 0 && delta <= 0.01)) throw Error(ErrorKind::Domain, "delta must lie in (0, 0.01]");
  if (!(lambda > 0 && lambda <= std::log(4.0))) throw Error(ErrorKind::Domain, "lambda must lie in (0, log 4]");
  const double a = alpha_value();
  if (!(a > 0 && a <= lambda / 300 * (1 + 1e-12))) throw Error(ErrorKind::Domain, "alpha must lie in (0, lambda/300]");
}

std::optional<PartitionIndex> classify(double x, const BCConfig& cfg) {
  if (!(cfg.delta > 0 && cfg.delta < 1)) throw Error(ErrorKind::Domain, "delta must lie in (0, 1)");
  const double ax = std::abs(x);
  if (ax == 0 || ax >= cfg.delta) return std::nullopt;
  int mu = static_cast<int>(std::floor(-std::log(ax)));
  while (ax < std::exp(-static_cast<double>(mu + 1))) ++mu;
  while (ax >= std::exp(-static_cast<double>(mu))) --mu;

  PartitionIndex idx;
  const int m0 = cfg.mu_min();
  if (mu < m0) {
    idx.mu = m0;
    idx.nu = m0 * m0;
    idx.extended = true;
  } else {
    const double inner = std::exp(-static_cast<double>(mu + 1));
    const double outer = std::exp(-static_cast<double>(mu));
    const int pieces = mu * mu;
    const int nu = static_cast<int>(std::floor(pieces * (ax - inner) / (outer - inner))) + 1;
    idx.mu = mu;
    idx.nu = std::clamp(nu, 1, pieces);
  }
  if (x < 0) idx.mu = -idx.mu;
  return idx;
}

std::pair<double, double> piece_bounds(int mu, int nu) {
  const int m = std::abs(mu);
  if (m < 1 || nu < 1 || nu > m * m) throw Error(ErrorKind::Domain, "no piece (" + std::to_string(mu) + ", " + std::to_string(nu) + ")");
  const double inner = std::exp(-static_cast<double>(m + 1));
  const double len = (std::exp(-static_cast<double>(m)) - inner) / (m * m);
  const double l = inner + (nu - 1) * len;
  const double r = inner + nu * len;
  if (mu > 0) return {l, r};
  return {-r, -l};
}

CEReport check_ce(MapParam a, int n, const BCConfig& cfg) {
  if (n < 1) throw Error(ErrorKind::Domain, "check_ce needs n >= 1");
  const double av = a.value();
  const double alpha = cfg.alpha_value();
  CEReport rep;
  rep.depth = n;
  rep.min_exponent = std::numeric_limits<double>::infinity();
  LogMagnitude<double> mag;
  double x = 1;
  for (int j = 1; j <= n; ++j) {
    if (std::abs(x) < std::exp(-alpha * j)) rep.recurrence_violations.push_back(j);
    mag.multiply(-2 * av * x);
    const double exponent = mag.log() / j;
    rep.min_exponent = std::min(rep.min_exponent, exponent);
    if (!rep.first_violation && !(exponent >= cfg.lambda)) rep.first_violation = j;
    x = to_phase(apply_map(av, x));
  }
  return rep;
}

int bound_period(MapParam a, int mu, const BCConfig& cfg) {
  if (std::abs(mu) < cfg.mu_min()) throw Error(ErrorKind::Domain, "|mu| below ceil(-log delta)");
  return bound_period_from({{a.value(), critical_neighbourhood(mu, 1025)}}, cfg.alpha_value());
}

int bound_period(const ParamWindow& w, int mu, const BCConfig& cfg) {
  if (std::abs(mu) < cfg.mu_min()) throw Error(ErrorKind::Domain, "|mu| below ceil(-log delta)");
  std::vector<std::pair<double, std::vector<double>>> families;
  const int params = w.degenerate() ? 1 : 17;
  const auto xs = critical_neighbourhood(mu, 1025);
  for (int i = 0; i < params; ++i) {
    const double a = params == 1 ? w.lo : (i == params - 1 ? w.hi : w.lo + w.width() * i / (params - 1));
    families.emplace_back(a, xs);
  }
  return bound_period_from(std::move(families), cfg.alpha_value());
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::EssentialFree: return "essential_free";
    case EventKind::InessentialFree: return "inessential_free";
    case EventKind::BoundReturn: return "bound_return";
    case EventKind::Escape: return "escape";
  }
  return "unknown";
}

ReturnItinerary itinerary(const ParamWindow& w, int n_max, const BCConfig& cfg, int min_samples, int ce_samples) {
  cfg.validate();
  if (w.degenerate()) throw Error(ErrorKind::DegenerateWindow, "itinerary needs a window with lo < hi");
  if (n_max < 1) throw Error(ErrorKind::Domain, "itinerary needs n_max >= 1");
  ce_samples = std::max(ce_samples, 2);
  for (int i = 0; i < ce_samples; ++i) {
    const double a = i == ce_samples - 1 ? w.hi : w.lo + w.width() * i / (ce_samples - 1);
    const auto rep = check_ce(MapParam(a), n_max, cfg);
    if (rep.first_violation) {
      throw Error(ErrorKind::CEViolated, "a=" + to_text(a) + " loses exponential growth at j=" +
                                             std::to_string(*rep.first_violation));
    }
  }

  const double d = cfg.delta;
  ReturnItinerary it;
  it.images.push_back(window_image(w, 0, min_samples));
  int bound_end = 0;
  for (int n = 1; n <= n_max; ++n) {
    const auto img = window_image(w, n, min_samples);
    it.images.push_back(img);
    if (!img.intersects(-d, d)) continue;

    ReturnEvent ev;
    ev.time = n;
    ev.hull = img;
    const bool hits_zero = img.contains(0);
    if (!hits_zero) {
      const double nearest = img.hull_lo > 0 ? img.hull_lo : img.hull_hi;
      ev.index = classify(nearest, cfg);
    }
    if (n <= bound_end) {
      ev.kind = EventKind::BoundReturn;
      it.events.push_back(ev);
      continue;
    }
    if (img.intersects(-d * d, d * d) && img.length() >= d) {
      ev.kind = EventKind::Escape;
    } else {
      ev.kind = covers_piece(img, cfg) ? EventKind::EssentialFree : EventKind::InessentialFree;
    }
    const int mu = hits_zero || !ev.index ? mu_cap(cfg) : std::abs(ev.index->mu);
    const int p = bound_period(w, mu, cfg);
    it.bound_periods.push_back({n, p});
    bound_end = n + p;
    it.events.push_back(ev);
  }
  return it;
}

BoundDistortionReport check_bound_distortion(MapParam a, int mu, int p, const BCConfig& cfg, int samples) {
  if (p < 0) throw Error(ErrorKind::Domain, "bound period must be >= 0");
  samples = std::max(samples, 2);
  const double av = a.value();
  const double r = std::exp(-static_cast<double>(std::abs(mu)));

  // log|Df^j(1)| for j <= p
  std::vector<double> ref(static_cast<std::size_t>(p) + 1, 0.0);
  double x = 1;
  for (int j = 1; j <= p; ++j) {
    ref[static_cast<std::size_t>(j)] = ref[static_cast<std::size_t>(j) - 1] + std::log(std::abs(2 * av * x));
    x = to_phase(apply_map(av, x));
  }

  BoundDistortionReport rep;
  const double y_lo = 1 - av * r * r;
  for (int i = 0; i < samples; ++i) {
    double y = y_lo + (1 - y_lo) * i / (samples - 1);
    double log_d = 0;
    for (int j = 1; j <= p; ++j) {
      log_d += std::log(std::abs(2 * av * y));
      y = to_phase(apply_map(av, y));
      const double ratio = std::exp(log_d - ref[static_cast<std::size_t>(j)]);
      rep.ratio_min = std::min(rep.ratio_min, ratio);
      rep.ratio_max = std::max(rep.ratio_max, ratio);
    }
  }

  rep.expansion = std::numeric_limits<double>::infinity();
  const double inner = std::exp(-static_cast<double>(std::abs(mu) + 1));
  for (int i = 0; i < samples; ++i) {
    double z = inner + (r - inner) * i / samples;
    double log_d = 0;
    for (int j = 0; j < p; ++j) {
      log_d += std::log(std::abs(2 * av * z));
      z = to_phase(apply_map(av, z));
    }
    rep.expansion = std::min(rep.expansion, std::exp(log_d - cfg.lambda * p / 4));
  }
  return rep;
}

ReturnGrowthReport check_return_growth(const ReturnItinerary& it, const BCConfig& cfg) {
  ReturnGrowthReport rep;
  const ReturnEvent* prev = nullptr;
  for (const auto& ev : it.events) {
    if (!ev.essential()) continue;
    if (prev && prev->hull.length() > 0) {
      rep.ratios.push_back({prev->time, ev.time, ev.hull.length() / prev->hull.length()});
    }
    prev = &ev;
  }

  const int n_max = static_cast<int>(it.images.size()) - 1;
  std::vector<bool> free_time(static_cast<std::size_t>(n_max) + 1, false);
  for (int n = 1; n <= n_max; ++n) free_time[static_cast<std::size_t>(n)] = !it.images[static_cast<std::size_t>(n)].intersects(-cfg.delta, cfg.delta);
  for (const auto& bp : it.bound_periods) {
    for (int n = bp.start + 1; n <= std::min(bp.start + bp.length, n_max); ++n) free_time[static_cast<std::size_t>(n)] = false;
  }

  int n = 1;
  while (n <= n_max) {
    if (!free_time[static_cast<std::size_t>(n)]) {
      ++n;
      continue;
    }
    int end = n;
    while (end + 1 <= n_max && free_time[static_cast<std::size_t>(end) + 1]) ++end;
    if (end - n + 1 >= 5) {
      std::vector<std::pair<double, double>> pts;
      for (int k = n; k <= end; ++k) {
        const double len = it.images[static_cast<std::size_t>(k)].length();
        if (len > 0) pts.emplace_back(k, std::log(len));
      }
      if (pts.size() >= 2) {
        double mx = 0;
        double my = 0;
        for (const auto& [t, v] : pts) {
          mx += t;
          my += v;
        }
        mx /= static_cast<double>(pts.size());
        my /= static_cast<double>(pts.size());
        double sxy = 0;
        double sxx = 0;
        for (const auto& [t, v] : pts) {
          sxy += (t - mx) * (v - my);
          sxx += (t - mx) * (t - mx);
        }
        FreeSegment seg;
        seg.start = n;
        seg.end = end;
        seg.lambda0 = sxy / sxx;
        seg.growth = std::exp(pts.back().second - pts.front().second);
        rep.segments.push_back(seg);
      }
    }
    n = end + 1;
  }
  return rep;
}

double hausdorff_distance(double a0, double a1, double b0, double b1) {
  if (a0 > a1) std::swap(a0, a1);
  if (b0 > b1) std::swap(b0, b1);
  return std::max(std::abs(a0 - b0), std::abs(a1 - b1));
}

ShadowingReport check_parameter_shadowing(const ParamWindow& w, int mu, int p, std::optional<int> return_time, int samples) {
  if (p < 0) throw Error(ErrorKind::Domain, "bound period must be >= 0");
  samples = std::max(samples, 2);
  ShadowingReport rep;
  const double a = w.lo;
  const double b = w.hi;

  auto xa = critical_neighbourhood(mu, samples);
  auto xb = xa;
  for (int j = 1; j <= p; ++j) {
    for (double& x : xa) x = to_phase(apply_map(a, x));
    for (double& x : xb) x = to_phase(apply_map(b, x));
    const auto [alo, ahi] = hull_of(xa);
    const auto [blo, bhi] = hull_of(xb);
    if (ahi - alo > 0) {
      rep.max_ratio_parameters = std::max(rep.max_ratio_parameters, hausdorff_distance(alo, ahi, blo, bhi) / (ahi - alo));
    }
  }

  if (return_time) {
    const int n = *return_time;
    if (n < 0) throw Error(ErrorKind::Domain, "return time must be >= 0");
    std::vector<double> params(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
      params[static_cast<std::size_t>(i)] = w.degenerate() ? a : (i == samples - 1 ? b : a + w.width() * i / (samples - 1));
    }
    std::vector<double> pushed(params.size());
    std::vector<double> along(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) pushed[i] = along[i] = critical_value(params[i], n + 1);
    double worst = 0;
    for (int j = 1; j <= p; ++j) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        pushed[i] = to_phase(apply_map(a, pushed[i]));
        along[i] = to_phase(apply_map(params[i], along[i]));
      }
      const auto [plo, phi] = hull_of(pushed);
      const auto [qlo, qhi] = hull_of(along);
      if (phi - plo > 0) worst = std::max(worst, hausdorff_distance(qlo, qhi, plo, phi) / (phi - plo));
    }
    rep.max_ratio_returns = worst;
  }
  return rep;
}

template <class Real>
Real deviation_sum(const Real& a, const Real& b, int n) {
  using std::abs;
  if (n < 1) throw Error(ErrorKind::Domain, "deviation_sum needs n >= 1");
  require_param(a);
  require_param(b);
  Real xa = 0;
  Real xb = 0;
  Real total = 0;
  for (int j = 0; j < n; ++j) {
    total += abs(xa - xb);
    xa = apply_map(a, xa);
    xb = apply_map(b, xb);
  }
  return total;
}

template double deviation_sum<double>(const double&, const double&, int);
template Extended deviation_sum<Extended>(const Extended&, const Extended&, int);

}  // namespace unfold
