#include "unfold/experiments.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <string>

namespace unfold {

std::optional<double> TableRow::extra(const std::string& key) const {
  for (const auto& [k, v] : extras) {
    if (k == key) return v;
  }
  return std::nullopt;
}

namespace {

// A row or the reason it was skipped.
struct RowOutcome {
  std::optional<TableRow> row;
  std::string note;
  bool cap_reached = false;
};

void collect(ConvergenceTable& table, std::vector<RowOutcome>& outcomes, bool stop_at_cap) {
  for (auto& o : outcomes) {
    if (o.row) table.rows.push_back(std::move(*o.row));
    if (!o.note.empty()) table.notes.push_back(o.note);
    if (o.cap_reached && stop_at_cap) break;
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const TableRow& l, const TableRow& r) { return l.n < r.n; });
}

template <class Real>
double distance_to_cycle(const Real& x, const PeriodicOrbit<Real>& cycle) {
  using std::abs;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : cycle.points) best = std::min(best, to_double(abs(x - z)));
  return best;
}

// Shared by the singular and diagonal sequences: the period-p super-stable
// root nearest b and how its critical orbit follows the repelling cycle.
template <class Real>
TableRow superstable_row(const Real& a_ref, const Real& b, int p, int n, const EmpiricalMeasure& singular,
                         const PeriodicOrbit<Real>& cycle, int N, double gamma) {
  const auto res = nearest_superstable(b, p);
  const auto orbit = superstable_cycle(res.a, p);
  TableRow row;
  row.n = n;
  row.a = to_double(res.a);
  row.a_text = to_text(res.a);
  row.period = p;
  row.w1 = wasserstein1(periodic_measure(orbit), singular);
  row.residual = to_double(res.residual);

  int shadow_end = N - 1;
  Real x = 0;
  for (int j = 1; j < p; ++j) {
    x = apply_map(res.a, x);
    if (j < N) continue;
    if (distance_to_cycle(x, cycle) > gamma) break;
    shadow_end = j;
  }
  row.extras.emplace_back("shadow_end", shadow_end);
  row.extras.emplace_back("exit_steps", p - shadow_end);
  row.extras.emplace_back("deviation_sum", to_double(deviation_sum(a_ref, res.a, p)));
  return row;
}

// First j <= fallback at which the critical orbit of b sits on the cycle.
template <class Real>
int landing_time(const Real& b, const PeriodicOrbit<Real>& cycle, int fallback) {
  Real x = 0;
  for (int j = 1; j <= fallback; ++j) {
    x = apply_map(b, x);
    if (distance_to_cycle(x, cycle) < 1e-10) return j;
  }
  return fallback;
}

}  // namespace

ConvergenceTable run_acip_sequence(MapParam a, const std::vector<int>& periods, std::uint64_t seed,
                                   const AcipOptions& opt) {
  ConvergenceTable table;
  table.name = "acip_sequence";
  const auto ce = check_ce(a, opt.ce_depth, BCConfig{});
  if (ce.first_violation) {
    throw Error(ErrorKind::CEViolated, "a=" + to_text(a.value()) + " loses exponential growth at j=" +
                                           std::to_string(*ce.first_violation));
  }
  table.info.emplace_back("a", to_text(a.value()));
  table.info.emplace_back("seed", std::to_string(seed));
  table.info.emplace_back("reference", opt.reference == Reference::Arcsine ? "arcsine" : "birkhoff");
  if (periods.empty()) return table;

  std::function<double(const EmpiricalMeasure&)> distance;
  std::shared_ptr<CdfIntegrator> reference;
  if (opt.reference == Reference::Arcsine) {
    distance = [](const EmpiricalMeasure& mu) { return wasserstein1(mu, arcsine_reference()); };
  } else {
    const double x0 = seeded_phase_point(split_seed(seed, 0));
    reference = std::make_shared<CdfIntegrator>(birkhoff_measure(a, x0, opt.reference_iterates, opt.burn));
    distance = [reference](const EmpiricalMeasure& mu) { return wasserstein1(mu, *reference); };
    table.info.emplace_back("reference_start", to_text(x0));
  }

  const double av = a.value();
  const int n_first = periods.front();
  auto outcomes = run_indexed<RowOutcome>(static_cast<int>(periods.size()), opt.jobs, [&](int i) {
    const int n = periods[static_cast<std::size_t>(i)];
    RowOutcome out;
    if (n < 2) {
      out.note = "n=" + std::to_string(n) + ": period below 2 skipped";
      return out;
    }
    const double eps = opt.epsilon * n_first / n;
    const double lo = std::max(av - eps, av / 2);
    const double hi = av == 2 ? 2.0 : std::min(av + eps, 2.0);
    auto g = [n](double x) { return critical_value(x, n); };
    auto brackets = scan_sign_changes<double>(g, lo, hi, opt.scan_points);
    std::stable_sort(brackets.begin(), brackets.end(), [av](const Bracket<double>& l, const Bracket<double>& r) {
      return std::min(std::abs(l.lo - av), std::abs(l.hi - av)) < std::min(std::abs(r.lo - av), std::abs(r.hi - av));
    });
    if (static_cast<int>(brackets.size()) > opt.max_roots) brackets.resize(static_cast<std::size_t>(opt.max_roots));

    int roots = 0;
    for (const auto& b : brackets) {
      const auto res = solve_superstable_bracket(b, n);
      if (!res) continue;
      ++roots;
      const double w1 = distance(periodic_measure(superstable_cycle(res->a, n)));
      if (!out.row || w1 < out.row->w1) {
        TableRow row;
        row.n = n;
        row.a = res->a;
        row.a_text = to_text(res->a);
        row.period = n;
        row.w1 = w1;
        row.residual = res->residual;
        out.row = row;
      }
    }
    if (out.row) {
      out.row->extras.emplace_back("bracket_lo", lo);
      out.row->extras.emplace_back("roots_scanned", roots);
    } else {
      out.note = "n=" + std::to_string(n) + ": " +
                 std::string(to_string(ErrorKind::NoRootInBracket)) + " in [" + to_text(lo) + ", " + to_text(hi) + "]";
    }
    return out;
  });
  collect(table, outcomes, false);
  return table;
}

template <class Real>
MisiurewiczData<Real> detect_misiurewicz(const Real& a) {
  using std::abs;
  require_param(a);
  constexpr int kDepth = 64;
  constexpr int kMaxPeriod = 16;
  std::vector<Real> xi{Real(0)};
  for (int k = 0; k < kDepth + kMaxPeriod; ++k) xi.push_back(apply_map(a, xi.back()));

  for (int k = 1; k <= kDepth; ++k) {
    for (int q = 1; q <= kMaxPeriod; ++q) {
      if (!(abs(xi[static_cast<std::size_t>(k + q)] - xi[static_cast<std::size_t>(k)]) < Real(1e-6))) continue;
      PeriodicOrbit<Real> cycle;
      try {
        cycle = find_periodic_orbit(a, q, xi[static_cast<std::size_t>(k)]);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoConvergence && e.kind() != ErrorKind::NotMinimalPeriod) throw;
        continue;
      }
      if (cycle.stability != Stability::Repelling) continue;
      for (int N = 1; N <= kDepth; ++N) {
        const Real& x = xi[static_cast<std::size_t>(N)];
        for (std::size_t i = 0; i < cycle.points.size(); ++i) {
          if (abs(x - cycle.points[i]) < Real(1e-10)) {
            std::rotate(cycle.points.begin(), cycle.points.begin() + static_cast<std::ptrdiff_t>(i), cycle.points.end());
            return {N, cycle};
          }
        }
      }
    }
  }
  throw Error(ErrorKind::NotMisiurewicz,
              "critical orbit of a=" + to_text(a) + " does not land on a repelling cycle within 64 steps");
}

template <class Real>
ConvergenceTable run_singular_sequence(const Real& a, const std::vector<int>& n_range, const SingularOptions& opt) {
  ConvergenceTable table;
  table.name = "singular_sequence";
  const auto data = detect_misiurewicz(a);
  const auto singular = periodic_measure(data.cycle);
  table.info.emplace_back("a", to_text(a));
  table.info.emplace_back("landing_time", std::to_string(data.N));
  table.info.emplace_back("cycle_period", std::to_string(data.cycle.period));
  table.info.emplace_back("cycle_point", to_text(data.cycle.points.front()));
  table.info.emplace_back("gamma", to_text(opt.gamma));

  auto outcomes = run_indexed<RowOutcome>(static_cast<int>(n_range.size()), opt.jobs, [&](int i) {
    const int n = n_range[static_cast<std::size_t>(i)];
    RowOutcome out;
    try {
      out.row = superstable_row(a, a, n, n, singular, data.cycle, data.N, opt.gamma);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoRootInBracket) throw;
      out.note = "n=" + std::to_string(n) + ": " + e.what();
    }
    return out;
  });
  collect(table, outcomes, false);

  int exit_max = 0;
  for (const auto& row : table.rows) exit_max = std::max(exit_max, static_cast<int>(*row.extra("exit_steps")));
  table.info.emplace_back("max_exit_steps", std::to_string(exit_max));
  return table;
}

template <class Real>
SolverResult<Real> nearest_misiurewicz(const Real& a, int N, const ContinuationPath<Real>& path) {
  using std::abs;
  const Real slope = abs(critical_value_and_slope(a, N).slope);
  const Real half_width = Real(64) / (3 * std::max<Real>(slope, Real(1)));
  const Real lo = std::max<Real>(a - half_width, path.a_min());
  const Real hi = a == 2 ? a : std::min<Real>(a + half_width, path.a_max());
  return find_misiurewicz(Window<Real>(lo, hi), N, path, std::optional<Real>(a));
}

template <class Real>
MisiurewiczSequence<Real> run_misiurewicz_sequence(const Real& a, const ContinuationPath<Real>& path,
                                                   const std::vector<int>& N_range, int jobs) {
  using std::abs;
  struct Outcome {
    std::optional<MisiurewiczRow<Real>> row;
    std::string note;
  };
  auto outcomes = run_indexed<Outcome>(static_cast<int>(N_range.size()), jobs, [&](int i) {
    const int N = N_range[static_cast<std::size_t>(i)];
    Outcome out;
    try {
      const auto res = nearest_misiurewicz(a, N, path);
      out.row = MisiurewiczRow<Real>{N, res.a, abs(res.a - a), res.residual};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoSignChange && e.kind() != ErrorKind::MinimalityViolated &&
          e.kind() != ErrorKind::PrecisionCapExceeded) {
        throw;
      }
      out.note = "N=" + std::to_string(N) + ": " + e.what();
    }
    return out;
  });
  MisiurewiczSequence<Real> seq;
  for (auto& o : outcomes) {
    if (o.row) seq.rows.push_back(*o.row);
    if (!o.note.empty()) seq.notes.push_back(o.note);
  }
  return seq;
}

template <class Real>
ContinuationPath<Real> repeller_path(const PeriodicOrbit<Real>& repeller, double span, int steps) {
  const Real a = repeller.a;
  const Real lo = std::max<Real>(a - Real(span), a / 2);
  auto path = continue_orbit(repeller, lo, steps);
  if (a < 2) path = join_paths(path, continue_orbit(repeller, std::min<Real>(a + Real(span), Real(2)), steps));
  return path;
}

template <class Real>
ConvergenceTable run_diagonal_sequence(const Real& a, const PeriodicOrbit<Real>& repeller, int depth, int jobs) {
  ConvergenceTable table;
  table.name = "diagonal_sequence";
  table.info.emplace_back("a", to_text(a));
  table.info.emplace_back("repeller_point", to_text(repeller.points.front()));
  table.info.emplace_back("repeller_period", std::to_string(repeller.period));
  if (depth <= 0) return table;

  const auto path = repeller_path(repeller);
  const auto singular = periodic_measure(path.at(a));
  constexpr double kGamma = 0.05;

  auto outcomes = run_indexed<RowOutcome>(depth, jobs, [&](int i) {
    const int n = i + 1;
    const int N = n + 2;
    const int P = (n + 1) * (n + 2);
    RowOutcome out;
    Real b = a;
    bool own_b = false;
    try {
      b = nearest_misiurewicz(a, N, path).a;
      own_b = true;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::PrecisionCapExceeded) {
        out.cap_reached = true;
        out.note = "n=" + std::to_string(n) + ": " + e.what();
        return out;
      }
      if (e.kind() != ErrorKind::NoSignChange && e.kind() != ErrorKind::MinimalityViolated) throw;
      out.note = "n=" + std::to_string(n) + ": no Misiurewicz parameter with N=" + std::to_string(N) +
                 " near a, using b=a";
    }
    try {
      const auto cycle = path.at(b);
      const int landing = own_b ? N : landing_time(b, cycle, N);
      out.row = superstable_row(a, b, P, n, singular, cycle, landing, kGamma);
      out.row->extras.emplace_back("b", to_double(b));
      out.row->extras.emplace_back("N", landing);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::PrecisionCapExceeded) {
        out.cap_reached = true;
      } else if (e.kind() != ErrorKind::NoRootInBracket) {
        throw;
      }
      out.note = "n=" + std::to_string(n) + ": " + e.what();
    }
    return out;
  });
  collect(table, outcomes, true);
  return table;
}

SpotCheck window_spot_check(const ParamWindow& w, int period, double target) {
  SpotCheck out;
  const auto res = find_superstable(w, period);
  out.a_superstable = res.a;
  out.period = period;
  const double slope = std::abs(critical_value_and_slope(res.a, period).slope);
  const double expansion = std::abs(critical_value_derivative(res.a, period - 1).value());
  const double step = target / (2 * res.a * slope * expansion);
  out.a_perturbed = res.a + step <= w.hi ? res.a + step : res.a - step;

  const auto reference = periodic_measure(superstable_cycle(res.a, period));
  const auto attractor = find_attractor(MapParam(out.a_perturbed), 100000, period, 1e-9);
  if (!attractor) {
    out.w1 = std::numeric_limits<double>::infinity();
    return out;
  }
  out.multiplier = attractor->multiplier;
  out.w1 = wasserstein1(periodic_measure(*attractor), reference);
  out.within = out.w1 < 0.05;
  return out;
}

DiscontinuityResult run_discontinuity_demo(MapParam a, const std::vector<int>& n_range, std::uint64_t seed,
                                           int jobs) {
  DiscontinuityResult out;
  AcipOptions acip;
  acip.reference = a.value() == 2 ? Reference::Arcsine : Reference::Birkhoff;
  acip.jobs = jobs;
  out.acip_side = run_acip_sequence(a, n_range, seed, acip);
  SingularOptions singular;
  singular.jobs = jobs;
  out.singular_side = run_singular_sequence(a.value(), n_range, singular);
  out.spot = window_spot_check(ParamWindow(0.9, 1.1), 2);
  return out;
}

std::vector<ScanRow> window_scan(const ParamWindow& range, int grid, long n_max, double tol, std::uint64_t seed,
                                 int jobs) {
  if (grid < 1) throw Error(ErrorKind::Domain, "scan needs grid >= 1");
  if (n_max < 1) throw Error(ErrorKind::Domain, "scan needs n_max >= 1");
  return run_indexed<ScanRow>(grid, jobs, [&](int i) {
    ScanRow row;
    row.a = grid == 1 ? range.lo : (i == grid - 1 ? range.hi : range.lo + range.width() * i / (grid - 1));
    const MapParam a(row.a);
    const int p_max = static_cast<int>(std::min<long>(64, n_max));
    if (auto orbit = find_attractor(a, n_max, p_max, tol)) {
      row.kind = "attracting";
      row.period = orbit->period;
      row.multiplier = orbit->multiplier;
      return row;
    }
    const double x0 = seeded_phase_point(split_seed(seed, static_cast<std::uint64_t>(i)));
    const double exponent = lyapunov_exponent(a, x0, n_max, 1000);
    row.lyapunov = exponent;
    row.kind = exponent > 0 ? "chaotic-candidate" : "undetermined";
    return row;
  });
}

#define UNFOLD_INSTANTIATE(R)                                                                                 \
  template MisiurewiczData<R> detect_misiurewicz<R>(const R&);                                                \
  template ConvergenceTable run_singular_sequence<R>(const R&, const std::vector<int>&, const SingularOptions&); \
  template SolverResult<R> nearest_misiurewicz<R>(const R&, int, const ContinuationPath<R>&);                 \
  template MisiurewiczSequence<R> run_misiurewicz_sequence<R>(const R&, const ContinuationPath<R>&,            \
                                                              const std::vector<int>&, int);                  \
  template ContinuationPath<R> repeller_path<R>(const PeriodicOrbit<R>&, double, int);                        \
  template ConvergenceTable run_diagonal_sequence<R>(const R&, const PeriodicOrbit<R>&, int, int);

UNFOLD_INSTANTIATE(double)
UNFOLD_INSTANTIATE(Extended)

#undef UNFOLD_INSTANTIATE

}  // namespace unfold
