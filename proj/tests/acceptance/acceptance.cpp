// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include "cli.hpp"
#include "unfold/bc_diagnostics.hpp"
#include "unfold/experiments.hpp"
#include "unfold/report.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace unfold;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Real root of a^3 - 2a^2 + a - 1 by Cardano's formula.
long double cardano_root() {
  const long double p = -1.0L / 3, q = -25.0L / 27;
  const long double disc = std::sqrt(q * q / 4 + p * p * p / 27);
  return std::cbrt(-q / 2 + disc) + std::cbrt(-q / 2 - disc) + 2.0L / 3;
}

Outcome superstable_exactness() {
  const auto t0 = Clock::now();
  const auto two = find_superstable(ParamWindow(0.9, 1.1), 2);
  const auto three = find_superstable(ParamWindow(1.7, 1.8), 3);
  const double dt = seconds_since(t0);
  const double e2 = std::fabs(two.a - 1);
  const double e3 = std::fabs(three.a - static_cast<double>(cardano_root()));
  return {e2 <= 1e-14 && e3 <= 1e-10 && dt < 1,
          "|a2-1|=" + fmt("%.2e", e2) + " |a3-cardano|=" + fmt("%.2e", e3) + " runtime=" + fmt("%.3f", dt) + "s"};
}

Outcome closed_form_orbits() {
  double worst_fixed = 0, worst_two = 0, worst_identity = 0;
  for (int i = 0; i < 100; ++i) {
    const double a = 0.5 + 1.5 * i / 99;
    for (int sign : {+1, -1}) {
      const double z = (-1 + sign * std::sqrt(1 + 4 * a)) / (2 * a);
      const auto o = find_periodic_orbit(a, 1, sign > 0 ? 0.5 : -1.5);
      worst_fixed = std::max(worst_fixed, std::fabs(o.points[0] - z));
    }
  }
  for (int i = 0; i < 100; ++i) {
    const double a = 0.8 + 1.2 * i / 99;
    // Substitution check of the period-two factor at this parameter.
    for (double x : {-1.3, -0.4, 0.2, 0.9}) {
      const double f1 = 1 - a * x * x;
      const double lhs = 1 - a * f1 * f1 - x;
      const double rhs = -(a * x * x + x - 1) * (a * a * x * x - a * x + 1 - a);
      worst_identity = std::max(worst_identity, std::fabs(lhs - rhs));
    }
    const double s = std::sqrt(4 * a - 3);
    const double lo = (1 - s) / (2 * a), hi = (1 + s) / (2 * a);
    const auto o = find_periodic_orbit(a, 2, hi + 1e-3);
    const double p0 = std::min(o.points[0], o.points[1]), p1 = std::max(o.points[0], o.points[1]);
    worst_two = std::max({worst_two, std::fabs(p0 - lo), std::fabs(p1 - hi)});
  }
  return {worst_fixed <= 1e-12 && worst_two <= 1e-10 && worst_identity <= 1e-12,
          "fixed-point err=" + fmt("%.2e", worst_fixed) + " period-2 err=" + fmt("%.2e", worst_two) +
              " factor a^2x^2-ax+(1-a) identity err=" + fmt("%.2e", worst_identity)};
}

Outcome parameter_derivative() {
  // Central differences in 113-bit arithmetic with h = 1e-17.
  const Extended h("1e-17");
  const Extended lo("1.5"), hi = Extended(2) - Extended("1e-6");
  int failures = 0;
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const Extended a = lo + (hi - lo) * i / 49;
    const auto t = critical_trace(a, 25);
    for (int k = 1; k <= 25; ++k) {
      const Extended fd = (critical_value(a + h, k) - critical_value(a - h, k)) / (2 * h);
      // xi_1 = 1 for every a, so its derivative is zero and only the absolute error is meaningful.
      const double err = k == 1 ? to_double(abs(fd - t.dxi_da[k])) : to_double(abs(fd - t.dxi_da[k]) / abs(t.dxi_da[k]));
      worst = std::max(worst, err);
      if (!(err < 1e-5)) ++failures;
    }
  }
  double pattern = 0;
  const auto t2 = critical_trace(2.0, 26);
  for (int k = 0; k <= 25; ++k) {
    const double expect = -(std::pow(4.0, k) - 1) / 3;
    const double rel = expect == 0 ? std::fabs(t2.dxi_da[k + 1]) : std::fabs(t2.dxi_da[k + 1] / expect - 1);
    pattern = std::max(pattern, rel);
  }
  return {failures == 0 && pattern <= 1e-15,
          "finite-difference failures=" + std::to_string(failures) + "/1250 worst rel err=" + fmt("%.2e", worst) +
              " closed pattern at a=2 rel err=" + fmt("%.2e", pattern)};
}

Outcome arcsine_law() {
  const auto t0 = Clock::now();
  const auto law = arcsine_reference();
  const auto mu1 = birkhoff_measure(MapParam(2), seeded_phase_point(split_seed(1, 0)), 1000000, 1000);
  const auto mu2 = birkhoff_measure(MapParam(2), seeded_phase_point(split_seed(2, 0)), 1000000, 1000);
  const double w1 = wasserstein1(mu1, law);
  const double w2 = wasserstein1(mu2, law);
  const double w12 = wasserstein1(mu1, mu2);
  const double dt = seconds_since(t0);
  return {w1 < 5e-3 && w2 < 5e-3 && w12 < 5e-3 && dt < 10,
          "W1(seed 1)=" + fmt("%.2e", w1) + " W1(seed 2)=" + fmt("%.2e", w2) + " between seeds=" + fmt("%.2e", w12) +
              " runtime=" + fmt("%.2f", dt) + "s"};
}

Outcome ce_at_two() {
  const auto rep = check_ce(MapParam(2), 10000, BCConfig{});
  const double err = std::fabs(rep.min_exponent - std::log(4.0));
  bool unit = true;
  double x = 0;
  for (int n = 1; n <= 10000; ++n) {
    x = 1 - 2 * x * x;
    unit = unit && std::fabs(x) == 1;
  }
  return {err <= 1e-12 && rep.recurrence_violations.empty() && !rep.first_violation && unit,
          "|min_exponent-log 4|=" + fmt("%.2e", err) + " recurrence violations=" +
              std::to_string(rep.recurrence_violations.size()) + (unit ? " |xi_n|=1 for n<=1e4" : " |xi_n|!=1")};
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int n = lo; n <= hi; ++n) v.push_back(n);
  return v;
}

Outcome singular_sequence(ConvergenceTable& table) {
  const auto t0 = Clock::now();
  table = run_singular_sequence(2.0, range(8, 18));
  const double dt = seconds_since(t0);
  if (table.rows.size() != 11) return {false, "only " + std::to_string(table.rows.size()) + " rows"};
  bool decreasing = true;
  for (std::size_t i = 1; i < table.rows.size(); ++i) decreasing = decreasing && table.rows[i].w1 < table.rows[i - 1].w1;
  // Least squares w1 = C / n.
  double sxy = 0, sxx = 0, mean = 0;
  for (const auto& r : table.rows) {
    sxy += r.w1 / r.n;
    sxx += 1.0 / (r.n * r.n);
    mean += r.w1;
  }
  mean /= table.rows.size();
  const double c = sxy / sxx;
  double ss_res = 0, ss_tot = 0;
  for (const auto& r : table.rows) {
    ss_res += std::pow(r.w1 - c / r.n, 2);
    ss_tot += std::pow(r.w1 - mean, 2);
  }
  const double r2 = 1 - ss_res / ss_tot;
  return {decreasing && r2 > 0.9 && dt < 60,
          std::string(decreasing ? "strictly decreasing" : "NOT decreasing") + " C=" + fmt("%.4f", c) + " R^2=" +
              fmt("%.8f", r2) + " runtime=" + fmt("%.2f", dt) + "s"};
}

Outcome misiurewicz_accumulation() {
  const Extended two(2);
  const auto repeller = find_periodic_orbit(two, 1, Extended("0.4"));
  const auto seq = run_misiurewicz_sequence(two, repeller_path(repeller), range(3, 15), 4);
  if (seq.rows.size() != 13) return {false, "only " + std::to_string(seq.rows.size()) + " of 13 parameters found"};
  double rmin = 1e9, rmax = 0, res = 0;
  for (std::size_t i = 0; i < seq.rows.size(); ++i) {
    const auto& r = seq.rows[i];
    const Extended z = (-1 + sqrt(1 + 4 * r.a_hat)) / (2 * r.a_hat);
    res = std::max(res, to_double(abs(critical_value(r.a_hat, r.N) - z)));
    if (i + 1 < seq.rows.size()) {
      const double q = to_double(abs(r.a_hat - two) / abs(seq.rows[i + 1].a_hat - two));
      rmin = std::min(rmin, q);
      rmax = std::max(rmax, q);
    }
  }
  return {rmin >= 3 && rmax <= 6 && res < 1e-12,
          "repeller z(a)=(-1+sqrt(1+4a))/(2a), N=3..15 ratios in [" + fmt("%.4f", rmin) + ", " + fmt("%.4f", rmax) +
              "] max residual=" + fmt("%.2e", res)};
}

Outcome discontinuity() {
  const auto res = run_discontinuity_demo(MapParam(2), range(8, 18), 1, 4);
  const auto law = arcsine_reference();
  bool inside = true;
  double best_acip = 1e9;
  for (const auto& t : {&res.acip_side, &res.singular_side}) {
    for (const auto& r : t->rows) inside = inside && r.a > 2 - 1e-3 && r.a < 2;
  }
  for (const auto& r : res.acip_side.rows) best_acip = std::min(best_acip, r.w1);
  if (res.singular_side.rows.empty()) return {false, "singular side produced no rows"};
  const auto& last = res.singular_side.rows.back();
  // The singular side stays far from the arcsine law.
  const double last_to_arcsine = wasserstein1(periodic_measure(superstable_cycle(last.a, last.period)), law);
  return {inside && best_acip < 0.1 && last.w1 < 0.5 && last_to_arcsine > 0.5,
          std::string(inside ? "all rows in (2-1e-3, 2)" : "rows outside (2-1e-3, 2)") + " best W1(.,arcsine)=" +
              fmt("%.4f", best_acip) + " final W1(.,delta_-1)=" + fmt("%.4f", last.w1) +
              " final W1(.,arcsine)=" + fmt("%.4f", last_to_arcsine)};
}

Outcome deviation_boundedness(const ConvergenceTable& table) {
  double lo = 1e9, hi = 0;
  for (const auto& r : table.rows) {
    const double s = deviation_sum(r.a, 2.0, r.n);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {!table.rows.empty() && lo > 0 && hi / lo < 3,
          "S(n) in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "] max/min=" + fmt("%.4f", hi / lo)};
}

Outcome bound_periods() {
  const BCConfig cfg;
  std::vector<int> ps;
  bool bounded = true;
  for (int mu = 7; mu <= 12; ++mu) {
    ps.push_back(bound_period(MapParam(2), mu, cfg));
    bounded = bounded && ps.back() <= 3.0 * mu / 0.4;
  }
  double mx = 9.5, my = 0;
  for (int p : ps) my += p;
  my /= ps.size();
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 6; ++i) {
    sxy += (7 + i - mx) * (ps[i] - my);
    sxx += (7 + i - mx) * (7 + i - mx);
  }
  const double slope = sxy / sxx;
  std::string list;
  for (int p : ps) list += (list.empty() ? "" : ",") + std::to_string(p);
  return {bounded && slope > 0.5, "p(7..12)=" + list + " slope=" + fmt("%.3f", slope)};
}

Outcome derivative_comparability() {
  double worst_two = 0;
  for (int k = 1; k <= 30; ++k) {
    const auto t = critical_trace(2.0, k + 1);
    const double ratio = std::fabs(t.dxi_da[k + 1]) / std::exp(critical_value_derivative(2.0, k).log());
    const double expect = (std::pow(4.0, k) - 1) / (3 * std::pow(4.0, k));
    worst_two = std::max(worst_two, std::fabs(ratio - expect));
  }
  std::vector<double> passing;
  for (int i = 0; i <= 200; ++i) {
    const double a = 1.95 + 0.05 * i / 200;
    if (!check_ce(MapParam(a), 30, BCConfig{}).first_violation) passing.push_back(a);
  }
  if (passing.size() < 20) return {false, "only " + std::to_string(passing.size()) + " CE parameters"};
  double rmin = 1e9, rmax = 0;
  for (int j = 0; j < 20; ++j) {
    const double a = passing[j * (passing.size() - 1) / 19];
    const auto t = critical_trace(a, 31);
    for (int k = 1; k <= 30; ++k) {
      const double r = std::exp(std::log(std::fabs(t.dxi_da[k + 1])) - critical_value_derivative(a, k).log());
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
  }
  return {worst_two <= 1e-10 && rmin >= 1e-2 && rmax <= 1e2,
          "a=2 err=" + fmt("%.2e", worst_two) + " CE grid (" + std::to_string(passing.size()) +
              "/201 pass) ratios in [" + fmt("%.4f", rmin) + ", " + fmt("%.4f", rmax) + "]"};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::current_path() / "acceptance_runs";
  fs::remove_all(dir);
  const std::vector<std::vector<std::string>> runs{
      {"--seed", "3", "thm-d", "--n-range", "8..14"},
      {"--seed", "4", "--format", "csv", "thm-a", "--reference", "arcsine", "--periods", "10..12"},
      {"--seed", "5", "--jobs", "3", "scan", "--window", "1.0:2.0", "--grid", "9"},
      {"--seed", "6", "measure", "--a", "1.9", "--n", "20000"},
  };
  int identical = 0;
  std::string detail;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto first = dir / ("run" + std::to_string(i) + ".out");
    const auto again = dir / ("run" + std::to_string(i) + ".replay");
    auto args = runs[i];
    args.insert(args.begin(), {"--out", first.string()});
    std::ostringstream out, err;
    if (cli::dispatch(args, out, err) != 0) {
      detail += " run " + std::to_string(i) + " failed: " + err.str();
      continue;
    }
    // Replay through the installed binary.
    const std::string cmd = std::string(UNFOLD_CLI_PATH) + " --out " + again.string() + " replay " +
                            manifest_path(first).string() + " >/dev/null";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      detail += " replay " + std::to_string(i) + " failed";
      continue;
    }
    const bool same = read_file(first) == read_file(again) &&
                      RunManifest::parse(read_file(manifest_path(first))).output_hashes ==
                          RunManifest::parse(read_file(manifest_path(again))).output_hashes;
    if (same) ++identical;
  }
  return {identical == static_cast<int>(runs.size()),
          std::to_string(identical) + "/" + std::to_string(runs.size()) + " replays byte-identical" + detail};
}

}  // namespace

int main() {
  ConvergenceTable singular;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"super-stable solver exactness", superstable_exactness},
      {"closed-form orbit oracles", closed_form_orbits},
      {"parameter-derivative correctness", parameter_derivative},
      {"arcsine law at a=2", arcsine_law},
      {"CE diagnostics at a=2", ce_at_two},
      {"super-stable sequence collapsing onto -1", [&] { return singular_sequence(singular); }},
      {"Misiurewicz parameters accumulating at 2", misiurewicz_accumulation},
      {"two limits of cycle measures at a=2", discontinuity},
      {"deviation-sum boundedness", [&] { return deviation_boundedness(singular); }},
      {"bound-period sanity", bound_periods},
      {"parameter/space derivative comparability", derivative_comparability},
      {"determinism via manifest replay", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2zu %-44s %s  %s\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
