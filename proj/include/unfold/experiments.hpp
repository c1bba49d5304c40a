#pragma once

// Drivers that assemble the solvers into convergence tables: super-stable
// sequences approaching the acip, sequences collapsing onto a repelling
// cycle, Misiurewicz parameters accumulating at a, their diagonal
// combination, and a landscape scan.

#include "unfold/bc_diagnostics.hpp"
#include "unfold/measures.hpp"
#include "unfold/parameter_space.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace unfold {

struct TableRow {
  int n = 0;
  double a = 0;
  std::string a_text;  ///< a at full working precision
  int period = 0;
  double w1 = 0;
  double residual = 0;
  std::vector<std::pair<std::string, double>> extras;

  std::optional<double> extra(const std::string& key) const;
};

struct ConvergenceTable {
  std::string name;
  std::vector<TableRow> rows;  ///< sorted by n
  std::vector<std::pair<std::string, std::string>> info;
  std::vector<std::string> notes;
};

/// Runs fn(0) .. fn(count-1) on up to `jobs` threads; results keep index
/// order and the first failure (by index) is rethrown.
template <class T>
std::vector<T> run_indexed(int count, int jobs, const std::function<T(int)>& fn) {
  std::vector<std::optional<T>> slots(static_cast<std::size_t>(std::max(count, 0)));
  std::vector<std::exception_ptr> errors(slots.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        slots[static_cast<std::size_t>(i)].emplace(fn(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, std::max(count, 1));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  std::vector<T> out;
  out.reserve(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

enum class Reference { Birkhoff, Arcsine };

struct AcipOptions {
  Reference reference = Reference::Birkhoff;
  long reference_iterates = 1'000'000;
  long burn = 1000;
  double epsilon = 1e-3;  ///< bracket half-width for the first period
  int scan_points = 20000;
  int max_roots = 4000;
  int ce_depth = 10000;
  int jobs = 1;
};

/// For each period n, scans the bracket of half-width epsilon * n_0 / n
/// next to a for super-stable roots of period n and reports the one whose
/// cycle measure is W1-closest to the estimate of the acip of f_a.
/// Throws CEViolated if a fails the growth check at depth ce_depth.
ConvergenceTable run_acip_sequence(MapParam a, const std::vector<int>& periods, std::uint64_t seed,
                               const AcipOptions& opt = {});

template <class Real>
struct MisiurewiczData {
  int N = 0;                   ///< first time the critical orbit lands on the cycle
  PeriodicOrbit<Real> cycle;  ///< rotated so that xi_N is the first point
};

/// Finds a repelling cycle of period <= 16 on which the critical orbit
/// lands within 64 steps. Throws NotMisiurewicz.
template <class Real>
MisiurewiczData<Real> detect_misiurewicz(const Real& a);

struct SingularOptions {
  double gamma = 0.05;
  int jobs = 1;
};

/// Row n: the period-n super-stable parameter nearest a, with the W1
/// distance from its cycle measure to the measure on the repelling cycle.
/// Throws NotMisiurewicz or PrecisionCapExceeded.
template <class Real>
ConvergenceTable run_singular_sequence(const Real& a, const std::vector<int>& n_range, const SingularOptions& opt = {});

template <class Real>
struct MisiurewiczRow {
  int N = 0;
  Real a_hat = 0;
  Real distance = 0;
  Real residual = 0;
};

template <class Real>
struct MisiurewiczSequence {
  std::vector<MisiurewiczRow<Real>> rows;
  std::vector<std::string> notes;
};

/// Solution of xi_N(b) = z(b) nearest a (from below when a = 2).
template <class Real>
SolverResult<Real> nearest_misiurewicz(const Real& a, int N, const ContinuationPath<Real>& path);

template <class Real>
MisiurewiczSequence<Real> run_misiurewicz_sequence(const Real& a, const ContinuationPath<Real>& path,
                                        const std::vector<int>& N_range, int jobs = 1);

/// Continuation of a repeller over [a - span, a + span] clipped to (0, 2].
template <class Real>
ContinuationPath<Real> repeller_path(const PeriodicOrbit<Real>& repeller, double span = 0.5, int steps = 50);

/// Diagonal sequence: for n = 1..depth, the Misiurewicz parameter b_n with
/// N = n + 2 (or a itself when none exists nearby) and the super-stable
/// root of period (n + 1)(n + 2) nearest b_n. Stops at the precision cap.
template <class Real>
ConvergenceTable run_diagonal_sequence(const Real& a, const PeriodicOrbit<Real>& repeller, int depth, int jobs = 1);

struct SpotCheck {
  double a_superstable = 0;
  int period = 0;
  double a_perturbed = 0;
  std::optional<double> multiplier;
  double w1 = 0;
  bool within = false;  ///< w1 < 0.05
};

/// Moves off the super-stable parameter of the given window until the
/// cycle multiplier is about `target`, and compares attractor measures.
SpotCheck window_spot_check(const ParamWindow& w, int period, double target = 0.1);

struct DiscontinuityResult {
  ConvergenceTable acip_side;
  ConvergenceTable singular_side;
  SpotCheck spot;
};

DiscontinuityResult run_discontinuity_demo(MapParam a, const std::vector<int>& n_range, std::uint64_t seed,
                                           int jobs = 1);

struct ScanRow {
  double a = 0;
  std::string kind;  ///< "attracting" or "chaotic-candidate" or "undetermined"
  int period = 0;
  double multiplier = 0;
  std::optional<double> lyapunov;
};

std::vector<ScanRow> window_scan(const ParamWindow& range, int grid, long n_max, double tol, std::uint64_t seed,
                                 int jobs = 1);

}  // namespace unfold
