#pragma once

// Finite atomic probability measures on [-1, 1] and the Wasserstein-1
// distance, which metrizes weak* convergence on the compact interval.

#include "unfold/dynamics.hpp"
#include "unfold/periodic_orbit.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace unfold {

struct Atom {
  double position;
  double weight;
};

/// Atoms sorted by strictly increasing position; weights positive and
/// summing to one within 1e-12.
class EmpiricalMeasure {
 public:
  /// Equal weights on the given points; coincident points are merged.
  static EmpiricalMeasure uniform(std::span<const double> points);
  /// Arbitrary positive weights; sorted, merged and checked.
  static EmpiricalMeasure from_atoms(std::vector<Atom> atoms);
  static EmpiricalMeasure dirac(double x);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  /// F(x) = mu((-inf, x]).
  double cdf(double x) const;

 private:
  explicit EmpiricalMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}
  std::vector<Atom> atoms_;
};

/// Equal-weight atoms at x_burn .. x_{burn+n-1} of the orbit of x0.
EmpiricalMeasure birkhoff_measure(MapParam a, double x0, long n, long burn);

/// Uniform weights 1/p on the cycle points.
template <class Real>
EmpiricalMeasure periodic_measure(const PeriodicOrbit<Real>& orbit);

/// Closed-form invariant law of f_2: F(x) = 1/2 + arcsin(x)/pi.
class ArcsineLaw {
 public:
  /// Throws Error(Domain) outside [-1, 1].
  double operator()(double x) const { return cdf(x); }
  double cdf(double x) const;
  double density(double x) const;
  /// Antiderivative of the CDF, normalized to 0 at -1.
  double cdf_integral(double x) const;
  /// Inverse CDF on [0, 1].
  double quantile(double p) const;
};

ArcsineLaw arcsine_reference();

/// Exact integral of |F_mu - F_nu| for two step CDFs.
double wasserstein1(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// Exact W1 between an atomic measure and the arcsine law.
double wasserstein1(const EmpiricalMeasure& mu, const ArcsineLaw& law);

/// Precomputed CDF integrals of a large reference measure, so that W1 from
/// many small measures costs O(k log n) each.
class CdfIntegrator {
 public:
  explicit CdfIntegrator(const EmpiricalMeasure& reference);
  double cdf(double x) const;
  double cdf_integral(double x) const;  ///< int_{-1}^{x} F
  /// Smallest x in [-1, 1] with F(x) >= p.
  double quantile(double p) const;

 private:
  std::vector<double> positions_;
  std::vector<double> cumulative_;  ///< F at each position (right-continuous)
  std::vector<double> integral_;    ///< int_{-1}^{positions_[i]} F
};

/// W1 between a small atomic measure and a precomputed reference.
double wasserstein1(const EmpiricalMeasure& mu, const CdfIntegrator& reference);

template <class Phi>
double integrate(Phi&& phi, const EmpiricalMeasure& mu) {
  double total = 0;
  for (const auto& atom : mu.atoms()) total += atom.weight * phi(atom.position);
  return total;
}

struct DensityHistogram {
  std::vector<double> bin_edges;  ///< bins + 1 uniform edges over [-1, 1]
  std::vector<double> masses;
};

/// Left-closed bins, the last bin also closed on the right.
DensityHistogram histogram(const EmpiricalMeasure& mu, int bins);

}  // namespace unfold
