#include "unfold/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace unfold {

namespace {

constexpr double kMassTolerance = 1e-12;

// int_l^r |F - c| for a nondecreasing F given by its antiderivative G and
// its quantile function.
template <class Reference>
double abs_gap_integral(const Reference& ref, double l, double r, double c) {
  if (r <= l) return 0;
  const double xc = std::clamp(ref.quantile(c), l, r);
  const double g_l = ref.cdf_integral(l);
  const double g_c = ref.cdf_integral(xc);
  const double g_r = ref.cdf_integral(r);
  const double below = c * (xc - l) - (g_c - g_l);
  const double above = (g_r - g_c) - c * (r - xc);
  return std::max(below, 0.0) + std::max(above, 0.0);
}

template <class Reference>
double w1_against(const EmpiricalMeasure& mu, const Reference& ref) {
  double total = 0;
  double left = -1;
  double level = 0;
  for (const auto& atom : mu.atoms()) {
    total += abs_gap_integral(ref, left, atom.position, level);
    left = atom.position;
    level += atom.weight;
  }
  total += abs_gap_integral(ref, left, 1.0, std::min(level, 1.0));
  return total;
}

}  // namespace

EmpiricalMeasure EmpiricalMeasure::uniform(std::span<const double> points) {
  if (points.empty()) throw Error(ErrorKind::Domain, "empirical measure needs at least one point");
  std::vector<double> sorted;
  sorted.reserve(points.size());
  for (double x : points) sorted.push_back(to_phase(x));
  std::sort(sorted.begin(), sorted.end());

  const double n = static_cast<double>(sorted.size());
  std::vector<Atom> atoms;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    atoms.push_back({sorted[i], static_cast<double>(j - i) / n});
    i = j;
  }
  return EmpiricalMeasure(std::move(atoms));
}

EmpiricalMeasure EmpiricalMeasure::from_atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw Error(ErrorKind::Domain, "empirical measure needs at least one atom");
  double total = 0;
  for (auto& atom : atoms) {
    if (!(atom.weight > 0)) throw Error(ErrorKind::Domain, "atom weights must be positive");
    atom.position = to_phase(atom.position);
    total += atom.weight;
  }
  if (std::abs(total - 1) > kMassTolerance) {
    throw Error(ErrorKind::Domain, "atom weights sum to " + to_text(total) + ", not 1");
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.position < r.position; });
  std::vector<Atom> merged;
  for (const auto& atom : atoms) {
    if (!merged.empty() && merged.back().position == atom.position) {
      merged.back().weight += atom.weight;
    } else {
      merged.push_back(atom);
    }
  }
  return EmpiricalMeasure(std::move(merged));
}

EmpiricalMeasure EmpiricalMeasure::dirac(double x) { return EmpiricalMeasure({{to_phase(x), 1.0}}); }

double EmpiricalMeasure::cdf(double x) const {
  double mass = 0;
  for (const auto& atom : atoms_) {
    if (atom.position > x) break;
    mass += atom.weight;
  }
  return std::min(mass, 1.0);
}

EmpiricalMeasure birkhoff_measure(MapParam a, double x0, long n, long burn) {
  if (n < 1) throw Error(ErrorKind::Domain, "birkhoff_measure needs n >= 1");
  if (burn < 0) throw Error(ErrorKind::Domain, "burn-in must be >= 0");
  const double av = a.value();
  double x = to_phase(x0);
  for (long k = 0; k < burn; ++k) x = to_phase(apply_map(av, x));
  std::vector<double> points(static_cast<std::size_t>(n));
  for (auto& p : points) {
    p = x;
    x = to_phase(apply_map(av, x));
  }
  return EmpiricalMeasure::uniform(points);
}

template <class Real>
EmpiricalMeasure periodic_measure(const PeriodicOrbit<Real>& orbit) {
  if (orbit.points.empty()) throw Error(ErrorKind::Domain, "periodic orbit has no points");
  std::vector<double> pts;
  pts.reserve(orbit.points.size());
  for (const auto& x : orbit.points) pts.push_back(to_double(x));
  return EmpiricalMeasure::uniform(pts);
}

double ArcsineLaw::cdf(double x) const {
  if (!(x >= -1 && x <= 1)) throw Error(ErrorKind::Domain, "arcsine CDF argument " + to_text(x) + " outside [-1, 1]");
  return 0.5 + std::asin(x) / std::numbers::pi;
}

double ArcsineLaw::density(double x) const {
  if (!(x > -1 && x < 1)) throw Error(ErrorKind::Domain, "arcsine density needs |x| < 1");
  return 1 / (std::numbers::pi * std::sqrt(1 - x * x));
}

double ArcsineLaw::cdf_integral(double x) const {
  x = std::clamp(x, -1.0, 1.0);
  return x / 2 + (x * std::asin(x) + std::sqrt(std::max(0.0, 1 - x * x))) / std::numbers::pi;
}

double ArcsineLaw::quantile(double p) const {
  p = std::clamp(p, 0.0, 1.0);
  return std::sin(std::numbers::pi * (p - 0.5));
}

ArcsineLaw arcsine_reference() { return {}; }

double wasserstein1(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  const auto& x = mu.atoms();
  const auto& y = nu.atoms();
  std::size_t i = 0;
  std::size_t j = 0;
  double fx = 0;
  double fy = 0;
  double left = -1;
  double total = 0;
  while (i < x.size() || j < y.size()) {
    const double px = i < x.size() ? x[i].position : 2.0;
    const double py = j < y.size() ? y[j].position : 2.0;
    const double next = std::min(px, py);
    total += std::abs(fx - fy) * (next - left);
    left = next;
    if (px == next) fx += x[i++].weight;
    if (py == next) fy += y[j++].weight;
  }
  total += std::abs(fx - fy) * (1 - left);
  return total;
}

double wasserstein1(const EmpiricalMeasure& mu, const ArcsineLaw& law) { return w1_against(mu, law); }

CdfIntegrator::CdfIntegrator(const EmpiricalMeasure& reference) {
  const auto& atoms = reference.atoms();
  positions_.reserve(atoms.size());
  cumulative_.reserve(atoms.size());
  integral_.reserve(atoms.size());
  double mass = 0;
  double area = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i > 0) area += cumulative_.back() * (atoms[i].position - atoms[i - 1].position);
    mass += atoms[i].weight;
    positions_.push_back(atoms[i].position);
    cumulative_.push_back(std::min(mass, 1.0));
    integral_.push_back(area);
  }
  // The atoms carry total mass one; drop the rounding left by the running sum.
  if (!cumulative_.empty()) cumulative_.back() = 1;
}

double CdfIntegrator::cdf(double x) const {
  auto it = std::upper_bound(positions_.begin(), positions_.end(), x);
  if (it == positions_.begin()) return 0;
  return cumulative_[static_cast<std::size_t>(it - positions_.begin()) - 1];
}

double CdfIntegrator::cdf_integral(double x) const {
  auto it = std::upper_bound(positions_.begin(), positions_.end(), x);
  if (it == positions_.begin()) return 0;
  const auto i = static_cast<std::size_t>(it - positions_.begin()) - 1;
  return integral_[i] + cumulative_[i] * (x - positions_[i]);
}

double CdfIntegrator::quantile(double p) const {
  if (p <= 0) return -1;
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), p);
  if (it == cumulative_.end()) return 1;
  return positions_[static_cast<std::size_t>(it - cumulative_.begin())];
}

double wasserstein1(const EmpiricalMeasure& mu, const CdfIntegrator& reference) {
  return w1_against(mu, reference);
}

DensityHistogram histogram(const EmpiricalMeasure& mu, int bins) {
  if (bins < 1) throw Error(ErrorKind::Domain, "histogram needs bins >= 1");
  DensityHistogram h;
  h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.bin_edges[static_cast<std::size_t>(i)] = -1 + 2.0 * i / bins;
  h.bin_edges.back() = 1;
  h.masses.assign(static_cast<std::size_t>(bins), 0.0);
  for (const auto& atom : mu.atoms()) {
    auto it = std::upper_bound(h.bin_edges.begin(), h.bin_edges.end(), atom.position);
    auto idx = static_cast<std::ptrdiff_t>(it - h.bin_edges.begin()) - 1;
    idx = std::clamp<std::ptrdiff_t>(idx, 0, bins - 1);
    h.masses[static_cast<std::size_t>(idx)] += atom.weight;
  }
  return h;
}

template EmpiricalMeasure periodic_measure<double>(const PeriodicOrbit<double>&);
template EmpiricalMeasure periodic_measure<Extended>(const PeriodicOrbit<Extended>&);

}  // namespace unfold
