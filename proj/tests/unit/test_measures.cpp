#include "unfold/measures.hpp"
#include "unfold/parameter_space.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace unfold;

namespace {

// Midpoint-rule integral of |F - G| over [-1, 1].
template <class F, class G>
double quadrature_w1(F&& f, G&& g, int cells = 400000) {
  double s = 0;
  const double h = 2.0 / cells;
  for (int i = 0; i < cells; ++i) {
    const double x = -1 + (i + 0.5) * h;
    s += std::fabs(f(x) - g(x));
  }
  return s * h;
}

std::vector<double> random_points(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST(EmpiricalMeasure, UniformMergesCoincidentPoints) {
  const std::vector<double> pts{0.5, -0.25, 0.5, 0.0};
  const auto mu = EmpiricalMeasure::uniform(pts);
  ASSERT_EQ(mu.size(), 3u);
  EXPECT_EQ(mu.atoms()[0].position, -0.25);
  EXPECT_DOUBLE_EQ(mu.atoms()[2].weight, 0.5);
  EXPECT_DOUBLE_EQ(mu.cdf(-0.3), 0.0);
  EXPECT_DOUBLE_EQ(mu.cdf(0.0), 0.5);
  EXPECT_DOUBLE_EQ(mu.cdf(0.5), 1.0);
}

TEST(EmpiricalMeasure, FromAtomsValidatesWeights) {
  EXPECT_THROW(EmpiricalMeasure::from_atoms({{0.1, 0.5}, {0.2, 0.4}}), Error);
  EXPECT_THROW(EmpiricalMeasure::from_atoms({{0.1, 1.5}, {0.2, -0.5}}), Error);
  const auto mu = EmpiricalMeasure::from_atoms({{0.2, 0.25}, {-0.4, 0.75}});
  EXPECT_EQ(mu.atoms().front().position, -0.4);
  EXPECT_THROW(EmpiricalMeasure::dirac(1.5), Error);
}

TEST(Wasserstein, DiracsAndShifts) {
  EXPECT_DOUBLE_EQ(wasserstein1(EmpiricalMeasure::dirac(-0.3), EmpiricalMeasure::dirac(0.45)), 0.75);
  auto pts = random_points(1, 500);
  for (auto& x : pts) x *= 0.5;
  auto shifted = pts;
  for (auto& x : shifted) x += 0.25;
  EXPECT_NEAR(wasserstein1(EmpiricalMeasure::uniform(pts), EmpiricalMeasure::uniform(shifted)), 0.25, 1e-12);
}

TEST(Wasserstein, EqualSizeSamplesMatchSortedPairing) {
  for (std::uint64_t seed = 2; seed < 6; ++seed) {
    auto x = random_points(seed, 300);
    auto y = random_points(seed + 100, 300);
    const double w = wasserstein1(EmpiricalMeasure::uniform(x), EmpiricalMeasure::uniform(y));
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    double pairing = 0;
    for (std::size_t i = 0; i < x.size(); ++i) pairing += std::fabs(x[i] - y[i]);
    EXPECT_NEAR(w, pairing / 300, 1e-12);
    EXPECT_DOUBLE_EQ(w, wasserstein1(EmpiricalMeasure::uniform(y), EmpiricalMeasure::uniform(x)));
  }
}

TEST(Wasserstein, WeightedMeasuresMatchQuadrature) {
  const auto mu = EmpiricalMeasure::from_atoms({{-0.7, 0.2}, {0.1, 0.3}, {0.65, 0.5}});
  const auto nu = EmpiricalMeasure::from_atoms({{-0.2, 0.6}, {0.9, 0.4}});
  const double q = quadrature_w1([&](double x) { return mu.cdf(x); }, [&](double x) { return nu.cdf(x); });
  EXPECT_NEAR(wasserstein1(mu, nu), q, 1e-5);
}

TEST(ArcsineLaw, ClosedForms) {
  const auto law = arcsine_reference();
  EXPECT_DOUBLE_EQ(law.cdf(0), 0.5);
  EXPECT_DOUBLE_EQ(law.cdf(-1), 0.0);
  EXPECT_DOUBLE_EQ(law.cdf(1), 1.0);
  EXPECT_THROW(law.cdf(1.01), Error);
  EXPECT_NEAR(law.density(0), 1 / std::numbers::pi, 1e-15);
  for (double p : {0.01, 0.3, 0.5, 0.77, 0.999}) EXPECT_NEAR(law.cdf(law.quantile(p)), p, 1e-12);
  // Antiderivative against Simpson's rule.
  for (double x : {-0.8, -0.1, 0.4, 1.0}) {
    const int n = 20000;
    const double h = (x + 1) / n;
    double s = law.cdf(-1) + law.cdf(x);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * law.cdf(-1 + i * h);
    EXPECT_NEAR(law.cdf_integral(x), s * h / 3, 1e-6) << x;
  }
}

TEST(ArcsineLaw, W1OfDiracAtZero) {
  const auto law = arcsine_reference();
  const auto d0 = EmpiricalMeasure::dirac(0);
  const double q = quadrature_w1([&](double x) { return law.cdf(x); }, [&](double x) { return d0.cdf(x); });
  EXPECT_NEAR(wasserstein1(d0, law), q, 1e-6);
  EXPECT_NEAR(wasserstein1(d0, law), 2 / std::numbers::pi, 1e-12);
}

TEST(ArcsineLaw, QuantileSampleIsClose) {
  const auto law = arcsine_reference();
  std::vector<double> pts;
  for (int i = 0; i < 2000; ++i) pts.push_back(law.quantile((i + 0.5) / 2000));
  const auto mu = EmpiricalMeasure::uniform(pts);
  const double w = wasserstein1(mu, law);
  EXPECT_LT(w, 2e-3);
  const double q = quadrature_w1([&](double x) { return law.cdf(x); }, [&](double x) { return mu.cdf(x); });
  EXPECT_NEAR(w, q, 1e-5);
}

TEST(CdfIntegrator, AgreesWithDirectDistance) {
  const auto ref = EmpiricalMeasure::uniform(random_points(9, 20000));
  const CdfIntegrator integ(ref);
  for (std::uint64_t s = 10; s < 14; ++s) {
    const auto mu = EmpiricalMeasure::uniform(random_points(s, 37));
    EXPECT_NEAR(wasserstein1(mu, integ), wasserstein1(mu, ref), 1e-12);
  }
  EXPECT_DOUBLE_EQ(integ.cdf(1.0), 1.0);
  EXPECT_NEAR(integ.cdf_integral(1.0), 1 - integrate([](double x) { return x; }, ref), 1e-12);
}

TEST(BirkhoffMeasure, DeterministicAndNormalised) {
  const auto mu = birkhoff_measure(MapParam(1.9), 0.123, 5000, 100);
  const auto nu = birkhoff_measure(MapParam(1.9), 0.123, 5000, 100);
  EXPECT_EQ(wasserstein1(mu, nu), 0.0);
  double total = 0;
  for (const auto& a : mu.atoms()) total += a.weight;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(PeriodicMeasure, SuperstableTwoCycle) {
  const auto mu = periodic_measure(superstable_cycle(1.0, 2));
  ASSERT_EQ(mu.size(), 2u);
  EXPECT_EQ(mu.atoms()[0].position, 0.0);
  EXPECT_EQ(mu.atoms()[1].position, 1.0);
  EXPECT_DOUBLE_EQ(mu.atoms()[1].weight, 0.5);
  EXPECT_DOUBLE_EQ(integrate([](double x) { return x * x; }, mu), 0.5);
}

TEST(Histogram, BinsCoverTheInterval) {
  const auto mu = EmpiricalMeasure::from_atoms({{-1.0, 0.25}, {0.0, 0.25}, {1.0, 0.5}});
  const auto h = histogram(mu, 4);
  ASSERT_EQ(h.bin_edges.size(), 5u);
  EXPECT_DOUBLE_EQ(h.masses[0], 0.25);
  EXPECT_DOUBLE_EQ(h.masses[2], 0.25);
  EXPECT_DOUBLE_EQ(h.masses[3], 0.5);
}
