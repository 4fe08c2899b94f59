#include "gkde/errors.hpp"
#include "gkde/estimator.hpp"
#include "gkde/kernel.hpp"
#include "gkde/quadrature.hpp"
#include "gkde/risk.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gkde;

TEST(EstimatorConfigType, Validation)
{
  EXPECT_NO_THROW(EstimatorConfig(0.5, { 0.0, 0.1, 1.0 }));
  EXPECT_THROW(EstimatorConfig(0.0, { 0.1 }), DomainError);
  EXPECT_THROW(EstimatorConfig(1.5, { 0.1 }), DomainError);
  EXPECT_THROW(EstimatorConfig(0.1, { 0.2, 0.1 }), DomainError);
  EXPECT_THROW(EstimatorConfig(0.1, { 0.1, 0.1 }), DomainError);
  EXPECT_THROW(EstimatorConfig(0.1, { -0.1, 0.1 }), DomainError);
}

TEST(Estimate, SingleObservationIsKernel)
{
  const double t0 = 0.37;
  const EstimatorConfig cfg(0.05, { 0.0, 0.01, 0.2, 0.37, 0.6, 1.5, 2.9 });
  const auto fh = estimate({ t0 }, cfg);
  for (std::size_t i = 0; i < fh.size(); ++i) {
    const double k = kernel_pdf(KernelPoint(cfg.eval_grid[i], cfg.b), t0);
    EXPECT_NEAR(fh[i], k, 1e-12 * std::max(1.0, k) + 1e-300) << cfg.eval_grid[i];
  }
}

TEST(Estimate, HandlesZeroObservation)
{
  const EstimatorConfig cfg(0.1, { 0.0, 0.05, 0.3 });
  const auto fh = estimate({ 0.0 }, cfg);
  EXPECT_NEAR(fh[0], 10.0, 1e-12);
  EXPECT_EQ(fh[1], 0.0);
  EXPECT_EQ(fh[2], 0.0);
}

TEST(Estimate, RejectsBadData)
{
  const EstimatorConfig cfg(0.1, { 0.5 });
  EXPECT_THROW(estimate({ 0.2, -0.1 }, cfg), DomainError);
  EXPECT_THROW(estimate({}, cfg), DomainError);
  EXPECT_THROW(estimate({ NAN }, cfg), DomainError);
}

TEST(Estimate, UniformSampleNearOne)
{
  Rng rng(1);
  const auto s = sample(uniform_density(), 100000, rng);
  const auto fh = estimate(s, EstimatorConfig(0.01, { 0.5 }));
  EXPECT_NEAR(fh[0], 1.0, 0.05);
}

// The gamma kernel is a density in t, not in x: int_0^inf K_b(x, t) dx falls
// short of 1 for t near 0. The estimate's mass is compared against that
// per-observation mass, integrated independently.
double kernel_mass_in_x(double t, double b)
{
  return quad::integrate_adaptive([&](double x) { return kernel_pdf(KernelPoint(x, b), t); },
                                  std::vector<double>{ 0.0, t / 2, t, t + 0.5, 3.0 },
                                  { 1e-12, 0.0, 4000 })
    .value;
}

TEST(Estimate, TotalMass)
{
  Rng rng(3);
  const double b = 0.05;
  const auto s = sample(mirrored_gamma(4.0, 0.2), 200, rng);
  const quad::Rule mesh = quad::risk_mesh(b);
  const auto fh = estimate(s, EstimatorConfig(b, mesh.nodes));
  double expected = 0.0;
  for (double t : s)
    expected += kernel_mass_in_x(t, b) / s.size();
  const double mass = mesh.integrate_values(fh);
  EXPECT_NEAR(mass, expected, 1e-6);
  EXPECT_LE(mass, 1.0 + tail_integral_bound(b, 1.0));
}

TEST(Estimate, UnitMassAwayFromOrigin)
{
  // data in [1/2, 1]: the per-observation mass deficit is negligible
  Rng rng(4);
  auto s = sample(uniform_density(), 500, rng);
  for (auto& t : s)
    t = 0.5 + 0.5 * t;
  const double b = 0.01;
  const quad::Rule mesh = quad::risk_mesh(b);
  const auto fh = estimate(s, EstimatorConfig(b, mesh.nodes));
  EXPECT_NEAR(mesh.integrate_values(fh) + tail_integral_bound(b, 1.0), 1.0, 1e-6);
}

TEST(Estimate, LinearInSample)
{
  Rng rng(8);
  const auto d = mollify(linear_tilt(2.0));
  const auto s1 = sample(d, 500, rng);
  const auto s2 = sample(d, 500, rng);
  Sample both = s1;
  both.insert(both.end(), s2.begin(), s2.end());
  const EstimatorConfig cfg(0.02, default_grid(0.02));
  const auto a = estimate(s1, cfg);
  const auto b = estimate(s2, cfg);
  const auto c = estimate(both, cfg);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_NEAR(c[i], 0.5 * (a[i] + b[i]), 1e-12 * std::max(1.0, c[i]));
    EXPECT_GE(c[i], 0.0);
    EXPECT_TRUE(std::isfinite(c[i]));
  }
}

TEST(Estimate, ThreadCountInvariance)
{
  Rng rng(11);
  const auto s = sample(mirrored_gamma(4.0, 0.2), 3000, rng);
  const EstimatorConfig cfg(0.03, default_grid(0.03));
  const auto serial = estimate(s, cfg);
  for (std::size_t threads : { 2u, 3u, 5u }) {
    ThreadPool pool(threads);
    EXPECT_EQ(estimate(s, cfg, &pool), serial);
  }
}

TEST(BandwidthRule, Values)
{
  EXPECT_NEAR(bandwidth_rule(1024, 2.0, 1.0), 0.0625, 1e-15);
  EXPECT_DOUBLE_EQ(bandwidth_rule(1, 2.0, 0.5), 0.5);
  EXPECT_NEAR(bandwidth_rule(1000, 0.5, 2.0), 2.0 / 1000.0, 1e-15);
  EXPECT_DOUBLE_EQ(bandwidth_rule(4, 1.0, 50.0), 1.0);
  EXPECT_THROW(bandwidth_rule(0, 2.0, 1.0), DomainError);
  EXPECT_THROW(bandwidth_rule(10, 2.0, 0.0), DomainError);
}
