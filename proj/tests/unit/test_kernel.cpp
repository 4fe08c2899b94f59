#include "gkde/errors.hpp"
#include "gkde/kernel.hpp"
#include "gkde/quadrature.hpp"
#include "gkde/specfun.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace gkde;

namespace {

double normalization(double x, double b)
{
  const KernelPoint kp(x, b);
  const double sd = std::sqrt(x * b + b * b);
  const double upper = x + 40.0 * sd + 40.0 * b;
  std::vector<double> breaks{ 0.0 };
  for (double off : { -10.0, -3.0, 0.0, 3.0, 10.0 }) {
    const double t = x + off * sd;
    if (t > breaks.back() && t < upper)
      breaks.push_back(t);
  }
  breaks.push_back(upper);
  return quad::integrate_adaptive([&](double t) { return kernel_pdf(kp, t); }, breaks,
                                  { 1e-12, 0.0, 4000 })
    .value;
}

} // namespace

TEST(KernelPoint, Validation)
{
  EXPECT_NO_THROW(KernelPoint(0.0, 1.0));
  EXPECT_THROW(KernelPoint(-0.1, 0.1), DomainError);
  EXPECT_THROW(KernelPoint(0.1, 0.0), DomainError);
  EXPECT_THROW(KernelPoint(0.1, 1.5), DomainError);
  const KernelPoint kp(0.3, 0.1);
  EXPECT_DOUBLE_EQ(kp.shape(), 4.0);
  EXPECT_DOUBLE_EQ(kp.scale(), 0.1);
}

TEST(KernelPdf, ExponentialAtOrigin)
{
  EXPECT_NEAR(kernel_pdf(KernelPoint(0.0, 0.1), 0.2), 10.0 * std::exp(-2.0), 1e-14);
  EXPECT_THROW(kernel_pdf(KernelPoint(0.0, 0.1), -0.1), DomainError);
  EXPECT_EQ(kernel_pdf(KernelPoint(0.2, 0.1), 0.0), 0.0);
}

TEST(KernelPdf, ModeAtX)
{
  for (double b : { 0.5, 0.1, 0.01, 1e-3 })
    for (double x : { 0.0, 0.05, 0.3, 1.0, 2.5 }) {
      const KernelPoint kp(x, b);
      const double peak = kernel_pdf(kp, x);
      for (double t = 0.0; t < 4.0; t += 0.0137)
        EXPECT_LE(kernel_pdf(kp, t), peak * (1.0 + 1e-12));
    }
}

TEST(KernelPdf, Normalized)
{
  EXPECT_NEAR(normalization(0.5, 0.01), 1.0, 1e-9);
  for (double b : { 1.0, 0.1, 0.01, 1e-3, 1e-4 })
    for (double x : { 0.0, 1e-3, 0.1, 0.5, 1.0, 3.0 })
      EXPECT_NEAR(normalization(x, b), 1.0, 1e-8) << "x=" << x << " b=" << b;
}

TEST(KernelPdf, StirlingBranchIsContinuous)
{
  // shape a = x / b crosses the branch switch at 10
  const double b = 0.01;
  for (double t : { 0.08, 0.1, 0.12 }) {
    const double below = kernel_pdf(KernelPoint(0.1 - 1e-12, b), t);
    const double above = kernel_pdf(KernelPoint(0.1, b), t);
    EXPECT_NEAR(below / above, 1.0, 1e-9);
  }
}

TEST(KernelMoments, Exact)
{
  auto [m, v] = kernel_mean_var(KernelPoint(0.5, 0.1));
  EXPECT_DOUBLE_EQ(m, 0.6);
  EXPECT_NEAR(v, 0.06, 1e-16);
  auto [m0, v0] = kernel_mean_var(KernelPoint(0.0, 0.1));
  EXPECT_DOUBLE_EQ(m0, 0.1);
  EXPECT_NEAR(v0, 0.01, 1e-17);
}

TEST(KernelSampler, MeanWithinFourStandardErrors)
{
  const KernelPoint kp(0.4, 0.05);
  Rng rng(12345);
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    sum += sample_kernel(kp, rng);
  auto [m, v] = kernel_mean_var(kp);
  EXPECT_LT(std::abs(sum / n - m), 4.0 * std::sqrt(v / n));
}

TEST(KernelSampler, KolmogorovSmirnov)
{
  for (auto [x, b] : { std::pair{ 0.0, 0.2 }, std::pair{ 0.3, 0.05 }, std::pair{ 0.9, 0.002 } }) {
    const KernelPoint kp(x, b);
    Rng rng(777);
    const int n = 100000;
    std::vector<double> draws(n);
    for (auto& d : draws)
      d = sample_kernel(kp, rng);
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
      const double cdf = 1.0 - tail_prob(kp, draws[i]);
      ks = std::max({ ks, cdf - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - cdf });
    }
    // 1% critical value of the KS statistic
    EXPECT_LT(ks, 1.6276 / std::sqrt(static_cast<double>(n))) << "x=" << x << " b=" << b;
  }
}

TEST(TailProb, Values)
{
  EXPECT_NEAR(tail_prob(KernelPoint(0.0, 0.25), 1.0), std::exp(-4.0), 1e-15);
  EXPECT_EQ(tail_prob(KernelPoint(0.3, 0.25), 0.0), 1.0);
  EXPECT_THROW(tail_prob(KernelPoint(0.3, 0.25), -1.0), DomainError);
}

TEST(TailProb, ChernoffBound)
{
  const double b = 0.05;
  const double bound = 2.0 * std::exp(-(1.0 - std::log(2.0)) / (2.0 * b));
  EXPECT_NEAR(bound, 0.092979056153568976, 1e-15);
  for (double x = 0.0; x <= 0.5; x += 0.005)
    EXPECT_LE(tail_prob(KernelPoint(x, b), 1.0), bound) << x;
}

TEST(L2Integral, OriginValue)
{
  EXPECT_DOUBLE_EQ(l2_integral(KernelPoint(0.0, 0.2)), 2.5);
}

TEST(L2Integral, MatchesQuadrature)
{
  const KernelPoint kp(0.25, 0.01);
  const double q = quad::integrate_adaptive(
                     [&](double t) {
                       const double k = kernel_pdf(kp, t);
                       return k * k;
                     },
                     std::vector<double>{ 0.0, 0.1, 0.25, 0.4, 2.0 }, { 1e-12, 0.0, 4000 })
                     .value;
  EXPECT_NEAR(l2_integral(kp) / q, 1.0, 1e-6);
}

TEST(L2Integral, StirlingRatioIdentity)
{
  for (double x : { 0.1, 0.25, 0.5, 1.0 })
    for (double b : { 1e-1, 1e-2, 1e-3, 1e-4 }) {
      const double a = x / b;
      const double r1 = specfun::stirling_ratio(a).value;
      const double r2 = specfun::stirling_ratio(2.0 * a).value;
      const double alt = 0.5 / std::sqrt(specfun::kPi) / std::sqrt(b * x) * r1 * r1 / r2;
      EXPECT_NEAR(l2_integral(KernelPoint(x, b)) / alt, 1.0, 1e-10) << x << " " << b;
    }
}

TEST(Bounds, SupEnvelope)
{
  double worst = 0.0;
  for (double b : { 1.0, 0.5, 0.1, 0.01, 1e-3, 1e-4 })
    for (double x = 1e-6; x <= 1.0; x *= 1.1) {
      const KernelPoint kp(x, b);
      worst = std::max(worst, kernel_pdf(kp, x) * std::sqrt(b) * std::sqrt(x + b));
      const auto bd = kernel_bounds(kp);
      EXPECT_LE(l2_integral(kp), bd.sup_bound);
      EXPECT_GT(bd.l2_value, 0.0);
      EXPECT_TRUE(std::isfinite(bd.tail_bound) && bd.tail_bound > 0.0);
    }
  EXPECT_LE(worst, kSupEnvelope);
  EXPECT_GT(worst, 0.99);
}

TEST(Bounds, ExponentialTail)
{
  EXPECT_NEAR(kTailRate, std::log(3.0) - 1.0 + 1.0 / 3.0, 1e-16);
  for (double b : { 0.05, 0.1, 0.25, 0.5, 1.0 })
    for (double x = 3.0; x <= 20.0; x += 0.25) {
      const KernelPoint kp(x, b);
      const double scaled = sup_on_unit_interval(kp) * std::sqrt(x * b) * std::exp(kTailRate * x / b);
      EXPECT_LE(scaled, kTailEnvelope) << x << " " << b;
      EXPECT_LE(sup_on_unit_interval(kp), kernel_bounds(kp).tail_bound * (1.0 + 1e-12));
    }
}

TEST(SupOnUnitInterval, Values)
{
  const KernelPoint inside(0.5, 0.01);
  EXPECT_EQ(sup_on_unit_interval(inside), kernel_pdf(inside, 0.5));
  const KernelPoint outside(3.0, 0.1);
  EXPECT_EQ(sup_on_unit_interval(outside), kernel_pdf(outside, 1.0));
  EXPECT_LT(sup_on_unit_interval(KernelPoint(10.0, 0.05)), 1e-30);
}

TEST(TailIntegral, BoundsQuadrature)
{
  for (double b : { 0.05, 0.1, 0.2 })
    for (double p : { 1.0, 2.0, 4.0 }) {
      const double q = quad::integrate_adaptive(
                         [&](double x) { return std::pow(sup_on_unit_interval(KernelPoint(x, b)), p); },
                         3.0, 30.0, { 1e-300, 1e-10, 4000 })
                         .value;
      EXPECT_LE(q, tail_integral_bound(b, p));
    }
}

TEST(LocalRatio, Values)
{
  EXPECT_EQ(local_ratio(KernelPoint(0.5, 0.01), 0.0), 1.0);
  EXPECT_NEAR(local_ratio(KernelPoint(0.5, 1e-6), 2.5), std::exp(-6.25), 1e-3);
  EXPECT_THROW(local_ratio(KernelPoint(0.01, 0.01), -1.0), DomainError);
}

TEST(LocalRatio, ConsistentWithKernel)
{
  for (double x : { 0.25, 0.5, 0.8 }) {
    const double b = 1e-4;
    const double delta = 2.5;
    const KernelPoint kp(x, b);
    const double ratio = kernel_pdf(kp, x + delta * std::sqrt(b)) / kernel_pdf(kp, x);
    EXPECT_NEAR(local_ratio(kp, delta) / ratio, 1.0, 1e-10);
  }
}

TEST(LocalRatio, KernelLowerBound)
{
  const double b = 1e-4;
  double lowest = INFINITY;
  for (double x = 0.25; x <= 5.0 / 6.0; x += 0.01) {
    const KernelPoint kp(x, b);
    lowest = std::min(lowest, kernel_pdf(kp, x + 2.5 * std::sqrt(b)) * std::sqrt(b));
  }
  // attained at x = 1/4: about exp(-12.5) / sqrt(2 pi / 4)
  EXPECT_GT(lowest, 5e-6);
}
