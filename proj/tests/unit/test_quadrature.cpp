#include "gkde/errors.hpp"
#include "gkde/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gkde;
using namespace gkde::quad;

TEST(GaussLegendre, IntegratesPolynomialsExactly)
{
  for (int n : { 1, 2, 5, 15, 32, 64 }) {
    const Rule& r = gauss_legendre(n);
    ASSERT_EQ(r.size(), static_cast<std::size_t>(n));
    for (int k = 0; k <= 2 * n - 1; k += 1) {
      const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
      EXPECT_NEAR(r.integrate([k](double x) { return std::pow(x, k); }), exact, 1e-13)
        << "n=" << n << " k=" << k;
    }
  }
}

TEST(GaussLegendre, RejectsBadOrder)
{
  EXPECT_THROW(gauss_legendre(0), DomainError);
  EXPECT_THROW(gauss_legendre(65), DomainError);
}

TEST(Composite, SkipsEmptyCells)
{
  const double breaks[] = { 0.0, 0.5, 0.5, 2.0 };
  const Rule r = composite(breaks, 7);
  EXPECT_EQ(r.size(), 14u);
  EXPECT_NEAR(r.integrate([](double x) { return std::exp(x); }), std::exp(2.0) - 1.0, 1e-13);
}

TEST(RiskMesh, ContainsAnchorsAndIsSorted)
{
  for (double b : { 0.5, 0.05, 1e-3 }) {
    const auto br = risk_breaks(b);
    EXPECT_EQ(br.front(), 0.0);
    EXPECT_EQ(br.back(), 3.0);
    EXPECT_TRUE(std::is_sorted(br.begin(), br.end()));
    EXPECT_NE(std::find(br.begin(), br.end(), 1.0), br.end());
    EXPECT_NE(std::find(br.begin(), br.end(), 7.0 / 8.0), br.end());
  }
  EXPECT_THROW(risk_breaks(0.0), DomainError);
}

TEST(RiskMesh, IntegratesSmoothFunction)
{
  const Rule r = risk_mesh(0.01);
  EXPECT_NEAR(r.integrate([](double x) { return std::sin(x); }), 1.0 - std::cos(3.0), 1e-13);
}

TEST(Adaptive, HandlesEndpointSingularity)
{
  const auto res = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                      { 1e-10, 0.0, 4000 });
  EXPECT_NEAR(res.value, 2.0, 1e-8);
}

TEST(Adaptive, ReportsNonConvergence)
{
  EXPECT_THROW(integrate_adaptive([](double x) { return 1.0 / x; }, 0.0, 1.0, { 1e-12, 0.0, 50 }),
               QuadratureNonConvergence);
}
