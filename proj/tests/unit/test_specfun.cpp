#include "gkde/errors.hpp"
#include "gkde/specfun.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace gkde;
using namespace gkde::specfun;

namespace {

struct Ref
{
  double u;
  double value;
};

// mpmath, 40 significant digits
const std::vector<Ref> kLogGamma = {
  { 0.001, 6.9071788853838536825 },     { 0.01, 4.5994798780420217225 },
  { 0.1, 2.2527126517342059599 },       { 0.3, 1.0957979948180755217 },
  { 0.5, 0.5723649429247000870717 },    { 0.7, 0.26086724653166651439 },
  { 0.9, 0.066376239734742971189 },     { 0.99, 0.0058548067647097761793 },
  { 1.01, -0.005690307946069645522 },   { 1.1, -0.049872441259839724148 },
  { 1.5, -0.12078223763524522235 },     { 1.9, -0.038984275923083330039 },
  { 1.999, -0.00042246180069215377611 }, { 2.001, 0.00042310673480016362518 },
  { 2.5, 0.28468287047291915963 },      { 3.3, 0.98709857789473458788 },
  { 7.7, 7.9265413562690044281 },       { 12.5, 18.734347511936445702 },
  { 55.5, 166.32150615984036914 },      { 1234.5, 7550.5509010778948957 },
  { 1e5, 1051287.7089736568949 },       { 1e8, 1742068066.1038347093 },
};

struct IncRef
{
  double a;
  double z;
  double q;
};

const std::vector<IncRef> kUpper = {
  { 0.5, 0.3, 0.43857802608099986352 },  { 0.5, 2.0, 0.045500263896358414401 },
  { 2.0, 2.0, 0.4060058497098380756820 }, { 3.0, 1.0, 0.91969860292860580399 },
  { 3.0, 7.0, 0.02963616388052177676 },  { 10.5, 8.0, 0.76965111174870093024 },
  { 10.5, 15.0, 0.091988007223794042203 }, { 41.0, 40.0, 0.54191817836253703985 },
  { 201.0, 190.0, 0.77842365366361768247 }, { 1001.0, 1030.0, 0.17920264017724087964 },
};

} // namespace

TEST(LogGamma, MatchesHighPrecisionReference)
{
  for (const auto& r : kLogGamma) {
    const double tol = 1e-13 * std::max(1.0, std::abs(r.value));
    EXPECT_NEAR(log_gamma(r.u), r.value, tol) << "u=" << r.u;
  }
}

TEST(LogGamma, RelativeAccuracyNearZerosOfLogGamma)
{
  for (const auto& r : kLogGamma)
    if (std::abs(r.u - 1.0) < 0.2 || std::abs(r.u - 2.0) < 0.2)
      EXPECT_NEAR(log_gamma(r.u) / r.value, 1.0, 1e-12) << "u=" << r.u;
}

TEST(LogGamma, RecurrenceHolds)
{
  for (double u = 0.05; u < 60.0; u *= 1.37)
    EXPECT_NEAR(log_gamma(u + 1.0) - log_gamma(u), std::log(u), 1e-12 * std::max(1.0, u));
}

TEST(LogGamma, RejectsNonPositive)
{
  EXPECT_THROW(log_gamma(0.0), DomainError);
  EXPECT_THROW(log_gamma(-1.5), DomainError);
  EXPECT_THROW(log_gamma(std::nan("")), DomainError);
  EXPECT_THROW(log_gamma(INFINITY), DomainError);
}

TEST(IncompleteGamma, UpperMatchesReference)
{
  for (const auto& r : kUpper)
    EXPECT_NEAR(reg_gamma_upper(r.a, r.z) / r.q, 1.0, 1e-11) << "a=" << r.a << " z=" << r.z;
}

TEST(IncompleteGamma, ExponentialCase)
{
  for (double z : { 0.1, 1.0, 4.0, 30.0 })
    EXPECT_NEAR(reg_gamma_upper(1.0, z) / std::exp(-z), 1.0, 1e-13);
}

TEST(IncompleteGamma, LowerPlusUpperIsOne)
{
  for (double a : { 0.3, 1.0, 2.5, 17.0, 300.0 })
    for (double z : { 0.01, 0.5, 1.0, 3.0, 20.0, 310.0 })
      EXPECT_NEAR(reg_gamma_lower(a, z) + reg_gamma_upper(a, z), 1.0, 1e-13);
}

TEST(IncompleteGamma, EdgesAndErrors)
{
  EXPECT_EQ(reg_gamma_upper(2.0, 0.0), 1.0);
  EXPECT_EQ(reg_gamma_lower(2.0, 0.0), 0.0);
  EXPECT_EQ(reg_gamma_upper(2.0, INFINITY), 0.0);
  EXPECT_THROW(reg_gamma_upper(0.0, 1.0), DomainError);
  EXPECT_THROW(reg_gamma_upper(1.0, -1.0), DomainError);
}

TEST(IncompleteGamma, MonotoneInZ)
{
  double prev = 1.0;
  for (double z = 0.0; z < 60.0; z += 0.25) {
    const double q = reg_gamma_upper(21.0, z);
    EXPECT_LE(q, prev + 1e-15);
    prev = q;
  }
}

TEST(StirlingRatio, ReferenceValues)
{
  EXPECT_NEAR(stirling_ratio(1.0).value, 0.9221370088957891168792, 1e-14);
  EXPECT_NEAR(stirling_ratio(1e6).value, 0.99999991666667013889, 1e-14);
  EXPECT_EQ(stirling_ratio(0.0).value, 0.0);
  EXPECT_EQ(stirling_ratio(INFINITY).value, 1.0);
  EXPECT_THROW(stirling_ratio(-1.0), DomainError);
}

TEST(StirlingRatio, IncreasesToOne)
{
  double prev = 0.0;
  for (double u = 1e-3; u < 1e7; u *= 1.5) {
    const double r = stirling_ratio(u).value;
    EXPECT_GT(r, prev);
    EXPECT_LT(r, 1.0);
    prev = r;
  }
}

TEST(StirlingRatio, SeriesAndDirectRoutesAgree)
{
  // around the switch point the direct formula is still accurate
  for (double u : { 10.0, 12.0, 15.0, 20.0 }) {
    const double direct = kLnSqrt2Pi - u + (u + 0.5) * std::log(u) - log_gamma(u + 1.0);
    EXPECT_NEAR(log_stirling_ratio(u), direct, 2e-13) << u;
  }
}

TEST(StirlingRatio, GammaIdentityInLogSpace)
{
  // Gamma(u+1) R(u) = sqrt(2 pi) e^{-u} u^{u+1/2}
  for (double u : { 0.5, 3.0, 9.0, 50.0, 1e3, 1e5 }) {
    const double lhs = log_gamma(u + 1.0) + log_stirling_ratio(u);
    const double rhs = kLnSqrt2Pi - u + (u + 0.5) * std::log(u);
    EXPECT_NEAR(lhs, rhs, 1e-14 * std::max(1.0, std::abs(rhs)) * 8) << u;
  }
}
