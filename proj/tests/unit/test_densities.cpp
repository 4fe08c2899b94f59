#include "gkde/densities.hpp"
#include "gkde/errors.hpp"
#include "gkde/quadrature.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace gkde;

namespace {

// b = (1 / (24 N))^2, nudged up so that ceil() lands on N and the bumps
// exactly fill [1/4, 3/4]
double bump_bandwidth(int N)
{
  return (1.0 + 1e-9) / (576.0 * N * N);
}

std::vector<double> fine_breaks(const TestDensity& d, double a = 0.0, double b = 1.0)
{
  std::vector<double> br;
  for (int i = 0; i <= 512; ++i)
    br.push_back(a + (b - a) * i / 512.0);
  for (double p : d.breakpoints())
    if (p > a && p < b)
      br.push_back(p);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  return br;
}

double mass(const TestDensity& d, double a = 0.0, double b = 1.0)
{
  return quad::composite(fine_breaks(d, a, b), 20).integrate([&](double x) { return d.pdf(x); });
}

std::vector<TestDensity> shipped()
{
  return { uniform_density(),
           mollify(uniform_density()),
           linear_tilt(2.0),
           mollify(linear_tilt(2.0)),
           mirrored_gamma(4.0, 0.2),
           mirrored_gamma(3.0, 0.2),
           mirrored_gamma(1.0, 0.5),
           bump_density(2.0, bump_bandwidth(1), 2.0),
           mollify(bump_density(1.0, bump_bandwidth(2), 2.0)) };
}

// derivative of order k by central differences
double central_derivative(const TestDensity& d, double x, int k, double h)
{
  static const double coeff[5][5] = { { 0, 0, 1, 0, 0 },
                                      { 0, -0.5, 0, 0.5, 0 },
                                      { 0, 1, -2, 1, 0 },
                                      { -0.5, 1, 0, -1, 0.5 },
                                      { 1, -4, 6, -4, 1 } };
  double sum = 0.0;
  for (int j = 0; j < 5; ++j)
    sum += coeff[k][j] * d.pdf(x + (j - 2) * h);
  return sum / std::pow(h, k);
}

} // namespace

TEST(HolderClassType, DerivedOrder)
{
  EXPECT_EQ(HolderClass(0.5, 2.0).m, 0);
  EXPECT_EQ(HolderClass(1.0, 2.0).m, 0);
  EXPECT_EQ(HolderClass(1.5, 2.0).m, 1);
  EXPECT_EQ(HolderClass(2.0, 2.0).m, 1);
  EXPECT_THROW(HolderClass(0.0, 2.0), DomainError);
  EXPECT_THROW(HolderClass(1.0, 0.0), DomainError);
}

TEST(GammaPdf, Values)
{
  EXPECT_NEAR(gamma_pdf(1.0, 0.2, 0.1), 5.0 * std::exp(-0.5), 1e-14);
  EXPECT_EQ(gamma_pdf(2.0, 0.2, 0.0), 0.0);
  EXPECT_EQ(gamma_pdf(2.0, 0.2, -1.0), 0.0);
  EXPECT_THROW(gamma_pdf(0.0, 0.2, 1.0), DomainError);
  EXPECT_THROW(gamma_pdf(1.0, -0.2, 1.0), DomainError);
}

TEST(GammaPdf, DerivativeMatchesDifferences)
{
  for (double s : { 0.05, 0.3, 0.9 })
    for (int k = 0; k <= 3; ++k) {
      const double h = 1e-3;
      auto g = [](double t) { return gamma_pdf(3.5, 0.2, t); };
      double fd = 0.0;
      if (k == 0)
        fd = g(s);
      else if (k == 1)
        fd = (g(s + h) - g(s - h)) / (2 * h);
      else if (k == 2)
        fd = (g(s + h) - 2 * g(s) + g(s - h)) / (h * h);
      else
        fd = (g(s + 2 * h) - 2 * g(s + h) + 2 * g(s - h) - g(s - 2 * h)) / (2 * h * h * h);
      const double exact = gamma_pdf_derivative(3.5, 0.2, s, k);
      EXPECT_NEAR(fd, exact, 2e-3 * std::max(1.0, std::abs(exact))) << s << " " << k;
    }
}

TEST(GammaPdf, SamplerHistogram)
{
  // Gamma(3, 0.2) draws from the kernel sampler's unit gamma, binned on [0.3, 0.5]
  Rng rng(99);
  const int n = 400000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    std::gamma_distribution<double> gd(3.0, 0.2);
    const double s = gd(rng);
    hits += (s > 0.35 && s < 0.45);
  }
  const double expected =
    quad::integrate_adaptive([](double s) { return gamma_pdf(3.0, 0.2, s); }, 0.35, 0.45).value;
  const double se = std::sqrt(expected * (1 - expected) / n);
  EXPECT_NEAR(static_cast<double>(hits) / n, expected, 4 * se);
  EXPECT_NEAR(gamma_pdf(3.0, 0.2, 0.4) * 0.1, expected, 0.01);
}

TEST(MirroredGamma, NormalizingConstant)
{
  for (double theta : { 0.1, 0.5, 2.0 }) {
    const auto d = mirrored_gamma(1.0, theta);
    const double c = std::get<shape::MirroredGamma>(d.shape()).c_norm;
    EXPECT_NEAR(c, 1.0 / (1.0 - std::exp(-1.0 / theta)), 1e-13);
  }
  const auto d = mirrored_gamma(4.0, 0.2);
  const double c = std::get<shape::MirroredGamma>(d.shape()).c_norm;
  EXPECT_NEAR(c, 1.36059219068191773689642251341, 1e-12);
  const double q =
    quad::integrate_adaptive([](double s) { return gamma_pdf(4.0, 0.2, s); }, 0.0, 1.0, { 1e-14 })
      .value;
  EXPECT_NEAR(c * q, 1.0, 1e-9);
  EXPECT_GT(c, 1.0);
}

TEST(MirroredGamma, FlatAtUpperEndpoint)
{
  const auto d = mirrored_gamma(3.0, 0.2);
  EXPECT_EQ(d.pdf(1.0), 0.0);
  const double h = 1e-5;
  EXPECT_LT(std::abs((d.pdf(1.0) - d.pdf(1.0 - h)) / h), 1e-3);
}

TEST(HolderMembership, Predicate)
{
  EXPECT_TRUE(holder_member_mirrored(3.0, 2.0));
  EXPECT_FALSE(holder_member_mirrored(1.5, 1.0));
  EXPECT_TRUE(holder_member_mirrored(2.0, 1.0));
  EXPECT_THROW(holder_member_mirrored(0.0, 1.0), DomainError);
}

TEST(HolderMembership, ScanAgreesWithPredicate)
{
  for (double alpha : { 1.5, 2.0, 3.0, 4.0 })
    for (double beta : { 0.5, 1.0, 2.0 }) {
      const auto scan = holder_scan_mirrored(alpha, 0.2, beta);
      EXPECT_EQ(scan.bounded, scan.predicted) << alpha << " " << beta << " slope " << scan.slope;
    }
}

TEST(HolderMembership, InclusionAcrossExponents)
{
  // bounded for beta implies bounded for every smaller beta*
  for (double alpha : { 1.5, 2.0, 2.5, 3.0, 4.0 })
    for (double beta : { 0.5, 1.0, 1.5, 2.0 })
      for (double lower : { 0.25, 0.5, 0.75, 1.0, 1.5 })
        if (lower < beta && holder_scan_mirrored(alpha, 0.2, beta).bounded)
          EXPECT_TRUE(holder_scan_mirrored(alpha, 0.2, lower).bounded)
            << alpha << " " << beta << " " << lower;
}

TEST(LinearTilt, Values)
{
  const auto d = linear_tilt(2.0);
  EXPECT_DOUBLE_EQ(d.pdf(0.0), 0.5);
  EXPECT_DOUBLE_EQ(d.pdf(1.0), 1.5);
  EXPECT_NEAR(mass(d), 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(std::get<shape::Linear>(linear_tilt(1.5).shape()).eps, 0.25);
  EXPECT_THROW(linear_tilt(1.0), DomainError);
}

TEST(Bump, StructureAndValues)
{
  const double b = bump_bandwidth(3);
  const auto d = bump_density(1.5, b, 2.0);
  const auto& bp = std::get<shape::Bump>(d.shape());
  EXPECT_EQ(bp.N, static_cast<int>(std::ceil(1.0 / (24.0 * std::sqrt(b)))));
  EXPECT_DOUBLE_EQ(bp.L_beta, 2.0 / 16.0);
  for (int k = 1; k <= 2 * bp.N; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    EXPECT_NEAR(d.pdf(bp.center(k)), 1.0 + sign * bp.amplitude, 1e-15);
  }
  EXPECT_LE(bp.center(2 * bp.N) + bp.half_width, 7.0 / 8.0);
  EXPECT_NEAR(bp.center(2 * bp.N) + bp.half_width, 0.75, 1e-8);
  EXPECT_NEAR(mass(d), 1.0, 1e-12);
  EXPECT_NEAR(1.0 - bump_psi(0.1), 0.029701, 1e-15);
  EXPECT_LE(1.0 - bump_psi(0.1), 3.0 * 0.01);
}

TEST(Bump, RejectsLargeBandwidth)
{
  EXPECT_THROW(bump_density(1.0, 0.01, 2.0), BandwidthTooLarge);
  EXPECT_THROW(bump_density(0.1, bump_bandwidth(1), 1e6), BandwidthTooLarge);
  EXPECT_THROW(bump_density(2.5, 1e-3, 2.0), DomainError);
}

TEST(Bump, LowerBoundOnDensity)
{
  for (double beta : { 0.5, 1.0, 2.0 }) {
    const auto d = bump_density(beta, bump_bandwidth(2), 2.0);
    for (int i = 0; i <= 100000; ++i)
      EXPECT_GE(d.pdf(i / 100000.0), 0.5);
  }
}

TEST(Mollifier, PiecesAreNormalized)
{
  EXPECT_EQ(mollifier_weight(0.5), 1.0);
  EXPECT_EQ(mollifier_weight(7.0 / 8.0), 1.0);
  EXPECT_EQ(mollifier_weight(1.0), 0.0);
  EXPECT_NEAR(mollifier_weight(15.0 / 16.0), 0.5, 1e-15);
  const double z = quad::integrate_adaptive(mollifier_bump, 7.0 / 8.0, 15.0 / 16.0).value;
  EXPECT_NEAR(z, 1.0, 1e-10);
  EXPECT_EQ(mollifier_bump(0.95), 0.0);
  EXPECT_NEAR(mollify(uniform_density()).compensation_mass(), 1.0 / 16.0, 1e-14);
  EXPECT_NEAR(mollify(linear_tilt(2.0)).compensation_mass(), 0.0915865725767884201731806919085,
              1e-13);
}

TEST(Mollifier, EqualsRawBelowSevenEighths)
{
  for (const auto& d : shipped()) {
    if (!d.mollified())
      continue;
    for (int i = 0; i <= 100000; ++i) {
      const double x = 0.875 * i / 100000.0;
      EXPECT_EQ(d.pdf(x), d.raw_pdf(x));
    }
  }
  EXPECT_EQ(mollify(uniform_density()).pdf(0.3), 1.0);
}

TEST(Mollifier, DerivativesVanishAtOne)
{
  const auto d = mollify(linear_tilt(2.0));
  for (int k = 0; k <= 4; ++k) {
    double prev = INFINITY;
    for (int e = 2; e <= 4; ++e) {
      const double x = 1.0 - std::pow(10.0, -e);
      const double v = std::abs(central_derivative(d, x, k, std::pow(10.0, -e - 1)));
      EXPECT_LE(v, prev) << "order " << k << " at 1-1e-" << e;
      prev = v;
    }
    EXPECT_LT(prev, 1e-12) << k;
  }
  const auto u = mollify(uniform_density());
  EXPECT_LT(std::abs(central_derivative(u, 1.0 - 1e-4, 1, 1e-6)), 1e-2);
}

TEST(Densities, UnitMassAndNonnegative)
{
  for (const auto& d : shipped()) {
    EXPECT_NEAR(mass(d), 1.0, 1e-9) << d.kind();
    for (int i = 0; i <= 100000; ++i)
      ASSERT_GE(d.pdf(i / 100000.0), 0.0) << d.kind();
    EXPECT_EQ(d.pdf(1.5), 0.0);
    EXPECT_EQ(d.pdf(-0.1), 0.0);
  }
}

TEST(Densities, SupNormDominates)
{
  for (const auto& d : shipped()) {
    double peak = 0.0;
    for (int i = 0; i <= 100000; ++i)
      peak = std::max(peak, d.pdf(i / 100000.0));
    EXPECT_LE(peak, d.sup_norm()) << d.kind();
    EXPECT_GE(peak, d.sup_norm() / 1.01) << d.kind();
  }
}

TEST(Densities, JsonRoundTrip)
{
  for (const auto& d : shipped()) {
    const auto j = d.to_json();
    const auto back = TestDensity::from_json(j);
    EXPECT_EQ(back.kind(), d.kind());
    EXPECT_EQ(back.to_json(), j);
    for (double x : { 0.1, 0.5, 0.9, 0.99 })
      EXPECT_EQ(back.pdf(x), d.pdf(x));
  }
  EXPECT_EQ(TestDensity::from_json(nlohmann::json::parse(
                                     R"({"kind":"MirroredGamma","params":{"alpha":4,"theta":0.2}})"))
              .kind(),
            "MirroredGamma");
  EXPECT_THROW(TestDensity::from_json(nlohmann::json::parse(R"({"kind":"Nope"})")), DomainError);
  EXPECT_THROW(TestDensity::from_json(nlohmann::json::parse(R"({"kind":"RawLinear"})")),
               DomainError);
}

TEST(Sampler, KolmogorovSmirnovMirroredGamma)
{
  const auto d = mirrored_gamma(3.0, 0.2);
  Rng rng(2024);
  auto draws = sample(d, 100000, rng);
  std::sort(draws.begin(), draws.end());
  // quadrature CDF on a fine table, interpolated linearly
  const int m = 4000;
  std::vector<double> cdf(m + 1, 0.0);
  for (int i = 1; i <= m; ++i)
    cdf[i] = cdf[i - 1] + quad::gauss_legendre(10).integrate([&](double u) {
               const double a = (i - 1.0) / m, b = static_cast<double>(i) / m;
               return 0.5 * (b - a) * d.pdf(0.5 * (a + b) + 0.5 * (b - a) * u);
             });
  double ks = 0.0;
  const double n = static_cast<double>(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double pos = draws[i] * m;
    const int j = std::min(m - 1, static_cast<int>(pos));
    const double F = cdf[j] + (cdf[j + 1] - cdf[j]) * (pos - j);
    ks = std::max({ ks, F - i / n, (i + 1) / n - F });
  }
  EXPECT_LT(ks, 1.6276 / std::sqrt(n));
}

TEST(Sampler, MeanOfMollifiedTilt)
{
  const auto d = mollify(linear_tilt(2.0));
  Rng rng(5);
  const auto draws = sample(d, 200000, rng);
  double s = 0.0, s2 = 0.0;
  for (double x : draws) {
    ASSERT_GE(x, 0.0);
    ASSERT_LE(x, 1.0);
    s += x;
    s2 += x * x;
  }
  const double n = static_cast<double>(draws.size());
  const double mean = s / n;
  const double sd = std::sqrt(s2 / n - mean * mean);
  const double exact =
    quad::composite(fine_breaks(d), 20).integrate([&](double x) { return x * d.pdf(x); });
  EXPECT_LT(std::abs(mean - exact), 4.0 * sd / std::sqrt(n));
}

TEST(Sampler, DeterministicGivenState)
{
  const auto d = mollify(bump_density(2.0, bump_bandwidth(1), 2.0));
  Rng a(17), b(17);
  EXPECT_EQ(sample(d, 1000, a), sample(d, 1000, b));
  EXPECT_THROW(sample(d, 0, a), DomainError);
}
