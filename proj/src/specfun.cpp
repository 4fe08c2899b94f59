#include "gkde/specfun.hpp"

#include "gkde/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace gkde::specfun {

namespace {

constexpr double kEulerGamma = 0.5772156649015328606065;

// zeta(2), zeta(3), ..., zeta(26)
constexpr std::array<double, 25> kZeta = {
  1.64493406684822643647, 1.2020569031595942854,  1.08232323371113819152,
  1.03692775514336992633, 1.01734306198444913971, 1.00834927738192282684,
  1.00407735619794433938, 1.00200839282608221442, 1.00099457512781808534,
  1.00049418860411946456, 1.0002460865533080483,  1.00012271334757848915,
  1.00006124813505870483, 1.00003058823630702049, 1.00001528225940865187,
  1.00000763719763789976, 1.00000381729326499984, 1.00000190821271655394,
  1.0000009539620338728,  1.00000047693298678781, 1.00000023845050272773,
  1.00000011921992596531, 1.00000005960818905126, 1.00000002980350351465,
  1.00000001490155482837
};

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
  0.99999999999980993227684700473478,  676.520368121885098567009190444019,
  -1259.13921672240287047156078755283, 771.3234287776530788486528258894,
  -176.61502916214059906584551354,     12.507343278686904814458936853,
  -0.13857109526572011689554707,       9.984369578019570859563e-6,
  1.50563273514931155834e-7
};

constexpr double kSeriesRadius = 0.2;
constexpr double kStirlingSeriesCutoff = 10.0;
constexpr double kEps = 1e-15;
constexpr int kMinIterations = 500;

// ln Gamma(1 + e) for |e| <= 0.2 via its Taylor series.
double log_gamma_one_plus(double e)
{
  double sum = -kEulerGamma * e;
  double power = -e;
  for (std::size_t i = 0; i < kZeta.size(); ++i) {
    power *= -e;
    const double k = static_cast<double>(i + 2);
    sum += kZeta[i] * power / k;
  }
  return sum;
}

double log_gamma_lanczos(double u)
{
  const double z = u - 1.0;
  double series = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i)
    series += kLanczos[i] / (z + static_cast<double>(i));
  const double t = z + kLanczosG + 0.5;
  return kLnSqrt2Pi + (z + 0.5) * std::log(t) - t + std::log(series);
}

// Stirling correction sum 1/(12u) - 1/(360u^3) + ..., i.e. -ln R(u).
double stirling_series(double u)
{
  const double r = 1.0 / u;
  const double r2 = r * r;
  return r * (1.0 / 12.0 +
              r2 * (-1.0 / 360.0 +
                    r2 * (1.0 / 1260.0 +
                          r2 * (-1.0 / 1680.0 +
                                r2 * (1.0 / 1188.0 +
                                      r2 * (-691.0 / 360360.0 +
                                            r2 * (1.0 / 156.0 +
                                                  r2 * (-3617.0 / 122400.0))))))));
}

int iteration_cap(double a)
{
  return kMinIterations + static_cast<int>(std::ceil(10.0 * std::sqrt(a)));
}

void check_incomplete_args(double a, double z)
{
  if (!(a > 0.0) || !std::isfinite(a))
    throw DomainError("incomplete gamma: shape must be positive and finite, got " +
                      std::to_string(a));
  if (!(z >= 0.0) || std::isnan(z))
    throw DomainError("incomplete gamma: argument must be nonnegative, got " +
                      std::to_string(z));
}

// ln(z^a e^{-z} / Gamma(a + 1)).
double log_power_prefix(double a, double z)
{
  if (a >= kStirlingSeriesCutoff) {
    const double d = (z - a) / a;
    return a * (std::log1p(d) - d) - 0.5 * std::log(2.0 * kPi * a) + log_stirling_ratio(a);
  }
  return a * std::log(z) - z - log_gamma(a + 1.0);
}

// Sum of z^n / ((a+1)...(a+n)), n >= 0.
double lower_series(double a, double z)
{
  const int cap = iteration_cap(a);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n <= cap; ++n) {
    term *= z / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps)
      return sum;
  }
  throw ConvergenceError("incomplete gamma series did not converge for a=" +
                         std::to_string(a) + ", z=" + std::to_string(z));
}

// Continued fraction for Gamma(a, z) e^{z} z^{-a}, modified Lentz.
double upper_fraction(double a, double z)
{
  constexpr double tiny = 1e-300;
  const int cap = iteration_cap(a);
  double b = z + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= cap; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny)
      d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny)
      c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps)
      return h;
  }
  throw ConvergenceError("incomplete gamma continued fraction did not converge for a=" +
                         std::to_string(a) + ", z=" + std::to_string(z));
}

} // namespace

double log_gamma(double u)
{
  if (!(u > 0.0) || !std::isfinite(u))
    throw DomainError("log_gamma: argument must be positive and finite, got " +
                      std::to_string(u));
  if (u < 0.5)
    return log_gamma(u + 1.0) - std::log(u);
  if (std::abs(u - 1.0) <= kSeriesRadius)
    return log_gamma_one_plus(u - 1.0);
  if (std::abs(u - 2.0) <= kSeriesRadius) {
    const double e = u - 2.0;
    return log_gamma_one_plus(e) + std::log1p(e);
  }
  return log_gamma_lanczos(u);
}

double reg_gamma_lower(double a, double z)
{
  check_incomplete_args(a, z);
  if (z == 0.0)
    return 0.0;
  if (std::isinf(z))
    return 1.0;
  if (z < a + 1.0)
    return std::exp(log_power_prefix(a, z)) * lower_series(a, z);
  return 1.0 - reg_gamma_upper(a, z);
}

double reg_gamma_upper(double a, double z)
{
  check_incomplete_args(a, z);
  if (z == 0.0)
    return 1.0;
  if (std::isinf(z))
    return 0.0;
  if (z < a + 1.0)
    return 1.0 - std::exp(log_power_prefix(a, z)) * lower_series(a, z);
  // z^a e^{-z} / Gamma(a) = a * z^a e^{-z} / Gamma(a + 1)
  return std::exp(log_power_prefix(a, z) + std::log(a)) * upper_fraction(a, z);
}

double log_stirling_ratio(double u)
{
  if (!(u > 0.0) || !std::isfinite(u))
    throw DomainError("log_stirling_ratio: argument must be positive and finite, got " +
                      std::to_string(u));
  if (u >= kStirlingSeriesCutoff)
    return -stirling_series(u);
  return kLnSqrt2Pi - u + (u + 0.5) * std::log(u) - log_gamma(u + 1.0);
}

StirlingRatioValue stirling_ratio(double u)
{
  if (!(u >= 0.0) || std::isnan(u))
    throw DomainError("stirling_ratio: argument must be nonnegative, got " + std::to_string(u));
  if (u == 0.0)
    return { u, 0.0 };
  if (std::isinf(u))
    return { u, 1.0 };
  return { u, std::exp(log_stirling_ratio(u)) };
}

} // namespace gkde::specfun
