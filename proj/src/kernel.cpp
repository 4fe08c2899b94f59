#include "gkde/kernel.hpp"

#include "gkde/errors.hpp"
#include "gkde/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace gkde {

namespace {

constexpr double kStirlingShape = 10.0;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

} // namespace

KernelPoint::KernelPoint(double x, double b)
  : x_(x)
  , b_(b)
{
  if (!(x >= 0.0) || !std::isfinite(x))
    throw DomainError("kernel: evaluation point must be finite and >= 0, got " + std::to_string(x));
  if (!(b > 0.0 && b <= 1.0))
    throw DomainError("kernel: bandwidth must lie in (0, 1], got " + std::to_string(b));
}

double log_kernel_pdf(const KernelPoint& kp, double t)
{
  if (!(t >= 0.0) || std::isnan(t))
    throw DomainError("kernel_pdf: t must be >= 0, got " + std::to_string(t));
  const double x = kp.x();
  const double b = kp.b();
  if (std::isinf(t))
    return kNegInf;
  if (x == 0.0)
    return -t / b - std::log(b);
  if (t == 0.0)
    return kNegInf;
  const double a = x / b;
  if (a >= kStirlingShape) {
    // a (log1p(d) - d) - ln sqrt(2 pi x b) + ln R(a), with t = x (1 + d)
    const double d = (t - x) / x;
    return a * (std::log1p(d) - d) - 0.5 * std::log(2.0 * specfun::kPi * x * b) +
           specfun::log_stirling_ratio(a);
  }
  return a * std::log(t) - t / b - (a + 1.0) * std::log(b) - specfun::log_gamma(a + 1.0);
}

double log_kernel_normalization(const KernelPoint& kp)
{
  const double x = kp.x();
  const double b = kp.b();
  const double a = x / b;
  if (a >= kStirlingShape)
    return a * std::log(x) - a + 0.5 * std::log(2.0 * specfun::kPi * x * b) -
           specfun::log_stirling_ratio(a);
  return (a + 1.0) * std::log(b) + specfun::log_gamma(a + 1.0);
}

KernelEvaluator::KernelEvaluator(const KernelPoint& kp)
  : x_(kp.x())
  , a_(kp.x() / kp.b())
  , inv_b_(1.0 / kp.b())
  , shift_(log_kernel_normalization(kp))
  , stirling_(a_ >= kStirlingShape)
{
  if (stirling_)
    offset_ = -0.5 * std::log(2.0 * specfun::kPi * kp.x() * kp.b()) +
              specfun::log_stirling_ratio(a_);
}

double KernelEvaluator::operator()(double t) const
{
  if (t <= 0.0)
    return (a_ == 0.0 && t == 0.0) ? std::exp(-shift_) : 0.0;
  if (stirling_) {
    const double d = (t - x_) / x_;
    return std::exp(a_ * (std::log1p(d) - d) + offset_);
  }
  return std::exp(a_ * std::log(t) - t * inv_b_ - shift_);
}

double kernel_pdf(const KernelPoint& kp, double t)
{
  return std::exp(log_kernel_pdf(kp, t));
}

std::pair<double, double> kernel_mean_var(const KernelPoint& kp)
{
  const double x = kp.x();
  const double b = kp.b();
  return { x + b, x * b + b * b };
}

double tail_prob(const KernelPoint& kp, double s)
{
  if (!(s >= 0.0) || std::isnan(s))
    throw DomainError("tail_prob: threshold must be >= 0, got " + std::to_string(s));
  return specfun::reg_gamma_upper(kp.shape(), s / kp.b());
}

double l2_integral(const KernelPoint& kp)
{
  const double b = kp.b();
  const double a = kp.x() / b;
  if (a == 0.0)
    return 0.5 / b;
  return std::exp(-std::log(b) + specfun::log_gamma(2.0 * a + 1.0) -
                  (2.0 * a + 1.0) * std::log(2.0) - 2.0 * specfun::log_gamma(a + 1.0));
}

double sup_on_unit_interval(const KernelPoint& kp)
{
  return kernel_pdf(kp, std::min(kp.x(), 1.0));
}

double local_ratio(const KernelPoint& kp, double delta)
{
  const double x = kp.x();
  const double b = kp.b();
  const double sb = std::sqrt(b);
  if (!(x + delta * sb > 0.0) && delta != 0.0)
    throw DomainError("local_ratio: x + delta sqrt(b) must be positive");
  if (delta == 0.0)
    return 1.0;
  if (x == 0.0)
    return std::exp(-delta / sb);
  return std::exp((x / b) * std::log1p(delta * sb / x) - delta / sb);
}

KernelBounds kernel_bounds(const KernelPoint& kp)
{
  const double x = kp.x();
  const double b = kp.b();
  const double sup = kSupEnvelope / std::sqrt(b * (x + b));
  KernelBounds out{ sup, l2_integral(kp), sup };
  if (x >= 3.0)
    out.tail_bound = kTailEnvelope / std::sqrt(x * b) * std::exp(-kTailRate * x / b);
  return out;
}

double tail_integral_bound(double b, double p)
{
  if (!(b > 0.0) || !(p > 0.0))
    throw DomainError("tail_integral_bound: b and p must be positive");
  const double log_bound = p * std::log(kTailEnvelope) - 0.5 * p * std::log(3.0 * b) +
                           std::log(b / (kTailRate * p)) - 3.0 * kTailRate * p / b;
  return std::exp(log_bound);
}

double sample_gamma_unit(double shape, Rng& rng)
{
  if (!(shape >= 1.0))
    throw DomainError("sample_gamma_unit: shape must be >= 1");
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z;
    double v;
    do {
      z = normal(rng);
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform(rng);
    const double z2 = z * z;
    if (u < 1.0 - 0.0331 * z2 * z2)
      return d * v;
    if (std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

double sample_kernel(const KernelPoint& kp, Rng& rng)
{
  return kp.b() * sample_gamma_unit(kp.shape(), rng);
}

} // namespace gkde
