#include "gkde/densities.hpp"

#include "gkde/errors.hpp"
#include "gkde/quadrature.hpp"
#include "gkde/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace gkde {

namespace {

constexpr double kMollifyStart = 7.0 / 8.0;
constexpr double kPhiCenter = 29.0 / 32.0;
constexpr double kPhiHalfWidth = 1.0 / 32.0;
constexpr double kEnvelopeSlack = 1.01;

template<class... Ts>
struct Overloaded : Ts...
{
  using Ts::operator()...;
};

double smooth_step_base(double t)
{
  return t > 0.0 ? std::exp(-1.0 / t) : 0.0;
}

// S(t) = B(t) / (B(t) + B(1 - t)), rising from 0 at t <= 0 to 1 at t >= 1
double smooth_step(double t)
{
  if (t <= 0.0)
    return 0.0;
  if (t >= 1.0)
    return 1.0;
  const double a = smooth_step_base(t);
  return a / (a + smooth_step_base(1.0 - t));
}

double unnormalized_phi(double v)
{
  if (std::abs(v) >= 1.0)
    return 0.0;
  return std::exp(-1.0 / (1.0 - v * v));
}

double phi_normalizer()
{
  static const double z = [] {
    std::vector<double> breaks;
    for (int i = 0; i <= 32; ++i)
      breaks.push_back(-1.0 + i / 16.0);
    return quad::composite(breaks, 32).integrate(unnormalized_phi) * kPhiHalfWidth;
  }();
  return z;
}

double raw_value(const Shape& s, double x)
{
  return std::visit(
    Overloaded{
      [](const shape::Uniform&) { return 1.0; },
      [x](const shape::Linear& l) { return 1.0 + l.eps * (2.0 * x - 1.0); },
      [x](const shape::MirroredGamma& g) {
        return g.c_norm * gamma_pdf(g.alpha, g.theta, 1.0 - x);
      },
      [x](const shape::Bump& bp) {
        const double h = bp.half_width;
        const int k0 = static_cast<int>(std::floor(((x - 0.25) / h + 1.0) / 2.0));
        double sum = 0.0;
        for (int k = std::max(1, k0 - 1); k <= std::min(2 * bp.N, k0 + 1); ++k) {
          const double term = bump_psi((x - bp.center(k)) / h);
          sum += (k % 2 == 0) ? term : -term;
        }
        return 1.0 + bp.amplitude * sum;
      } },
    s);
}

double raw_sup(const Shape& s)
{
  return std::visit(
    Overloaded{ [](const shape::Uniform&) { return 1.0; },
                [](const shape::Linear& l) { return 1.0 + l.eps; },
                [](const shape::MirroredGamma& g) {
                  if (g.alpha < 1.0)
                    return std::numeric_limits<double>::infinity();
                  const double mode = std::min((g.alpha - 1.0) * g.theta, 1.0);
                  if (mode == 0.0)
                    return g.c_norm / g.theta;
                  return g.c_norm * gamma_pdf(g.alpha, g.theta, mode);
                },
                [](const shape::Bump& bp) { return 1.0 + bp.amplitude; } },
    s);
}

} // namespace

HolderClass::HolderClass(double beta_, double L_)
  : beta(beta_)
  , L(L_)
  , m(static_cast<int>(std::ceil(beta_)) - 1)
{
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("HolderClass: beta must be positive");
  if (!(L > 0.0))
    throw DomainError("HolderClass: L must be positive");
}

double gamma_pdf(double alpha, double theta, double s)
{
  if (!(alpha > 0.0) || !(theta > 0.0))
    throw DomainError("gamma_pdf: alpha and theta must be positive");
  if (!(s > 0.0))
    return 0.0;
  return std::exp((alpha - 1.0) * std::log(s) - s / theta - alpha * std::log(theta) -
                  specfun::log_gamma(alpha));
}

double gamma_pdf_derivative(double alpha, double theta, double s, int k)
{
  if (!(alpha > 0.0) || !(theta > 0.0))
    throw DomainError("gamma_pdf_derivative: alpha and theta must be positive");
  if (k < 0)
    throw DomainError("gamma_pdf_derivative: order must be nonnegative");
  if (!(s > 0.0))
    throw DomainError("gamma_pdf_derivative: s must be positive");
  // d^k [s^{alpha-1} e^{-s/theta}] = sum_j C(k,j) (alpha-1)_j s^{alpha-1-j} (-1/theta)^{k-j} e^{-s/theta}
  const double log_prefix = -s / theta - alpha * std::log(theta) - specfun::log_gamma(alpha);
  double sum = 0.0;
  double binom = 1.0;
  double falling = 1.0;
  for (int j = 0; j <= k; ++j) {
    const double power = std::exp((alpha - 1.0 - j) * std::log(s) + log_prefix);
    sum += binom * falling * power * std::pow(-1.0 / theta, k - j);
    falling *= alpha - 1.0 - j;
    binom = binom * (k - j) / (j + 1);
  }
  return sum;
}

double bump_psi(double u)
{
  if (std::abs(u) >= 1.0)
    return 0.0;
  const double v = 1.0 - u * u;
  return v * v * v;
}

double shape::Bump::center(int k) const
{
  return 0.25 + half_width * (2.0 * k - 1.0);
}

double mollifier_weight(double x)
{
  if (x <= kMollifyStart)
    return 1.0;
  if (x >= 1.0)
    return 0.0;
  return smooth_step(8.0 * (1.0 - x));
}

double mollifier_bump(double x)
{
  return unnormalized_phi((x - kPhiCenter) / kPhiHalfWidth) / phi_normalizer();
}

TestDensity::TestDensity(Shape raw, bool mollified)
  : raw_(std::move(raw))
  , mollified_(mollified)
{
  sup_norm_ = raw_sup(raw_);
  if (!mollified_)
    return;
  std::vector<double> breaks;
  for (int i = 0; i <= 16; ++i)
    breaks.push_back(kMollifyStart + i / 128.0);
  mass_ = quad::composite(breaks, 32).integrate(
    [this](double x) { return raw_value(raw_, x) * (1.0 - mollifier_weight(x)); });
  if (!(mass_ >= 0.0))
    throw NegativeMass("mollify: compensation mass is negative (" + std::to_string(mass_) + ")");
  double peak = 0.0;
  for (int i = 0; i <= 4096; ++i)
    peak = std::max(peak, pdf(kMollifyStart + i / 32768.0));
  sup_norm_ = std::max(sup_norm_, peak * (1.0 + 1e-3));
}

double TestDensity::raw_pdf(double x) const
{
  if (x < 0.0 || x > 1.0)
    return 0.0;
  return raw_value(raw_, x);
}

double TestDensity::pdf(double x) const
{
  if (x < 0.0 || x > 1.0)
    return 0.0;
  if (!mollified_ || x <= kMollifyStart)
    return raw_value(raw_, x);
  return raw_value(raw_, x) * mollifier_weight(x) + mass_ * mollifier_bump(x);
}

std::string TestDensity::kind() const
{
  const std::string base = std::visit(
    Overloaded{ [](const shape::Uniform&) { return std::string("Uniform"); },
                [](const shape::Linear&) { return std::string("Linear"); },
                [](const shape::MirroredGamma&) { return std::string("MirroredGamma"); },
                [](const shape::Bump&) { return std::string("Bump"); } },
    raw_);
  if (base == "MirroredGamma")
    return mollified_ ? "MolliMirroredGamma" : base;
  if (base == "Bump")
    return mollified_ ? "Bump" : "RawBump";
  return (mollified_ ? "Molli" : "Raw") + base;
}

nlohmann::json TestDensity::to_json() const
{
  nlohmann::json params = nlohmann::json::object();
  std::visit(Overloaded{ [](const shape::Uniform&) {},
                         [&](const shape::Linear& l) { params["L"] = l.L; },
                         [&](const shape::MirroredGamma& g) {
                           params["alpha"] = g.alpha;
                           params["theta"] = g.theta;
                         },
                         [&](const shape::Bump& bp) {
                           params["beta"] = bp.beta;
                           params["b"] = bp.b;
                           params["L"] = bp.L;
                         } },
             raw_);
  return { { "kind", kind() }, { "params", params } };
}

TestDensity TestDensity::from_json(const nlohmann::json& spec)
{
  if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string())
    throw DomainError("density spec must be an object with a string \"kind\"");
  const std::string kind = spec["kind"];
  const nlohmann::json params = spec.value("params", nlohmann::json::object());
  auto number = [&](const char* key) -> double {
    if (!params.contains(key) || !params[key].is_number())
      throw DomainError("density spec for " + kind + " needs numeric param \"" + key + "\"");
    return params[key].get<double>();
  };
  if (kind == "RawUniform")
    return uniform_density();
  if (kind == "MolliUniform")
    return mollify(uniform_density());
  if (kind == "RawLinear")
    return linear_tilt(number("L"));
  if (kind == "MolliLinear")
    return mollify(linear_tilt(number("L")));
  if (kind == "MirroredGamma")
    return mirrored_gamma(number("alpha"), number("theta"));
  if (kind == "MolliMirroredGamma")
    return mollify(mirrored_gamma(number("alpha"), number("theta")));
  if (kind == "RawBump")
    return bump_density(number("beta"), number("b"), number("L"));
  if (kind == "Bump")
    return mollify(bump_density(number("beta"), number("b"), number("L")));
  throw DomainError("unknown density kind \"" + kind + "\"");
}

std::vector<double> TestDensity::breakpoints() const
{
  std::vector<double> pts{ 0.0, 1.0 };
  if (mollified_) {
    pts.push_back(kMollifyStart);
    pts.push_back(kPhiCenter + kPhiHalfWidth);
  }
  if (const auto* bp = std::get_if<shape::Bump>(&raw_)) {
    for (int k = 1; k <= 2 * bp->N; ++k) {
      pts.push_back(bp->center(k) - bp->half_width);
      pts.push_back(bp->center(k));
    }
    pts.push_back(bp->center(2 * bp->N) + bp->half_width);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

TestDensity mirrored_gamma(double alpha, double theta)
{
  if (!(alpha > 0.0) || !(theta > 0.0) || !std::isfinite(alpha) || !std::isfinite(theta))
    throw DomainError("mirrored_gamma: alpha and theta must be positive and finite");
  const double mass = 1.0 - specfun::reg_gamma_upper(alpha, 1.0 / theta);
  if (!(mass > 0.0))
    throw DomainError("mirrored_gamma: no gamma mass on [0, 1]");
  return TestDensity(shape::MirroredGamma{ alpha, theta, 1.0 / mass }, false);
}

bool holder_member_mirrored(double alpha, double beta)
{
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw DomainError("holder_member_mirrored: alpha and beta must be positive");
  return beta <= alpha - 1.0;
}

TestDensity linear_tilt(double L)
{
  if (!(L > 1.0) || !std::isfinite(L))
    throw DomainError("linear_tilt: L must exceed 1");
  return TestDensity(shape::Linear{ L, std::min(0.5, (L - 1.0) / 2.0) }, false);
}

TestDensity uniform_density()
{
  return TestDensity(shape::Uniform{}, false);
}

TestDensity bump_density(double beta, double b, double L)
{
  if (!(beta > 0.0 && beta <= 2.0))
    throw DomainError("bump_density: beta must lie in (0, 2]");
  if (!(b > 0.0 && b < 1.0))
    throw DomainError("bump_density: b must lie in (0, 1)");
  if (!(L > 1.0) || !std::isfinite(L))
    throw DomainError("bump_density: L must exceed 1");
  shape::Bump bp;
  bp.beta = beta;
  bp.b = b;
  bp.L = L;
  bp.L_beta = L / 16.0;
  bp.half_width = 3.0 * std::sqrt(b);
  bp.N = static_cast<int>(std::ceil(1.0 / (24.0 * std::sqrt(b))));
  bp.amplitude = bp.L_beta * std::pow(bp.half_width, beta);
  if (bp.amplitude > 0.5)
    throw BandwidthTooLarge("bump_density: amplitude " + std::to_string(bp.amplitude) +
                            " exceeds 1/2; shrink b");
  const double last = bp.center(2 * bp.N) + bp.half_width;
  if (last > kMollifyStart)
    throw BandwidthTooLarge("bump_density: bumps reach " + std::to_string(last) +
                            " beyond 7/8; shrink b");
  return TestDensity(bp, false);
}

TestDensity mollify(const TestDensity& raw)
{
  if (raw.mollified())
    return raw;
  return TestDensity(raw.shape(), true);
}

Sample sample(const TestDensity& d, std::size_t n, Rng& rng)
{
  if (n == 0)
    throw DomainError("sample: n must be at least 1");
  const double envelope = kEnvelopeSlack * d.sup_norm();
  if (!std::isfinite(envelope))
    throw DomainError("sample: density is unbounded, rejection sampling impossible");
  std::uniform_real_distribution<double> unit;
  Sample out;
  out.reserve(n);
  while (out.size() < n) {
    const double x = unit(rng);
    const double y = unit(rng) * envelope;
    const double f = d.pdf(x);
    if (f > envelope)
      throw EnvelopeViolation("sample: pdf " + std::to_string(f) + " at x=" + std::to_string(x) +
                              " exceeds the envelope " + std::to_string(envelope));
    if (y < f)
      out.push_back(x);
  }
  return out;
}

HolderScan holder_scan_mirrored(double alpha, double theta, double beta, int k_min, int k_max)
{
  const HolderClass cls(beta, 1.0);
  const TestDensity d = mirrored_gamma(alpha, theta);
  const double c = std::get<shape::MirroredGamma>(d.shape()).c_norm;
  HolderScan scan{ alpha, beta, cls.m, {}, 0.0, false, holder_member_mirrored(alpha, beta) };
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double h = std::ldexp(1.0, -k);
    // f^{(m)}(1 - h) = (-1)^m c g^{(m)}(h)
    const double deriv = c * gamma_pdf_derivative(alpha, theta, h, cls.m);
    const double q = std::abs(deriv) / std::pow(h, beta - cls.m);
    scan.points.push_back({ h, q });
    const double lx = std::log(h);
    const double ly = std::log(q);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(scan.points.size());
  scan.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  // the quotient behaves like h^{alpha - 1 - beta}; a negative power diverges
  scan.bounded = scan.slope >= -0.25;
  return scan;
}

} // namespace gkde
