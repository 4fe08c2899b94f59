#pragma once

#include "gkde/rng.hpp"

#include <json.hpp>

#include <string>
#include <variant>
#include <vector>

namespace gkde {

using Sample = std::vector<double>;

//! Hoelder class Sigma(beta, L); m = ceil(beta) - 1 is the number of full
//! derivatives required.
struct HolderClass
{
  HolderClass(double beta, double L);

  double beta;
  double L;
  int m;
};

//! s^{alpha-1} e^{-s/theta} / (theta^alpha Gamma(alpha)) for s > 0, else 0.
double gamma_pdf(double alpha, double theta, double s);

//! k-th derivative of gamma_pdf in s, for s > 0 (Leibniz rule on the power
//! and the exponential factor).
double gamma_pdf_derivative(double alpha, double theta, double s, int k);

//! psi(u) = (1 - u^2)^3 on [-1, 1], zero outside.
double bump_psi(double u);

//! The raw shapes a test density is built from. Every shape lives on [0, 1].
namespace shape {

struct Uniform
{};

struct Linear
{
  double L;
  double eps; // min(1/2, (L - 1)/2)
};

struct MirroredGamma
{
  double alpha;
  double theta;
  double c_norm; // 1 / P(alpha, 1/theta)
};

struct Bump
{
  double beta;
  double b;
  double L;
  double L_beta;    // L / 16
  int N;            // ceil(1 / (24 sqrt(b)))
  double amplitude; // L_beta (3 sqrt(b))^beta
  double half_width; // 3 sqrt(b)

  double center(int k) const;
};

} // namespace shape

using Shape = std::variant<shape::Uniform, shape::Linear, shape::MirroredGamma, shape::Bump>;

//! A density on [0, 1]: one of the raw shapes, optionally mollified on
//! [7/8, 1] so that it is C-infinity on (0, inf) and flat at x = 1.
class TestDensity
{
public:
  TestDensity(Shape raw, bool mollified);

  //! Density value; 0 outside [0, 1].
  double pdf(double x) const;

  //! The unmollified shape at x in [0, 1].
  double raw_pdf(double x) const;

  double sup_norm() const { return sup_norm_; }
  double support_end() const { return 1.0; }
  bool mollified() const { return mollified_; }
  const Shape& shape() const { return raw_; }

  //! Compensation mass m = int raw (1 - w) moved into the bump phi.
  double compensation_mass() const { return mass_; }

  //! Kind label: MolliUniform, MolliLinear, MirroredGamma, Bump, RawUniform,
  //! RawLinear, RawBump (a mollified mirrored gamma is MolliMirroredGamma).
  std::string kind() const;

  //! {"kind": ..., "params": {...}}
  nlohmann::json to_json() const;
  static TestDensity from_json(const nlohmann::json& spec);

  //! Points where the density or its low derivatives are not smooth; used to
  //! seed quadrature meshes.
  std::vector<double> breakpoints() const;

private:
  Shape raw_;
  bool mollified_;
  double mass_ = 0.0;
  double sup_norm_ = 0.0;
};

//! c g_{alpha,theta}(1 - x) on [0, 1] with c = 1 / (1 - Q(alpha, 1/theta)).
TestDensity mirrored_gamma(double alpha, double theta);

//! Analytic Hoelder membership of the mirrored gamma: beta <= alpha - 1.
bool holder_member_mirrored(double alpha, double beta);

//! Raw tilt f_3(x) = 1 + eps (2x - 1), eps = min(1/2, (L - 1)/2). Requires L > 1.
TestDensity linear_tilt(double L);

//! Raw flat density f_0 = 1 on [0, 1].
TestDensity uniform_density();

//! Raw bump sum 1 + L_beta (3 sqrt b)^beta sum_k (-1)^k psi((x - t_k) / (3 sqrt b)).
//! Throws BandwidthTooLarge unless the amplitude is at most 1/2 and every
//! bump lies inside [0, 7/8].
TestDensity bump_density(double beta, double b, double L);

//! Mollified copy of a raw density; equal to it on [0, 7/8].
//! Throws NegativeMass if the compensation mass is negative.
TestDensity mollify(const TestDensity& raw);

//! n iid draws by rejection from the uniform proposal with envelope
//! 1.01 sup_norm. Throws EnvelopeViolation if the pdf exceeds the envelope.
Sample sample(const TestDensity& d, std::size_t n, Rng& rng);

//! Mollifier pieces, exposed for tests: the transition weight w and the
//! normalized compensation bump phi.
double mollifier_weight(double x);
double mollifier_bump(double x);

//! One row of a Hoelder-quotient scan near x = 1.
struct HolderScanPoint
{
  double h;
  double quotient; // |f^{(m)}(1 - h)| / h^{beta - m}
};

struct HolderScan
{
  double alpha;
  double beta;
  int m;
  std::vector<HolderScanPoint> points;
  double slope;   // least-squares slope of log quotient against log h
  bool bounded;   // slope >= -0.25
  bool predicted; // holder_member_mirrored(alpha, beta)
};

//! Scans the Hoelder quotient of the mirrored gamma at x = 1 over
//! h = 2^{-k_min}, ..., 2^{-k_max}. The density vanishes beyond 1, so the
//! quotient compares f^{(m)}(1 - h) against the zero extension.
HolderScan holder_scan_mirrored(double alpha, double theta, double beta, int k_min = 10,
                                int k_max = 40);

} // namespace gkde
