#pragma once

namespace gkde::specfun {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kLnSqrt2Pi = 0.918938533204672741780329736405617640;

//! Natural log of the gamma function for u > 0.
//!
//! Lanczos approximation (g = 7, 9 terms) for u >= 1/2, shifted by the
//! recurrence below that. Around the zeros at u = 1 and u = 2 a Taylor series
//! of ln Gamma(1 + e) is used so that the relative error stays small.
//! Throws DomainError for u <= 0 or non-finite u.
double log_gamma(double u);

//! Regularized upper incomplete gamma Q(a, z) = Gamma(a, z) / Gamma(a).
//!
//! Series for z < a + 1, Lentz continued fraction otherwise.
double reg_gamma_upper(double a, double z);

//! Regularized lower incomplete gamma P(a, z) = 1 - Q(a, z), computed
//! directly on the series branch to avoid cancellation.
double reg_gamma_lower(double a, double z);

struct StirlingRatioValue
{
  double u;
  double value;
};

//! R(u) = sqrt(2 pi) e^{-u} u^{u + 1/2} / Gamma(u + 1), with R(0) = 0.
StirlingRatioValue stirling_ratio(double u);

//! ln R(u) for u > 0. Uses the Stirling series for large u, where the direct
//! formula would cancel catastrophically.
double log_stirling_ratio(double u);

} // namespace gkde::specfun
