#pragma once

#include "gkde/rng.hpp"

#include <utility>

namespace gkde {

//! Evaluation point x >= 0 and bandwidth b in (0, 1] of one gamma kernel
//! K_b(x, .), the Gamma(x/b + 1, b) density (shape/scale).
class KernelPoint
{
public:
  //! Throws DomainError unless x >= 0 and 0 < b <= 1.
  KernelPoint(double x, double b);

  double x() const { return x_; }
  double b() const { return b_; }
  double shape() const { return x_ / b_ + 1.0; }
  double scale() const { return b_; }

private:
  double x_;
  double b_;
};

//! c* = ln 3 - 1 + 1/3, the exponential rate of the kernel mass on [0, 1]
//! seen from x >= 3.
inline constexpr double kTailRate = 0.43194562200144302473;

//! Envelope constant of K_b(x, x) <= C b^{-1/2} (x + b)^{-1/2}, calibrated
//! over x in (0, 1], b in (0, 1]. The supremum is approached as x/b -> 0.
inline constexpr double kSupEnvelope = 1.0;

//! Constant of the exponential tail envelope K_b(x, 1) <= C / sqrt(x b)
//! exp(-c* x / b), x >= 3, from Stirling's lower bound: 1/sqrt(2 pi).
inline constexpr double kTailEnvelope = 0.39894228040143267794;

//! Bulk evaluator of t -> K_b(x, t) with the normalization computed once:
//! ln K = a ln t - t / b - shift, a = x / b. For large a the exponent is
//! evaluated as a (log1p(d) - d) + const with t = x (1 + d), which avoids the
//! cancellation between a ln t and t / b.
class KernelEvaluator
{
public:
  explicit KernelEvaluator(const KernelPoint& kp);

  double operator()(double t) const;
  double a() const { return a_; }
  double inv_b() const { return inv_b_; }
  double shift() const { return shift_; }

private:
  double x_;
  double a_;
  double inv_b_;
  double shift_;
  bool stirling_;
  double offset_ = 0.0;
};

//! The shift of KernelEvaluator: ln(b^{a+1} Gamma(a+1)), rewritten through
//! the Stirling ratio when a is large.
double log_kernel_normalization(const KernelPoint& kp);

//! ln K_b(x, t); -infinity where the density vanishes.
double log_kernel_pdf(const KernelPoint& kp, double t);

//! K_b(x, t) = t^{x/b} e^{-t/b} / (b^{x/b+1} Gamma(x/b+1)), evaluated in
//! log-space. Throws DomainError for negative t.
double kernel_pdf(const KernelPoint& kp, double t);

//! Mean x + b and variance x b + b^2 of xi_x.
std::pair<double, double> kernel_mean_var(const KernelPoint& kp);

//! P(xi_x > s).
double tail_prob(const KernelPoint& kp, double s);

//! B_b(x) = int K_b(x, t)^2 dt = b^{-1} Gamma(2x/b+1) / (2^{2x/b+1} Gamma(x/b+1)^2).
double l2_integral(const KernelPoint& kp);

//! M_b(x) = sup_{t in [0,1]} K_b(x, t) = K_b(x, min(x, 1)).
double sup_on_unit_interval(const KernelPoint& kp);

//! Q_{b,delta}(x) = K_b(x, x + delta sqrt(b)) / K_b(x, x). Requires
//! x + delta sqrt(b) > 0 (and x > 0 unless delta = 0).
double local_ratio(const KernelPoint& kp, double delta);

//! Envelopes for one kernel: the sup envelope C b^{-1/2}(x+b)^{-1/2}, the L2
//! functional B_b(x), and the exponential envelope C (x b)^{-1/2} e^{-c* x/b}
//! of M_b(x). The exponential envelope only holds for x >= 3; below that the
//! sup envelope is reported in its place.
struct KernelBounds
{
  double sup_bound;
  double l2_value;
  double tail_bound;
};

KernelBounds kernel_bounds(const KernelPoint& kp);

//! Upper bound on int_3^inf M_b(x)^p dx from the exponential envelope:
//! C^p (3b)^{-p/2} b / (c* p) e^{-3 c* p / b}.
double tail_integral_bound(double b, double p);

//! One draw of xi_x (Marsaglia-Tsang; the shape is always >= 1).
double sample_kernel(const KernelPoint& kp, Rng& rng);

//! Gamma(shape, 1) draw for shape >= 1 (Marsaglia-Tsang squeeze).
double sample_gamma_unit(double shape, Rng& rng);

} // namespace gkde
