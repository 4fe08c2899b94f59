#pragma once

#include "gkde/densities.hpp"
#include "gkde/parallel.hpp"
#include "gkde/quadrature.hpp"

#include <cstdint>
#include <vector>

namespace gkde {

//! Monte Carlo L^p risk of one (density, n, b, p) configuration.
struct RiskReport
{
  double p;
  std::size_t n;
  double b;
  double risk_p;     // E int |f_hat - f|^p, quadrature on [0, 3] plus tail_bound
  double std_error;  // standard error of risk_p
  double bias_term;  // ||E f_hat - f||_p, deterministic
  double stoch_term; // (E int |f_hat - E f_hat|^p + tail_bound)^{1/p}
  std::size_t replications;
  double tail_bound; // bound on the ignored mass beyond x = 3

  //! risk_p^{1/p}
  double risk_norm() const;
};

//! E f_hat(x) = int_0^1 K_b(x, t) f(t) dt, adaptive quadrature with the given
//! absolute tolerance. Throws QuadratureNonConvergence.
double exact_mean_estimate(const TestDensity& d, double b, double x, double abs_tol = 1e-9);

//! int_0^1 K_b(x, t)^2 f(t) dt.
double exact_second_moment(const TestDensity& d, double b, double x, double abs_tol = 1e-12);

//! Var(f_hat(x)) = (int K^2 f - (int K f)^2) / n.
double exact_variance(const TestDensity& d, double b, double x, std::size_t n);

//! Bound on int_3^inf |g|^p where 0 <= g <= scale * M_b(x) for x >= 3.
double risk_tail_bound(double b, double p, double scale = 1.0);

//! ||E f_hat - f||_p over [0, 3] (adaptive, relative tolerance 1e-8) plus the
//! analytic tail, raised to 1/p.
double bias_term(const TestDensity& d, double b, double p);

//! int_lo^hi |E f_hat - f| dx by adaptive quadrature.
double bias_l1(const TestDensity& d, double b, double lo, double hi);

//! Deterministic pieces of a risk computation on the composite mesh: nodes,
//! weights, f and E f_hat at the nodes.
struct RiskMesh
{
  RiskMesh(const TestDensity& d, double b, ThreadPool* pool = nullptr);

  double b;
  quad::Rule rule;
  std::vector<double> f;
  std::vector<double> mean;
};

struct McOptions
{
  std::uint64_t seed = 42;
  //! Stream prefix; replication r draws from make_rng(seed, {stream, r}).
  std::uint64_t stream = 0;
  ThreadPool* pool = nullptr;
  //! Skip the deterministic bias quadrature (bias_term is then NaN).
  bool with_bias = true;
};

RiskReport mc_risk(const TestDensity& d, std::size_t n, double b, double p, std::size_t reps,
                   const McOptions& opts = {});

//! Same as mc_risk but reuses a precomputed mesh.
RiskReport mc_risk(const TestDensity& d, const RiskMesh& mesh, std::size_t n, double p,
                   std::size_t reps, const McOptions& opts = {});

struct MeanWithError
{
  double value;
  double std_error;
};

//! Monte Carlo E int_{1/4}^{1/2} |f_hat - E f_hat| dx.
MeanWithError fluctuation_l1(const TestDensity& d, std::size_t n, double b, std::size_t reps,
                             const McOptions& opts = {});

//! I(b, p) = int_b^{1/2} x^{-p/4} dx, by Gauss-Legendre in the variable ln x.
double i_integral(double b, double p);

//! Closed form of I(b, p).
double i_integral_closed(double b, double p);

} // namespace gkde
