#pragma once

#include "gkde/densities.hpp"
#include "gkde/risk.hpp"

#include <string>
#include <utility>
#include <vector>

namespace gkde {

//! Least-squares line through (log x, log y) pairs.
struct RateFit
{
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double theoretical = 0.0;
  std::vector<std::pair<double, double>> points;
};

//! Fits log y = intercept + slope log x. Needs at least 4 positive pairs.
RateFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double theoretical);

//! -beta / (2 beta + 1).
double minimax_exponent(double beta);

//! Exponent of the oracle rate: -beta / (2 beta + 2 - 4/p) for p > 4, the
//! minimax exponent otherwise.
double oracle_exponent(double beta, double p);

// ---------------------------------------------------------------- rates

struct RateResult
{
  RateFit fit;
  std::vector<RiskReport> reports; // one per n, with b = bandwidth_rule(n, beta, c)
};

//! Monte Carlo risk along n_grid with the rate-optimal bandwidth c n^{-2/(2 beta + 1)}; fits
//! log risk^{1/p} against log n. Replications of size n draw from stream n.
RateResult rate_experiment(const TestDensity& d, double beta, double p, double c,
                           const std::vector<std::size_t>& n_grid, std::size_t reps,
                           const McOptions& opts = {});

struct BandwidthGrid
{
  int per_decade = 12;
  int lo = -9; // offsets in grid steps around c n^{-2/(2 beta + 1)}
  int hi = 9;
  double c = 1.0;
};

//! Bandwidths c n^{-2/(2 beta+1)} 10^{k / per_decade}, k = lo..hi, capped at 1.
std::vector<double> oracle_bandwidths(std::size_t n, double beta, const BandwidthGrid& grid);

struct OracleRow
{
  std::size_t n;
  double b;
  double risk_norm;
  double std_error;
  bool best;
};

struct OracleResult
{
  RateFit fit;
  std::vector<OracleRow> rows;
  std::vector<double> best_b;
  std::vector<double> best_risk;
  //! minimized risk * n^{beta/(2 beta+1)} nondecreasing over the top half of
  //! n_grid (the p = 4 log-factor check).
  bool log_factor_nondecreasing = false;
  //! true when a minimizer sits on the edge of its bandwidth grid.
  bool edge_minimum = false;
};

//! Per n, the minimum Monte Carlo risk over the bandwidth grid; the samples
//! are shared across bandwidths (common random numbers).
OracleResult oracle_bandwidth_slope(const TestDensity& d, double beta, double p,
                                    const std::vector<std::size_t>& n_grid,
                                    const BandwidthGrid& grid, std::size_t reps,
                                    const McOptions& opts = {});

// ------------------------------------------------------ deterministic bias

struct BiasRow
{
  double b;
  double value;        // the fitted norm (L^p for leakage, L1 over [0, 1] otherwise)
  double region_value; // L1 over the region the lower bound integrates over; NaN if none
  double scaled;       // value / b^{theoretical}
  double region_scaled;
};

struct BiasResult
{
  RateFit fit;        // log value against log b
  RateFit region_fit; // log region_value against log b; empty for leakage
  std::vector<BiasRow> rows;
  double min_scaled = 0.0;
  double region_min_scaled = 0.0;
};

struct EndpointResult
{
  BiasResult leakage; // RawUniform, bias_term in L^p
  double control_bias = 0.0;      // MolliUniform bias_term at control_b
  double control_b = 0.02;
  double control_interior_sup = 0.0; // sup over [1/4, 1/2] of |E f_hat - 1|
};

//! Endpoint leakage of the unmollified uniform: bias_term vs b, slope 1/(2p);
//! plus the mollified control at b = control_b.
EndpointResult endpoint_leakage(double p, const std::vector<double>& b_grid,
                                double control_b = 0.02);

//! L1 bias of MolliLinear(L) over [0, 1]; region_value restricts to [0, 1/2].
BiasResult linear_bias_experiment(const std::vector<double>& b_grid, double L = 2.0);

//! Bandwidths b = (1/(24 N))^2 (1 + 1e-9) for which the bump band is exactly
//! [1/4, 3/4].
std::vector<double> bump_bandwidths(int n_min, int n_max);

//! L1 bias of the mollified Bump(beta, b, L) over [0, 1]; region_value
//! restricts to the bump band [1/4, 3/4].
BiasResult bump_bias_experiment(double beta, const std::vector<double>& b_grid, double L = 2.0);

// ------------------------------------------------------- stochastic floors

struct FluctuationRow
{
  std::size_t n;
  double b;
  double value;
  double std_error;
  double scaled; // value sqrt(n) b^{1/4}
};

struct VarianceFloorRow
{
  double b;
  double x;
  double variance; // n Var(f_hat(x))
  double scaled;   // n Var sqrt(b) sqrt(x)
};

struct FluctuationResult
{
  std::vector<FluctuationRow> rows;
  std::vector<VarianceFloorRow> variance_rows;
  double min_scaled = 0.0;
  double min_variance_scaled = 0.0;
};

//! Fluctuation floor at MolliUniform over the (n, b) grid (pairs with
//! n sqrt(b) < min_nsqrtb are skipped) and the exact variance floor on
//! x in [b, 1/2].
FluctuationResult fluctuation_experiment(const std::vector<std::size_t>& n_grid,
                                         const std::vector<double>& b_grid, std::size_t reps,
                                         const McOptions& opts = {}, double min_nsqrtb = 10.0);

struct RiskFloorRow
{
  double p;
  double b;
  std::size_t n;
  double risk_p;
  double bound; // I(b, p) / (n sqrt b)^{p/2}
  double ratio;
};

//! E ||f_hat - f0||_p^p against I(b, p) / (n sqrt b)^{p/2} at MolliUniform.
std::vector<RiskFloorRow> risk_floor_experiment(const std::vector<double>& p_grid,
                                                const std::vector<double>& b_grid,
                                                const std::vector<std::size_t>& n_grid,
                                                std::size_t reps, const McOptions& opts = {});

// ---------------------------------------------------------- regime map

enum class Regime
{
  Minimax,
  NonMinimaxBeta,
  NonMinimaxP,
  Unresolved, // p in [3, 4), beta <= (p-3)/(p-2): neither result applies
};

std::string to_string(Regime r);

//! The analytic regime of (p, beta).
Regime predict_regime(double p, double beta);

struct RegimeCell
{
  double p;
  double beta;
  Regime predicted;
  double fitted_slope; // NaN unless fitted
  double oracle_b;     // NaN unless fitted
};

struct RegimeFitOptions
{
  bool enabled = false;
  std::vector<std::size_t> n_grid{ 256, 512, 1024, 2048 };
  std::size_t reps = 20;
  BandwidthGrid grid{ 6, -4, 4, 1.0 };
};

//! Analytic map over the grids; optionally attaches oracle slopes fitted on
//! MirroredGamma(beta + 1, 0.2), whose smoothness at 1 is exactly beta.
std::vector<RegimeCell> regime_map(const std::vector<double>& p_grid,
                                   const std::vector<double>& beta_grid,
                                   const RegimeFitOptions& fit = {}, const McOptions& opts = {});

// ---------------------------------------------------------- stagnant b

struct StagnantRow
{
  std::size_t n;
  double risk_norm;
  double std_error;
  double ratio; // risk_norm / n^{-beta/(2 beta + 1)}
};

struct StagnantResult
{
  RateFit fit;
  std::vector<StagnantRow> rows;
  double bias_term = 0.0;
  double plateau_gap = 0.0; // |risk_norm(n_max) - bias_term| / bias_term
  bool ratio_increasing = false;
};

StagnantResult stagnant_bandwidth_check(const TestDensity& d, double b_fixed, double p,
                                        double beta, const std::vector<std::size_t>& n_grid,
                                        std::size_t reps, const McOptions& opts = {});

//! Analytic diagnostics for bandwidths with n sqrt(b) = s bounded.
struct SmallBandwidthRow
{
  std::size_t n;
  double s;
  double b;
  double delta;        // sqrt(C0 ln(1/b))
  double event_prob;   // (1 - 2 delta sqrt b)^n
  double event_bound;  // exp(-4 delta s)
  double kernel_max;   // max over x in [1/4,1/2] of K_b(x, x +- delta sqrt b)
  double fitted_c;     // min over x of -ln Q_{b,+-delta}(x) / delta^2
  bool exponent_positive; // fitted_c * C0 - 1/2 > 0
};

std::vector<SmallBandwidthRow> small_bandwidth_diagnostics(const std::vector<std::size_t>& n_grid,
                                                           double s, double C0 = 1.0);

// ---------------------------------------------------------- regularity

std::vector<HolderScan> regularity_scan(const std::vector<double>& alpha_grid,
                                        const std::vector<double>& beta_grid,
                                        double theta = 0.2);

// ---------------------------------------------------------- kernel bounds

struct BoundCheck
{
  std::string name;
  std::size_t points;
  double worst;     // largest value of (quantity / bound), or worst error
  double threshold; // pass iff worst <= threshold
  bool holds;
};

//! Kernel bound predicates over their published grids: sup envelope,
//! exponential tail, Chernoff tail, L2 identity, L2 vs quadrature,
//! normalization.
std::vector<BoundCheck> bounds_check();

} // namespace gkde
