#include "gkde/experiments.hpp"

#include "gkde/errors.hpp"
#include "gkde/estimator.hpp"
#include "gkde/kernel.hpp"
#include "gkde/quadrature.hpp"
#include "gkde/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace gkde {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_n_grid(const std::vector<std::size_t>& n_grid)
{
  if (n_grid.size() < 4)
    throw DomainError("experiment: n_grid needs at least 4 values");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1)
      throw DomainError("experiment: sample sizes must be positive");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw DomainError("experiment: n_grid must be strictly increasing");
  }
}

void check_b_grid(const std::vector<double>& b_grid)
{
  if (b_grid.size() < 4)
    throw DomainError("experiment: b_grid needs at least 4 values");
  for (double b : b_grid)
    if (!(b > 0.0 && b <= 1.0))
      throw DomainError("experiment: bandwidths must lie in (0, 1]");
}

void check_p(double p)
{
  if (!(p >= 1.0) || !std::isfinite(p))
    throw DomainError("experiment: p must be >= 1");
}

void check_beta(double beta)
{
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("experiment: beta must be positive");
}

// Nondecreasing (strict = increasing) over the top half of the sequence.
bool monotone_top_half(const std::vector<double>& v, bool strict)
{
  if (v.size() < 2)
    return false;
  for (std::size_t i = v.size() / 2 + 1; i < v.size(); ++i)
    if (strict ? !(v[i] > v[i - 1]) : !(v[i] >= v[i - 1]))
      return false;
  return true;
}

// Bandwidth lattice 10^{j / per_decade}; the lattice index nearest to b.
int lattice_index(double b, int per_decade)
{
  return static_cast<int>(std::lround(std::log10(b) * per_decade));
}

double lattice_value(int j, int per_decade)
{
  return std::min(1.0, std::pow(10.0, static_cast<double>(j) / per_decade));
}

BiasResult finish_bias(std::vector<BiasRow> rows, double theoretical, bool with_region)
{
  BiasResult out;
  std::vector<double> bs;
  std::vector<double> vs;
  std::vector<double> rs;
  out.min_scaled = std::numeric_limits<double>::infinity();
  out.region_min_scaled = with_region ? std::numeric_limits<double>::infinity() : kNaN;
  for (auto& r : rows) {
    r.scaled = r.value / std::pow(r.b, theoretical);
    out.min_scaled = std::min(out.min_scaled, r.scaled);
    bs.push_back(r.b);
    vs.push_back(r.value);
    if (with_region) {
      r.region_scaled = r.region_value / std::pow(r.b, theoretical);
      out.region_min_scaled = std::min(out.region_min_scaled, r.region_scaled);
      rs.push_back(r.region_value);
    } else {
      r.region_scaled = kNaN;
    }
  }
  out.fit = fit_loglog(bs, vs, theoretical);
  if (with_region)
    out.region_fit = fit_loglog(bs, rs, theoretical);
  else
    out.region_fit.theoretical = theoretical;
  out.rows = std::move(rows);
  return out;
}

} // namespace

RateFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double theoretical)
{
  if (x.size() != y.size())
    throw DomainError("fit_loglog: x and y differ in length");
  if (x.size() < 4)
    throw DomainError("fit_loglog: need at least 4 points");
  RateFit fit;
  fit.theoretical = theoretical;
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw DomainError("fit_loglog: values must be positive");
    fit.points.emplace_back(std::log(x[i]), std::log(y[i]));
    sx += fit.points.back().first;
    sy += fit.points.back().second;
  }
  const double m = static_cast<double>(x.size());
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [lx, ly] : fit.points) {
    sxx += (lx - mx) * (lx - mx);
    sxy += (lx - mx) * (ly - my);
    syy += (ly - my) * (ly - my);
  }
  if (!(sxx > 0.0))
    throw DomainError("fit_loglog: x values are all equal");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

double minimax_exponent(double beta)
{
  check_beta(beta);
  return -beta / (2.0 * beta + 1.0);
}

double oracle_exponent(double beta, double p)
{
  check_beta(beta);
  check_p(p);
  if (p > 4.0)
    return -beta / (2.0 * beta + 2.0 - 4.0 / p);
  return minimax_exponent(beta);
}

RateResult rate_experiment(const TestDensity& d, double beta, double p, double c,
                           const std::vector<std::size_t>& n_grid, std::size_t reps,
                           const McOptions& opts)
{
  check_beta(beta);
  check_p(p);
  check_n_grid(n_grid);
  if (!(c > 0.0))
    throw DomainError("rate_experiment: c must be positive");
  RateResult out;
  std::vector<double> ns;
  std::vector<double> risks;
  for (std::size_t n : n_grid) {
    McOptions o = opts;
    o.stream = n;
    const double b = bandwidth_rule(n, beta, c);
    out.reports.push_back(mc_risk(d, n, b, p, reps, o));
    ns.push_back(static_cast<double>(n));
    risks.push_back(out.reports.back().risk_norm());
  }
  out.fit = fit_loglog(ns, risks, minimax_exponent(beta));
  return out;
}

std::vector<double> oracle_bandwidths(std::size_t n, double beta, const BandwidthGrid& grid)
{
  check_beta(beta);
  if (grid.per_decade < 1 || grid.hi < grid.lo || !(grid.c > 0.0))
    throw DomainError("oracle_bandwidths: invalid grid");
  const double center = grid.c * std::pow(static_cast<double>(n), -2.0 / (2.0 * beta + 1.0));
  const int j0 = lattice_index(center, grid.per_decade);
  std::vector<double> out;
  for (int k = grid.lo; k <= grid.hi; ++k) {
    const double b = lattice_value(j0 + k, grid.per_decade);
    if (out.empty() || b > out.back())
      out.push_back(b);
  }
  return out;
}

OracleResult oracle_bandwidth_slope(const TestDensity& d, double beta, double p,
                                    const std::vector<std::size_t>& n_grid,
                                    const BandwidthGrid& grid, std::size_t reps,
                                    const McOptions& opts)
{
  check_p(p);
  check_n_grid(n_grid);
  if (grid.hi - grid.lo + 1 < 8)
    throw DomainError("oracle_bandwidth_slope: the bandwidth grid needs at least 8 values");
  OracleResult out;
  std::map<int, RiskMesh> meshes;
  std::vector<double> ns;
  std::vector<double> scaled;
  for (std::size_t n : n_grid) {
    McOptions o = opts;
    o.stream = n;
    o.with_bias = false;
    const auto bs = oracle_bandwidths(n, beta, grid);
    std::size_t first = out.rows.size();
    std::size_t best = first;
    for (double b : bs) {
      const int j = lattice_index(b, grid.per_decade);
      auto it = meshes.find(j);
      if (it == meshes.end())
        it = meshes.emplace(j, RiskMesh(d, b, opts.pool)).first;
      const RiskReport r = mc_risk(d, it->second, n, p, reps, o);
      out.rows.push_back({ n, b, r.risk_norm(), r.std_error, false });
      if (out.rows.back().risk_norm < out.rows[best].risk_norm)
        best = out.rows.size() - 1;
    }
    out.rows[best].best = true;
    if (best == first || best + 1 == out.rows.size())
      out.edge_minimum = true;
    out.best_b.push_back(out.rows[best].b);
    out.best_risk.push_back(out.rows[best].risk_norm);
    ns.push_back(static_cast<double>(n));
    scaled.push_back(out.rows[best].risk_norm *
                     std::pow(static_cast<double>(n), -minimax_exponent(beta)));
  }
  out.fit = fit_loglog(ns, out.best_risk, oracle_exponent(beta, p));
  out.log_factor_nondecreasing = monotone_top_half(scaled, false);
  return out;
}

EndpointResult endpoint_leakage(double p, const std::vector<double>& b_grid, double control_b)
{
  check_p(p);
  check_b_grid(b_grid);
  const TestDensity raw = uniform_density();
  std::vector<BiasRow> rows;
  for (double b : b_grid)
    rows.push_back({ b, bias_term(raw, b, p), kNaN, 0.0, kNaN });
  EndpointResult out;
  out.leakage = finish_bias(std::move(rows), 1.0 / (2.0 * p), false);

  const TestDensity molli = mollify(raw);
  out.control_b = control_b;
  out.control_bias = bias_term(molli, control_b, p);
  double sup = 0.0;
  for (int i = 0; i <= 64; ++i) {
    const double x = 0.25 + 0.25 * i / 64.0;
    sup = std::max(sup, std::abs(exact_mean_estimate(molli, control_b, x, 1e-13) - 1.0));
  }
  out.control_interior_sup = sup;
  return out;
}

BiasResult linear_bias_experiment(const std::vector<double>& b_grid, double L)
{
  check_b_grid(b_grid);
  const TestDensity d = mollify(linear_tilt(L));
  std::vector<BiasRow> rows;
  for (double b : b_grid)
    rows.push_back({ b, bias_l1(d, b, 0.0, 1.0), bias_l1(d, b, 0.0, 0.5), 0.0, 0.0 });
  return finish_bias(std::move(rows), 1.0, true);
}

std::vector<double> bump_bandwidths(int n_min, int n_max)
{
  if (n_min < 1 || n_max < n_min)
    throw DomainError("bump_bandwidths: need 1 <= n_min <= n_max");
  std::vector<double> out;
  for (int N = n_max; N >= n_min; --N) {
    const double h = 1.0 / (24.0 * N);
    out.push_back(h * h * (1.0 + 1e-9));
  }
  return out;
}

BiasResult bump_bias_experiment(double beta, const std::vector<double>& b_grid, double L)
{
  check_b_grid(b_grid);
  std::vector<BiasRow> rows;
  for (double b : b_grid) {
    const TestDensity d = mollify(bump_density(beta, b, L));
    rows.push_back({ b, bias_l1(d, b, 0.0, 1.0), bias_l1(d, b, 0.25, 0.75), 0.0, 0.0 });
  }
  return finish_bias(std::move(rows), beta / 2.0, true);
}

FluctuationResult fluctuation_experiment(const std::vector<std::size_t>& n_grid,
                                         const std::vector<double>& b_grid, std::size_t reps,
                                         const McOptions& opts, double min_nsqrtb)
{
  if (n_grid.empty() || b_grid.empty())
    throw DomainError("fluctuation_experiment: empty grid");
  const TestDensity d = mollify(uniform_density());
  FluctuationResult out;
  out.min_scaled = std::numeric_limits<double>::infinity();
  out.min_variance_scaled = std::numeric_limits<double>::infinity();
  for (std::size_t bi = 0; bi < b_grid.size(); ++bi) {
    const double b = b_grid[bi];
    for (std::size_t n : n_grid) {
      if (static_cast<double>(n) * std::sqrt(b) < min_nsqrtb)
        continue;
      McOptions o = opts;
      o.stream = (static_cast<std::uint64_t>(n) << 8) | bi;
      const MeanWithError m = fluctuation_l1(d, n, b, reps, o);
      const double s = m.value * std::sqrt(static_cast<double>(n)) * std::pow(b, 0.25);
      out.rows.push_back({ n, b, m.value, m.std_error, s });
      out.min_scaled = std::min(out.min_scaled, s);
    }
    // x log-spaced on [b, 1/2]
    constexpr int kPoints = 16;
    const double lo = std::log(b);
    const double hi = std::log(0.5);
    for (int i = 0; i < kPoints; ++i) {
      const double x = std::exp(lo + (hi - lo) * i / (kPoints - 1));
      const double v = exact_variance(d, b, x, 1);
      const double s = v * std::sqrt(b) * std::sqrt(x);
      out.variance_rows.push_back({ b, x, v, s });
      out.min_variance_scaled = std::min(out.min_variance_scaled, s);
    }
  }
  if (out.rows.empty())
    out.min_scaled = kNaN;
  return out;
}

std::vector<RiskFloorRow> risk_floor_experiment(const std::vector<double>& p_grid,
                                                const std::vector<double>& b_grid,
                                                const std::vector<std::size_t>& n_grid,
                                                std::size_t reps, const McOptions& opts)
{
  const TestDensity d = mollify(uniform_density());
  std::vector<RiskFloorRow> out;
  for (std::size_t bi = 0; bi < b_grid.size(); ++bi) {
    const double b = b_grid[bi];
    const RiskMesh mesh(d, b, opts.pool);
    for (double p : p_grid) {
      check_p(p);
      for (std::size_t n : n_grid) {
        McOptions o = opts;
        o.stream = (static_cast<std::uint64_t>(n) << 8) | bi;
        o.with_bias = false;
        const RiskReport r = mc_risk(d, mesh, n, p, reps, o);
        const double bound =
          i_integral(b, p) / std::pow(static_cast<double>(n) * std::sqrt(b), p / 2.0);
        out.push_back({ p, b, n, r.risk_p, bound, r.risk_p / bound });
      }
    }
  }
  return out;
}

std::string to_string(Regime r)
{
  switch (r) {
    case Regime::Minimax:
      return "Minimax";
    case Regime::NonMinimaxBeta:
      return "NonMinimaxBeta";
    case Regime::NonMinimaxP:
      return "NonMinimaxP";
    case Regime::Unresolved:
      return "Unresolved";
  }
  return "Unresolved";
}

Regime predict_regime(double p, double beta)
{
  if (!(p >= 1.0) || !std::isfinite(p))
    throw DomainError("predict_regime: p must be >= 1");
  check_beta(beta);
  if (beta > 2.0)
    return Regime::NonMinimaxBeta;
  if (p >= 4.0)
    return Regime::NonMinimaxP;
  if (p < 3.0)
    return Regime::Minimax;
  return beta > (p - 3.0) / (p - 2.0) ? Regime::Minimax : Regime::Unresolved;
}

std::vector<RegimeCell> regime_map(const std::vector<double>& p_grid,
                                   const std::vector<double>& beta_grid,
                                   const RegimeFitOptions& fit, const McOptions& opts)
{
  for (double p : p_grid)
    if (!(p >= 1.0 && p <= 8.0))
      throw DomainError("regime_map: p must lie in [1, 8]");
  for (double beta : beta_grid)
    if (!(beta > 0.0 && beta <= 4.0))
      throw DomainError("regime_map: beta must lie in (0, 4]");
  std::vector<RegimeCell> out;
  for (double p : p_grid)
    for (double beta : beta_grid) {
      RegimeCell cell{ p, beta, predict_regime(p, beta), kNaN, kNaN };
      if (fit.enabled) {
        const TestDensity d = mirrored_gamma(beta + 1.0, 0.2);
        const OracleResult r = oracle_bandwidth_slope(d, beta, p, fit.n_grid, fit.grid, fit.reps, opts);
        cell.fitted_slope = r.fit.slope;
        cell.oracle_b = r.best_b.back();
      }
      out.push_back(cell);
    }
  return out;
}

StagnantResult stagnant_bandwidth_check(const TestDensity& d, double b_fixed, double p,
                                        double beta, const std::vector<std::size_t>& n_grid,
                                        std::size_t reps, const McOptions& opts)
{
  if (!(b_fixed > 0.0 && b_fixed <= 1.0))
    throw DomainError("stagnant_bandwidth_check: b must lie in (0, 1]");
  check_p(p);
  check_n_grid(n_grid);
  StagnantResult out;
  out.bias_term = bias_term(d, b_fixed, p);
  const RiskMesh mesh(d, b_fixed, opts.pool);
  std::vector<double> ns;
  std::vector<double> risks;
  std::vector<double> ratios;
  for (std::size_t n : n_grid) {
    McOptions o = opts;
    o.stream = n;
    o.with_bias = false;
    const RiskReport r = mc_risk(d, mesh, n, p, reps, o);
    const double ratio = r.risk_norm() / std::pow(static_cast<double>(n), minimax_exponent(beta));
    out.rows.push_back({ n, r.risk_norm(), r.std_error, ratio });
    ns.push_back(static_cast<double>(n));
    risks.push_back(r.risk_norm());
    ratios.push_back(ratio);
  }
  out.fit = fit_loglog(ns, risks, 0.0);
  out.plateau_gap = std::abs(risks.back() - out.bias_term) / out.bias_term;
  out.ratio_increasing = monotone_top_half(ratios, true);
  return out;
}

std::vector<SmallBandwidthRow> small_bandwidth_diagnostics(const std::vector<std::size_t>& n_grid,
                                                           double s, double C0)
{
  if (!(s > 0.0) || !(C0 > 0.0))
    throw DomainError("small_bandwidth_diagnostics: s and C0 must be positive");
  std::vector<SmallBandwidthRow> out;
  for (std::size_t n : n_grid) {
    const double b = (s / static_cast<double>(n)) * (s / static_cast<double>(n));
    if (!(b < 1.0))
      throw DomainError("small_bandwidth_diagnostics: need n > s");
    SmallBandwidthRow row{};
    row.n = n;
    row.s = s;
    row.b = b;
    row.delta = std::sqrt(C0 * std::log(1.0 / b));
    const double w = 2.0 * row.delta * std::sqrt(b);
    row.event_prob = w < 1.0 ? std::exp(static_cast<double>(n) * std::log1p(-w)) : 0.0;
    row.event_bound = std::exp(-4.0 * row.delta * s);
    row.kernel_max = 0.0;
    row.fitted_c = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 32; ++i) {
      const double x = 0.25 + 0.25 * i / 32.0;
      const KernelPoint kp(x, b);
      for (double sign : { -1.0, 1.0 }) {
        if (!(x + sign * row.delta * std::sqrt(b) > 0.0))
          continue;
        const double q = local_ratio(kp, sign * row.delta);
        row.kernel_max = std::max(row.kernel_max, kernel_pdf(kp, x) * q);
        row.fitted_c = std::min(row.fitted_c, -std::log(q) / (row.delta * row.delta));
      }
    }
    row.exponent_positive = row.fitted_c * C0 - 0.5 > 0.0;
    out.push_back(row);
  }
  return out;
}

std::vector<HolderScan> regularity_scan(const std::vector<double>& alpha_grid,
                                        const std::vector<double>& beta_grid, double theta)
{
  std::vector<HolderScan> out;
  for (double alpha : alpha_grid)
    for (double beta : beta_grid)
      out.push_back(holder_scan_mirrored(alpha, theta, beta));
  return out;
}

std::vector<BoundCheck> bounds_check()
{
  std::vector<BoundCheck> out;

  {
    double worst = 0.0;
    std::size_t count = 0;
    for (double b : { 1.0, 0.5, 0.1, 0.01, 1e-3, 1e-4 })
      for (double x = 1e-6; x <= 1.0; x *= 1.1, ++count)
        worst = std::max(worst, kernel_pdf(KernelPoint(x, b), x) * std::sqrt(b * (x + b)));
    out.push_back({ "sup_envelope", count, worst / kSupEnvelope, 1.0, worst <= kSupEnvelope });
  }
  {
    double worst = 0.0;
    std::size_t count = 0;
    for (double b : { 0.05, 0.1, 0.25, 0.5, 1.0 })
      for (double x = 3.0; x <= 20.0; x += 0.25, ++count) {
        const double v = sup_on_unit_interval(KernelPoint(x, b)) * std::sqrt(x * b) *
                         std::exp(kTailRate * x / b);
        worst = std::max(worst, v / kTailEnvelope);
      }
    out.push_back({ "exponential_tail", count, worst, 1.0, worst <= 1.0 });
  }
  {
    double worst = 0.0;
    std::size_t count = 0;
    for (double b : { 0.2, 0.1, 0.05, 0.02 })
      for (int i = 0; i <= 50; ++i, ++count) {
        const double x = 0.5 * i / 50.0;
        const double bound = 2.0 * std::exp(-(1.0 - std::log(2.0)) / (2.0 * b));
        worst = std::max(worst, tail_prob(KernelPoint(x, b), 1.0) / bound);
      }
    out.push_back({ "chernoff_tail", count, worst, 1.0, worst <= 1.0 });
  }
  {
    double worst = 0.0;
    std::size_t count = 0;
    for (double x : { 0.0, 0.05, 0.25, 0.5, 1.0 })
      for (double b : { 0.2, 0.05, 0.01, 0.002 }) {
        const KernelPoint kp(x, b);
        const auto [m, v] = kernel_mean_var(kp);
        const double sd = std::sqrt(v);
        std::vector<double> br{ 0.0 };
        for (double k : { -8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0, 16.0, 40.0 })
          if (m + k * sd > br.back())
            br.push_back(m + k * sd);
        const double q = quad::integrate_adaptive(
                           [&](double t) {
                             const double k = kernel_pdf(kp, t);
                             return k * k;
                           },
                           br, { 0.0, 1e-12, 20000 })
                           .value;
        worst = std::max(worst, std::abs(l2_integral(kp) / q - 1.0));
        ++count;
      }
    out.push_back({ "l2_quadrature", count, worst, 1e-6, worst <= 1e-6 });
  }
  {
    double worst = 0.0;
    std::size_t count = 0;
    for (double x : { 0.1, 0.25, 0.5, 1.0 })
      for (double b : { 1e-1, 1e-2, 1e-3, 1e-4 }) {
        ++count;
        const double a = x / b;
        const double r1 = specfun::stirling_ratio(a).value;
        const double r2 = specfun::stirling_ratio(2.0 * a).value;
        const double alt = 0.5 / std::sqrt(specfun::kPi * b * x) * r1 * r1 / r2;
        worst = std::max(worst, std::abs(l2_integral(KernelPoint(x, b)) / alt - 1.0));
      }
    out.push_back({ "l2_stirling_identity", count, worst, 1e-10, worst <= 1e-10 });
  }
  {
    double worst = 0.0;
    std::size_t count = 0;
    for (double x : { 0.0, 0.1, 0.5, 1.0, 3.0 })
      for (double b : { 0.5, 0.05, 0.005 }) {
        const KernelPoint kp(x, b);
        const auto [m, v] = kernel_mean_var(kp);
        const double sd = std::sqrt(v);
        std::vector<double> br{ 0.0 };
        for (double k : { -8.0, -2.0, 0.0, 2.0, 8.0, 20.0, 60.0 })
          if (m + k * sd > br.back())
            br.push_back(m + k * sd);
        const double q =
          quad::integrate_adaptive([&](double t) { return kernel_pdf(kp, t); }, br, { 0.0, 1e-13, 20000 })
            .value;
        worst = std::max(worst, std::abs(q - 1.0));
        ++count;
      }
    out.push_back({ "normalization", count, worst, 1e-9, worst <= 1e-9 });
  }
  return out;
}

} // namespace gkde
