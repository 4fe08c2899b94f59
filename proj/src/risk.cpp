#include "gkde/risk.hpp"

#include "gkde/errors.hpp"
#include "gkde/estimator.hpp"
#include "gkde/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gkde {

namespace {

constexpr double kUpper = 3.0;

double abs_pow(double v, double p)
{
  const double a = std::abs(v);
  if (p == 1.0)
    return a;
  if (p == 2.0)
    return a * a;
  return std::pow(a, p);
}

void check_p(double p)
{
  if (!(p >= 1.0) || !std::isfinite(p))
    throw DomainError("risk: p must be a finite real >= 1, got " + std::to_string(p));
}

void check_b(double b)
{
  if (!(b > 0.0 && b <= 1.0))
    throw DomainError("risk: bandwidth must lie in (0, 1], got " + std::to_string(b));
}

// cells of [0, 1] adapted to the kernel at x and to the density's kinks
std::vector<double> kernel_breaks(const TestDensity& d, double b, double x)
{
  std::vector<double> br = d.breakpoints();
  const double sd = std::sqrt(x * b + b * b);
  for (double k : { -8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0 })
    br.push_back(x + b + k * sd);
  for (double k : { 1.0, 5.0, 20.0 })
    br.push_back(k * b);
  std::vector<double> out;
  for (double v : br)
    if (v >= 0.0 && v <= 1.0)
      out.push_back(v);
  out.push_back(0.0);
  out.push_back(1.0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// sorted union of the risk mesh breaks and the density's kinks
std::vector<double> mesh_breaks(const TestDensity& d, double b)
{
  auto br = quad::risk_breaks(b);
  for (double v : d.breakpoints())
    br.push_back(v);
  std::sort(br.begin(), br.end());
  std::vector<double> out;
  for (double v : br)
    if (out.empty() || v - out.back() > 1e-13)
      out.push_back(v);
  return out;
}

double sample_stddev(const std::vector<double>& v, double mean)
{
  double ss = 0.0;
  for (double x : v)
    ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double ordered_mean(const std::vector<double>& v)
{
  double s = 0.0;
  for (double x : v)
    s += x;
  return s / static_cast<double>(v.size());
}

} // namespace

double RiskReport::risk_norm() const
{
  return std::pow(risk_p, 1.0 / p);
}

double exact_mean_estimate(const TestDensity& d, double b, double x, double abs_tol)
{
  check_b(b);
  const KernelEvaluator k(KernelPoint(x, b));
  return quad::integrate_adaptive([&](double t) { return k(t) * d.pdf(t); },
                                  kernel_breaks(d, b, x), { abs_tol, 0.0, 4000 })
    .value;
}

double exact_second_moment(const TestDensity& d, double b, double x, double abs_tol)
{
  check_b(b);
  const KernelEvaluator k(KernelPoint(x, b));
  return quad::integrate_adaptive(
           [&](double t) {
             const double v = k(t);
             return v * v * d.pdf(t);
           },
           kernel_breaks(d, b, x), { abs_tol, 1e-12, 4000 })
    .value;
}

double exact_variance(const TestDensity& d, double b, double x, std::size_t n)
{
  if (n < 1)
    throw DomainError("exact_variance: n must be at least 1");
  const double m = exact_mean_estimate(d, b, x, 1e-13);
  return (exact_second_moment(d, b, x) - m * m) / static_cast<double>(n);
}

double risk_tail_bound(double b, double p, double scale)
{
  check_b(b);
  check_p(p);
  return std::pow(scale, p) * tail_integral_bound(b, p);
}

double bias_term(const TestDensity& d, double b, double p)
{
  check_b(b);
  check_p(p);
  const auto res = quad::integrate_adaptive(
    [&](double x) { return abs_pow(exact_mean_estimate(d, b, x, 1e-12) - d.pdf(x), p); },
    mesh_breaks(d, b), { 1e-300, 1e-8, 20000 });
  return std::pow(res.value + risk_tail_bound(b, p, d.sup_norm()), 1.0 / p);
}

double bias_l1(const TestDensity& d, double b, double lo, double hi)
{
  check_b(b);
  if (!(hi > lo) || lo < 0.0)
    throw DomainError("bias_l1: need 0 <= lo < hi");
  std::vector<double> br{ lo, hi };
  for (double v : mesh_breaks(d, b))
    if (v > lo && v < hi)
      br.push_back(v);
  std::sort(br.begin(), br.end());
  return quad::integrate_adaptive(
           [&](double x) { return std::abs(exact_mean_estimate(d, b, x, 1e-13) - d.pdf(x)); }, br,
           { 1e-300, 1e-9, 20000 })
    .value;
}

RiskMesh::RiskMesh(const TestDensity& d, double b_, ThreadPool* pool)
  : b(b_)
{
  check_b(b);
  rule = quad::composite(mesh_breaks(d, b), quad::MeshOptions{}.order);
  f.resize(rule.size());
  mean.resize(rule.size());
  parallel_for(pool, rule.size(), [&](std::size_t i) {
    f[i] = d.pdf(rule.nodes[i]);
    mean[i] = exact_mean_estimate(d, b, rule.nodes[i]);
  });
}

RiskReport mc_risk(const TestDensity& d, std::size_t n, double b, double p, std::size_t reps,
                   const McOptions& opts)
{
  check_b(b);
  check_p(p);
  const RiskMesh mesh(d, b, opts.pool);
  return mc_risk(d, mesh, n, p, reps, opts);
}

RiskReport mc_risk(const TestDensity& d, const RiskMesh& mesh, std::size_t n, double p,
                   std::size_t reps, const McOptions& opts)
{
  check_p(p);
  if (reps < 2)
    throw DomainError("mc_risk: need at least 2 replications");
  if (n < 1)
    throw DomainError("mc_risk: n must be at least 1");
  const double b = mesh.b;
  const std::size_t m = mesh.rule.size();
  std::vector<double> total(reps);
  std::vector<double> centered(reps);
  parallel_for(opts.pool, reps, [&](std::size_t r) {
    Rng rng = make_rng(opts.seed, { opts.stream, r });
    const PreparedSample s(sample(d, n, rng));
    std::vector<double> fhat(m);
    estimate_into(s, b, mesh.rule.nodes, fhat);
    double tot = 0.0;
    double cen = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      tot += mesh.rule.weights[i] * abs_pow(fhat[i] - mesh.f[i], p);
      cen += mesh.rule.weights[i] * abs_pow(fhat[i] - mesh.mean[i], p);
    }
    total[r] = tot;
    centered[r] = cen;
  });
  RiskReport rep{};
  rep.p = p;
  rep.n = n;
  rep.b = b;
  rep.replications = reps;
  rep.tail_bound = risk_tail_bound(b, p);
  const double mean_total = ordered_mean(total);
  rep.risk_p = mean_total + rep.tail_bound;
  rep.std_error = sample_stddev(total, mean_total) / std::sqrt(static_cast<double>(reps));
  rep.stoch_term = std::pow(ordered_mean(centered) + rep.tail_bound, 1.0 / p);
  rep.bias_term =
    opts.with_bias ? bias_term(d, b, p) : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

MeanWithError fluctuation_l1(const TestDensity& d, std::size_t n, double b, std::size_t reps,
                             const McOptions& opts)
{
  check_b(b);
  if (reps < 2)
    throw DomainError("fluctuation_l1: need at least 2 replications");
  std::vector<double> br;
  for (int i = 0; i <= 16; ++i)
    br.push_back(0.25 + 0.25 * i / 16.0);
  const quad::Rule rule = quad::composite(br, 15);
  std::vector<double> mean(rule.size());
  parallel_for(opts.pool, rule.size(),
               [&](std::size_t i) { mean[i] = exact_mean_estimate(d, b, rule.nodes[i], 1e-12); });
  std::vector<double> values(reps);
  parallel_for(opts.pool, reps, [&](std::size_t r) {
    Rng rng = make_rng(opts.seed, { opts.stream, r });
    const PreparedSample s(sample(d, n, rng));
    std::vector<double> fhat(rule.size());
    estimate_into(s, b, rule.nodes, fhat);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
      acc += rule.weights[i] * std::abs(fhat[i] - mean[i]);
    values[r] = acc;
  });
  const double mu = ordered_mean(values);
  return { mu, sample_stddev(values, mu) / std::sqrt(static_cast<double>(reps)) };
}

double i_integral(double b, double p)
{
  if (!(b > 0.0 && b < 0.5))
    throw DomainError("i_integral: b must lie in (0, 1/2)");
  check_p(p);
  // x = e^u: int_{ln b}^{ln 1/2} e^{u (1 - p/4)} du
  const double lo = std::log(b);
  const double hi = std::log(0.5);
  const double k = 1.0 - p / 4.0;
  std::vector<double> br;
  const int cells = 8 + static_cast<int>(std::ceil(std::abs(k) * (hi - lo)));
  for (int i = 0; i <= cells; ++i)
    br.push_back(lo + (hi - lo) * i / cells);
  return quad::composite(br, 20).integrate([k](double u) { return std::exp(k * u); });
}

double i_integral_closed(double b, double p)
{
  if (!(b > 0.0 && b < 0.5))
    throw DomainError("i_integral: b must lie in (0, 1/2)");
  check_p(p);
  if (p == 4.0)
    return std::log(1.0 / (2.0 * b));
  const double k = 1.0 - p / 4.0;
  return (std::pow(0.5, k) - std::pow(b, k)) / k;
}

} // namespace gkde
