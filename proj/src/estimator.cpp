#include "gkde/estimator.hpp"

#include "gkde/errors.hpp"
#include "gkde/kernel.hpp"
#include "gkde/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gkde {

namespace {

// ln 0 stand-in: a * kLogZero stays finite for every admissible shape and
// exponentiates to exactly 0.
constexpr double kLogZero = -1e200;

} // namespace

EstimatorConfig::EstimatorConfig(double b_, std::vector<double> grid)
  : b(b_)
  , eval_grid(std::move(grid))
{
  if (!(b > 0.0 && b <= 1.0))
    throw DomainError("estimator: bandwidth must lie in (0, 1], got " + std::to_string(b));
  for (std::size_t i = 0; i < eval_grid.size(); ++i) {
    if (!(eval_grid[i] >= 0.0) || !std::isfinite(eval_grid[i]))
      throw DomainError("estimator: grid points must be finite and >= 0");
    if (i > 0 && !(eval_grid[i] > eval_grid[i - 1]))
      throw DomainError("estimator: grid must be strictly increasing");
  }
}

PreparedSample::PreparedSample(std::span<const double> data)
  : t_(data.begin(), data.end())
  , log_t_(data.size())
{
  if (t_.empty())
    throw DomainError("estimator: sample is empty");
  for (std::size_t i = 0; i < t_.size(); ++i) {
    const double t = t_[i];
    if (!(t >= 0.0) || !std::isfinite(t))
      throw DomainError("estimator: sample values must be finite and >= 0, got " +
                        std::to_string(t));
    log_t_[i] = t > 0.0 ? std::log(t) : kLogZero;
  }
}

void estimate_into(const PreparedSample& sample, double b, std::span<const double> grid,
                   std::span<double> out, ThreadPool* pool)
{
  if (!(b > 0.0 && b <= 1.0))
    throw DomainError("estimator: bandwidth must lie in (0, 1], got " + std::to_string(b));
  if (out.size() != grid.size())
    throw DomainError("estimator: output size does not match the grid");
  for (double x : grid)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw DomainError("estimator: grid points must be finite and >= 0");
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  const double inv_b = 1.0 / b;
  parallel_for(pool, grid.size(), [&](std::size_t j) {
    const double x = grid[j];
    const double a = x / b;
    const double sum = detail::kernel_sum(sample.values(), sample.logs(), a, inv_b,
                                          log_kernel_normalization(KernelPoint(x, b)));
    out[j] = sum * inv_n;
  });
}

std::vector<double> estimate(const Sample& sample, const EstimatorConfig& cfg, ThreadPool* pool)
{
  const PreparedSample prepared(sample);
  std::vector<double> out(cfg.eval_grid.size());
  estimate_into(prepared, cfg.b, cfg.eval_grid, out, pool);
  return out;
}

double bandwidth_rule(std::size_t n, double beta, double c)
{
  if (n < 1)
    throw DomainError("bandwidth_rule: n must be at least 1");
  if (!(beta > 0.0))
    throw DomainError("bandwidth_rule: beta must be positive");
  if (!(c > 0.0) || !std::isfinite(c))
    throw DomainError("bandwidth_rule: c must be positive");
  const double b = c * std::pow(static_cast<double>(n), -2.0 / (2.0 * beta + 1.0));
  return std::min(1.0, b);
}

std::vector<double> default_grid(double b)
{
  return quad::risk_mesh(b).nodes;
}

} // namespace gkde
