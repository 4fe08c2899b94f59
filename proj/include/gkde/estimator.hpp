#pragma once

#include "gkde/densities.hpp"
#include "gkde/parallel.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace gkde {

//! Bandwidth and evaluation grid of one estimate.
struct EstimatorConfig
{
  //! Throws DomainError unless 0 < b <= 1 and the grid is strictly
  //! increasing and nonnegative.
  EstimatorConfig(double b, std::vector<double> eval_grid);

  double b;
  std::vector<double> eval_grid;
};

//! A sample with ln t precomputed, shared by every grid point and bandwidth.
class PreparedSample
{
public:
  //! Throws DomainError on an empty sample or negative / non-finite values.
  explicit PreparedSample(std::span<const double> data);

  std::size_t size() const { return t_.size(); }
  std::span<const double> values() const { return t_; }
  std::span<const double> logs() const { return log_t_; }

private:
  std::vector<double> t_;
  std::vector<double> log_t_; // ln t, with a large negative stand-in for t = 0
};

//! f_hat(x) = (1/n) sum_i K_b(x, X_i) at each grid point; out.size() must
//! equal grid.size(). Grid points are independent, so the result does not
//! depend on `pool`.
void estimate_into(const PreparedSample& sample, double b, std::span<const double> grid,
                   std::span<double> out, ThreadPool* pool = nullptr);

std::vector<double> estimate(const Sample& sample, const EstimatorConfig& cfg,
                             ThreadPool* pool = nullptr);

//! min(1, c n^{-2/(2 beta + 1)}).
double bandwidth_rule(std::size_t n, double beta, double c = 1.0);

//! Nodes of the risk quadrature mesh for bandwidth b.
std::vector<double> default_grid(double b);

namespace detail {

//! sum_i exp(a log_t[i] - t[i] / b - shift), the kernel sum without the
//! 1/n factor. `shift` absorbs the normalization of K_b(x, .).
double kernel_sum(std::span<const double> t, std::span<const double> log_t, double a,
                  double inv_b, double shift);

} // namespace detail

} // namespace gkde
