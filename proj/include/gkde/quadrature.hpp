#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gkde::quad {

//! Nodes and weights of a quadrature rule; integral ~ sum_i w_i f(x_i).
struct Rule
{
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  template<class F>
  double integrate(F&& f) const
  {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      sum += weights[i] * f(nodes[i]);
    return sum;
  }

  //! Weighted sum of precomputed integrand values (same order as nodes).
  double integrate_values(std::span<const double> values) const;
};

//! n-point Gauss-Legendre rule on [-1, 1].
const Rule& gauss_legendre(int n);

//! Composite rule: an `order`-point Gauss-Legendre rule on every cell
//! [breaks[i], breaks[i+1]]. Breaks must be sorted; zero-length cells are
//! skipped.
Rule composite(std::span<const double> breaks, int order = 15);

struct MeshOptions
{
  double upper = 3.0;
  int cells_per_unit = 40;
  int graded_cells = 20;
  double grading_ratio = 1.5;
  int order = 15;
};

//! Breakpoints of the risk mesh on [0, upper]: uniform cells plus geometric
//! refinement toward x = 0 on [0, 10b] and toward x = 1 on
//! [1 - 10 sqrt(b), 1 + 10 sqrt(b)]. Always contains 7/8 and 1.
std::vector<double> risk_breaks(double b, const MeshOptions& opts = {});

//! Composite Gauss-Legendre rule over the risk mesh for bandwidth b.
Rule risk_mesh(double b, const MeshOptions& opts = {});

struct AdaptiveOptions
{
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 4000;
};

struct Result
{
  double value;
  double error;
  int intervals;
};

//! Globally adaptive Gauss-Legendre quadrature. The error of each interval is
//! estimated by comparing the 15-point rule on it with the rule on its two
//! halves; the worst interval is bisected until the summed estimate meets the
//! tolerance. Throws QuadratureNonConvergence when the interval budget runs
//! out. Integration starts from the cells given by `breaks` (sorted, spanning
//! the range of integration).
Result integrate_adaptive(const std::function<double(double)>& f,
                          std::span<const double> breaks,
                          const AdaptiveOptions& opts = {});

Result integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const AdaptiveOptions& opts = {});

} // namespace gkde::quad
