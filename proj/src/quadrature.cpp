#include "gkde/quadrature.hpp"

#include "gkde/errors.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace gkde::quad {

namespace {

constexpr int kMaxOrder = 64;

Rule build_gauss_legendre(int n)
{
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1)
        p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    // recompute the derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1)
    rule.nodes[n / 2] = 0.0;
  return rule;
}

std::vector<Rule> build_table()
{
  std::vector<Rule> table(kMaxOrder + 1);
  table[1] = Rule{ { 0.0 }, { 2.0 } };
  for (int n = 2; n <= kMaxOrder; ++n)
    table[n] = build_gauss_legendre(n);
  return table;
}

double apply(const std::function<double(double)>& f, double a, double b)
{
  const Rule& gl = gauss_legendre(15);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < gl.size(); ++i)
    sum += gl.weights[i] * f(mid + half * gl.nodes[i]);
  return sum * half;
}

struct Interval
{
  double a;
  double b;
  double value;
  double error;

  bool operator<(const Interval& other) const { return error < other.error; }
};

Interval evaluate(const std::function<double(double)>& f, double a, double b)
{
  const double mid = 0.5 * (a + b);
  const double coarse = apply(f, a, b);
  const double fine = apply(f, a, mid) + apply(f, mid, b);
  return { a, b, fine, std::abs(fine - coarse) };
}

} // namespace

double Rule::integrate_values(std::span<const double> values) const
{
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    sum += weights[i] * values[i];
  return sum;
}

const Rule& gauss_legendre(int n)
{
  static const std::vector<Rule> table = build_table();
  if (n < 1 || n > kMaxOrder)
    throw DomainError("gauss_legendre: order must lie in [1, 64], got " + std::to_string(n));
  return table[n];
}

Rule composite(std::span<const double> breaks, int order)
{
  const Rule& gl = gauss_legendre(order);
  Rule rule;
  if (breaks.size() < 2)
    return rule;
  rule.nodes.reserve((breaks.size() - 1) * gl.size());
  rule.weights.reserve((breaks.size() - 1) * gl.size());
  for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
    const double a = breaks[c];
    const double b = breaks[c + 1];
    if (!(b > a))
      continue;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < gl.size(); ++i) {
      rule.nodes.push_back(mid + half * gl.nodes[i]);
      rule.weights.push_back(half * gl.weights[i]);
    }
  }
  return rule;
}

std::vector<double> risk_breaks(double b, const MeshOptions& opts)
{
  if (!(b > 0.0))
    throw DomainError("risk mesh: bandwidth must be positive");
  const double upper = opts.upper;
  std::vector<double> pts;
  const int uniform = static_cast<int>(std::ceil(upper * opts.cells_per_unit));
  for (int k = 0; k <= uniform; ++k)
    pts.push_back(std::min(upper, static_cast<double>(k) / opts.cells_per_unit));
  pts.push_back(7.0 / 8.0);
  pts.push_back(1.0);

  const double r = opts.grading_ratio;
  auto graded = [r](double length, int cells) {
    // cumulative offsets of cells growing geometrically away from the anchor
    std::vector<double> offsets;
    const double h0 = length * (r - 1.0) / (std::pow(r, cells) - 1.0);
    double h = h0;
    double acc = 0.0;
    for (int i = 0; i < cells; ++i) {
      acc += h;
      offsets.push_back(std::min(acc, length));
      h *= r;
    }
    return offsets;
  };

  if (opts.graded_cells > 0) {
    for (double off : graded(std::min(10.0 * b, upper), opts.graded_cells))
      pts.push_back(off);
    const double width = 10.0 * std::sqrt(b);
    const int side = std::max(1, opts.graded_cells / 2);
    for (double off : graded(width, side)) {
      if (1.0 - off > 0.0)
        pts.push_back(1.0 - off);
      if (1.0 + off < upper)
        pts.push_back(1.0 + off);
    }
  }

  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  out.reserve(pts.size());
  for (double p : pts) {
    if (p < 0.0 || p > upper)
      continue;
    if (out.empty() || p - out.back() > 1e-13)
      out.push_back(p);
  }
  if (out.back() < upper)
    out.push_back(upper);
  return out;
}

Rule risk_mesh(double b, const MeshOptions& opts)
{
  const auto breaks = risk_breaks(b, opts);
  return composite(breaks, opts.order);
}

Result integrate_adaptive(const std::function<double(double)>& f,
                          std::span<const double> breaks,
                          const AdaptiveOptions& opts)
{
  std::priority_queue<Interval> heap;
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i]))
      continue;
    Interval iv = evaluate(f, breaks[i], breaks[i + 1]);
    total += iv.value;
    error += iv.error;
    heap.push(iv);
  }
  int count = static_cast<int>(heap.size());
  auto tolerance = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
  while (error > tolerance()) {
    if (count >= opts.max_intervals || heap.empty())
      throw QuadratureNonConvergence("adaptive quadrature exceeded " +
                                     std::to_string(opts.max_intervals) +
                                     " intervals (error estimate " + std::to_string(error) + ")");
    const Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b))
      throw QuadratureNonConvergence("adaptive quadrature: interval collapsed near " +
                                     std::to_string(worst.a));
    const Interval left = evaluate(f, worst.a, mid);
    const Interval right = evaluate(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // re-sum to shed the drift of incremental updates
  double sum = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return { sum, err, count };
}

Result integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const AdaptiveOptions& opts)
{
  const double breaks[] = { a, b };
  return integrate_adaptive(f, breaks, opts);
}

} // namespace gkde::quad
