// Built with relaxed floating-point flags so that exp() vectorizes; every
// operand is finite (ln 0 is replaced by a finite stand-in).
#include "gkde/estimator.hpp"

#include <cmath>

namespace gkde::detail {

double kernel_sum(std::span<const double> t, std::span<const double> log_t, double a,
                  double inv_b, double shift)
{
  const std::size_t n = t.size();
  const double* tp = t.data();
  const double* lp = log_t.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    sum += std::exp(a * lp[i] - tp[i] * inv_b - shift);
  return sum;
}

} // namespace gkde::detail
