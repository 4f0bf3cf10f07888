#ifndef CARDEX_NUMERIC_HPP
#define CARDEX_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

namespace cardex::numeric {

/// log(exp(a) + exp(b)), stable for any finite a, b and for -inf operands.
inline double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

/// log sum of exponentials over an Eigen vector/array expression.
template <typename Derived>
double log_sum_exp(const Eigen::DenseBase<Derived>& values) {
  if (values.size() == 0) return -std::numeric_limits<double>::infinity();
  const double hi = values.derived().maxCoeff();
  if (!std::isfinite(hi)) return hi;
  return hi + std::log((values.derived().array() - hi).exp().sum());
}

}  // namespace cardex::numeric

#endif  // CARDEX_NUMERIC_HPP
