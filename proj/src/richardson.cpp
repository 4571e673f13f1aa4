#include "entropylab/richardson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "entropylab/errors.hpp"

namespace entropylab {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Outside this band the sequence is treated as pre-asymptotic or noise.
constexpr double kMinOrder = 0.5;
constexpr double kMaxOrder = 12.0;
}  // namespace

RichardsonResult richardson(std::span<const double> values, double ratio, double assumed_order) {
  if (values.empty()) throw InvalidInput("richardson needs at least one value");
  if (!(ratio > 1.0)) throw InvalidInput("refinement ratio must exceed 1");
  const std::size_t n = values.size();
  const double fine = values[n - 1];
  RichardsonResult r{fine, fine, kNaN, false};
  for (double v : values)
    if (!std::isfinite(v)) return r;
  if (n == 1) return r;

  const double d2 = values[n - 1] - values[n - 2];
  double order = assumed_order > 0.0 ? assumed_order : kNaN;
  if (n >= 3) {
    const double d1 = values[n - 2] - values[n - 3];
    const double scale = std::max({std::abs(values[n - 1]), std::abs(values[n - 2]), std::abs(values[n - 3]), 1e-300});
    if (std::abs(d2) <= 1e-14 * scale) return r;  // already converged to round-off
    if (d1 * d2 > 0.0) order = std::log(std::abs(d1 / d2)) / std::log(ratio);
    else order = kNaN;
  }
  r.order = order;
  if (!(order >= kMinOrder && order <= kMaxOrder)) return r;
  r.value = fine + d2 / (std::pow(ratio, order) - 1.0);
  r.extrapolated = true;
  return r;
}

std::vector<double> observed_orders(std::span<const double> errors, double ratio) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    const double a = std::abs(errors[k]), b = std::abs(errors[k + 1]);
    out.push_back(a > 0.0 && b > 0.0 ? std::log(a / b) / std::log(ratio) : kNaN);
  }
  return out;
}

}  // namespace entropylab
