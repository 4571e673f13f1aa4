#pragma once

#include <span>
#include <vector>

namespace entropylab {

struct RichardsonResult {
  double value;     // extrapolated (or finest when not in the asymptotic range)
  double finest;
  double order;     // observed order, NaN when not estimable
  bool extrapolated;
};

// Values on grids refined by `ratio` each step (coarse to fine). With three
// or more values the order is estimated from the last three; with two the
// assumed order is used if finite.
RichardsonResult richardson(std::span<const double> values, double ratio = 2.0, double assumed_order = 0.0);

// log_ratio(e_k / e_{k+1}) for consecutive errors.
std::vector<double> observed_orders(std::span<const double> errors, double ratio = 2.0);

}  // namespace entropylab
