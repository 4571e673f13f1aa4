#pragma once

namespace entropylab {

// Exponent pair (p, q) with 1/p + 1/q = 1, and the spatial dimension n.
struct PParams {
  double p;
  double q;
  int n;

  PParams(double p, int n);
};

}  // namespace entropylab
