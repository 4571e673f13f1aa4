#pragma once

#include <functional>
#include <string>

#include "entropylab/grid.hpp"
#include "entropylab/params.hpp"

namespace entropylab {

// v = -(p-1) log u, so the mass density is u^{p-1} = e^{-v} and g = e^{-v/p}.
struct PotentialSample {
  double v;
  Point grad;
};

// A density known in closed form through its potential v and exact gradient.
class AnalyticDensity {
 public:
  using Potential = std::function<PotentialSample(const Point&)>;
  // Radius beyond which v exceeds its minimum by at least the given amount.
  using DecayRadius = std::function<double(double)>;

  AnalyticDensity(int dim, PParams params, Potential potential, DecayRadius radius, std::string label);

  PotentialSample operator()(const Point& x) const { return potential_(x); }
  double potential(const Point& x) const { return potential_(x).v; }
  double mass_density(const Point& x) const;
  double u(const Point& x) const;
  double g(const Point& x) const;

  int dim() const { return dim_; }
  const PParams& params() const { return params_; }
  const std::string& label() const { return label_; }
  double radius(double decay) const { return radius_(decay); }

  // v + shift, i.e. the mass density scaled by e^{-shift}.
  AnalyticDensity shifted(double shift) const;

 private:
  int dim_;
  PParams params_;
  Potential potential_;
  DecayRadius radius_;
  std::string label_;
};

// Decay used to size boxes: e^{-40} is about 4e-18.
inline constexpr double kTailDecay = 40.0;

AnalyticDensity barenblatt_density(const PParams& params, int dim, double t = 1.0);
// Mass density exactly N(0, sigma^2 I).
AnalyticDensity gaussian_density(const PParams& params, int dim, double sigma);
// Mass density proportional to exp(-(|x|/width)^4).
AnalyticDensity bump_density(const PParams& params, int dim, double width);
// Mass density proportional to G~^{p-1}(x) prod_i (1 + a cos(pi k x_i / L + phase)).
AnalyticDensity perturbed_barenblatt_density(const PParams& params, int dim, double amplitude, int wave_number,
                                             double period_half_width, double phase = 0.0);

// x -> lambda^{-n/(p-1)} u(x/lambda); preserves the mass integral.
AnalyticDensity dilate_analytic(const AnalyticDensity& d, double lambda);

using AnalyticIntegrand = std::function<double(const Point&, const PotentialSample&)>;

// Adaptive quadrature over the ball where v - v_min < decay. 1-D uses
// Gauss-Kronrod split at the origin; 2-D uses polar coordinates with a
// periodic trapezoid rule in angle.
double integrate_analytic(const AnalyticDensity& d, const AnalyticIntegrand& f, double decay = kTailDecay);

double analytic_mass(const AnalyticDensity& d);
double analytic_l1(const AnalyticDensity& d);

AnalyticDensity normalize_mass(const AnalyticDensity& d);
AnalyticDensity normalize_l1(const AnalyticDensity& d);

// Grid samples of v (and its derivative) with the quantities derived from it.
struct DensitySample {
  GridSpec grid;
  PParams params;
  std::vector<double> v;
  std::vector<double> w;  // u^{p-1} = e^{-v}
  std::vector<double> u;  // may underflow to 0 in far tails
  std::vector<double> grad_v[2];
  std::vector<double> grad_u[2];
  bool exact_derivatives = false;
};

DensitySample sample_density(const AnalyticDensity& d, const GridSpec& grid);
// Finite-difference derivatives of v and of u = e^{-v/(p-1)}.
DensitySample sample_density(const ScalarField& v, const PParams& params);

ScalarField potential_field(const AnalyticDensity& d, const GridSpec& grid);

}  // namespace entropylab
