#pragma once

#include <functional>
#include <span>

#include "entropylab/params.hpp"

namespace entropylab {

// ln Gamma(x) for x > 0.
double log_gamma(double x);

double phi0(double radius, double t, const PParams& params);
double phi0(std::span<const double> x, double t, const PParams& params);

double log_c_pn(const PParams& params);
double c_pn(const PParams& params);

// Stationary profile G~_p and the time-dependent fundamental solution G_{p,t}.
double barenblatt_profile(double radius, const PParams& params);
double barenblatt_profile(std::span<const double> x, const PParams& params);
double fundamental_solution(double radius, double t, const PParams& params);
double fundamental_solution(std::span<const double> x, double t, const PParams& params);

// v = -(p-1) log G_{p,t}, i.e. phi0(x,t) + (n/p) log t - log C_{p,n}.
double barenblatt_potential(double radius, double t, const PParams& params);
// d/dt of the same potential at fixed x.
double barenblatt_potential_dt(double radius, double t, const PParams& params);

double log_gamma_np(const PParams& params);
double gamma_np(const PParams& params);

double barenblatt_entropy_closed(const PParams& params);
double barenblatt_power_closed(const PParams& params);
double barenblatt_fisher_closed(const PParams& params);

struct BarenblattConstants {
  double c_pn;
  double gamma_np;
  double h_star;
  double n_star;
  double i_star;
};

BarenblattConstants barenblatt_constants(const PParams& params);

double unit_sphere_area(int n);

struct RadialQuadrature {
  double rel_tol = 1e-12;
  double tail_ratio = 1e-16;
  double max_radius = 1e6;
};

// Integral over R^n of a radial function f(|x|).
double radial_integral(const std::function<double(double)>& f, int n, const RadialQuadrature& opts = {});

}  // namespace entropylab
