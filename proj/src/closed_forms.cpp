#include "entropylab/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "entropylab/errors.hpp"

namespace entropylab {

PParams::PParams(double p_, int n_) : p(p_), q(0.0), n(n_) {
  if (!(p_ > 1.0) || !std::isfinite(p_)) throw InvalidInput("p must be a finite real > 1");
  if (n_ < 1) throw InvalidInput("dimension n must be >= 1");
  q = p_ / (p_ - 1.0);
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw InvalidInput("log_gamma needs a finite x > 0");
  return std::lgamma(x);
}

double phi0(double radius, double t, const PParams& params) {
  if (!(t > 0.0)) throw InvalidInput("phi0 needs t > 0");
  const double r = std::abs(radius) / std::pow(t, 1.0 / params.p);
  return (params.p - 1.0) / std::pow(params.p, params.q) * std::pow(r, params.q);
}

namespace {
double norm(std::span<const double> x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}
}  // namespace

double phi0(std::span<const double> x, double t, const PParams& params) { return phi0(norm(x), t, params); }

double log_c_pn(const PParams& params) {
  const double p = params.p, q = params.q, n = params.n;
  return -n * (std::log(p) / p + std::log(q) / q) - 0.5 * n * std::log(std::numbers::pi) +
         log_gamma(0.5 * n + 1.0) - log_gamma(n / q + 1.0);
}

double c_pn(const PParams& params) { return std::exp(log_c_pn(params)); }

double barenblatt_potential(double radius, double t, const PParams& params) {
  return phi0(radius, t, params) + params.n / params.p * std::log(t) - log_c_pn(params);
}

double barenblatt_potential_dt(double radius, double t, const PParams& params) {
  if (!(t > 0.0)) throw InvalidInput("time must be positive");
  const double p = params.p, q = params.q;
  return params.n / (p * t) - std::pow(p, -q) * std::pow(std::abs(radius), q) * std::pow(t, -q);
}

double fundamental_solution(double radius, double t, const PParams& params) {
  return std::exp(-barenblatt_potential(radius, t, params) / (params.p - 1.0));
}

double fundamental_solution(std::span<const double> x, double t, const PParams& params) {
  return fundamental_solution(norm(x), t, params);
}

double barenblatt_profile(double radius, const PParams& params) { return fundamental_solution(radius, 1.0, params); }

double barenblatt_profile(std::span<const double> x, const PParams& params) {
  return fundamental_solution(norm(x), 1.0, params);
}

double log_gamma_np(const PParams& params) {
  const double p = params.p, q = params.q, n = params.n;
  return std::log(n) + (p - 1.0) * (std::log(q) + 1.0) + 0.5 * p * std::log(std::numbers::pi) -
         p / n * (log_gamma(0.5 * n + 1.0) - log_gamma(n / q + 1.0));
}

double gamma_np(const PParams& params) { return std::exp(log_gamma_np(params)); }

double barenblatt_entropy_closed(const PParams& params) { return -log_c_pn(params) + params.n / params.q; }

double barenblatt_power_closed(const PParams& params) {
  return std::exp(params.p / params.n * barenblatt_entropy_closed(params));
}

double barenblatt_fisher_closed(const PParams& params) { return params.n / params.p; }

BarenblattConstants barenblatt_constants(const PParams& params) {
  BarenblattConstants c{};
  c.c_pn = c_pn(params);
  c.gamma_np = gamma_np(params);
  c.h_star = barenblatt_entropy_closed(params);
  c.n_star = barenblatt_power_closed(params);
  c.i_star = barenblatt_fisher_closed(params);
  return c;
}

double unit_sphere_area(int n) {
  if (n < 1) throw InvalidInput("sphere dimension must be >= 1");
  return 2.0 * std::exp(0.5 * n * std::log(std::numbers::pi) - log_gamma(0.5 * n));
}

double radial_integral(const std::function<double(double)>& f, int n, const RadialQuadrature& opts) {
  if (n < 1) throw InvalidInput("radial_integral needs n >= 1");
  auto g = [&](double r) { return n == 1 ? f(r) : f(r) * std::pow(r, n - 1); };

  // Grow the cut-off until the integrand has fallen below tail_ratio of the
  // largest value seen, sampling on a fine uniform mesh each round.
  constexpr int kSamples = 512;
  double radius = 1.0;
  double peak = 0.0;
  std::vector<double> breaks;
  while (true) {
    peak = 0.0;
    double peak_r = 0.0;
    for (int k = 0; k <= kSamples; ++k) {
      const double r = radius * k / kSamples;
      const double val = std::abs(g(r));
      if (!std::isfinite(val)) throw QuadratureError("radial integrand is not finite at r=" + std::to_string(r));
      if (val > peak) {
        peak = val;
        peak_r = r;
      }
    }
    // The last eighth of the window must sit below the tail threshold.
    bool tail_ok = peak > 0.0;
    for (int k = 7 * kSamples / 8; k <= kSamples && tail_ok; ++k) {
      tail_ok = std::abs(g(radius * k / kSamples)) <= opts.tail_ratio * peak;
    }
    if (peak == 0.0 && radius > opts.max_radius) return 0.0;
    if (tail_ok) {
      breaks = {0.0, peak_r};
      break;
    }
    radius *= 2.0;
    if (radius > opts.max_radius) throw QuadratureError("radial integrand tail bound not met");
  }

  // Integrate up to where the tail threshold is first crossed.
  double cut = radius;
  for (int k = kSamples; k >= 0; --k) {
    const double r = radius * k / kSamples;
    if (std::abs(g(r)) > opts.tail_ratio * peak) {
      cut = std::min(radius, r + radius / kSamples);
      break;
    }
  }
  std::vector<double> nodes{0.0};
  const double pr = breaks[1];
  if (pr > 0.0 && pr < cut) nodes.push_back(pr);
  for (int k = 1; k <= 8; ++k) {
    const double r = cut * k / 8.0;
    if (r > nodes.back()) nodes.push_back(r);
  }
  std::sort(nodes.begin(), nodes.end());

  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    if (nodes[k + 1] <= nodes[k]) continue;
    double err = 0.0;
    if (k == 0) {
      // Powers r^q with fractional q are not smooth at the origin; tanh-sinh
      // copes with endpoint behaviour that stalls Gauss-Kronrod.
      boost::math::quadrature::tanh_sinh<double> ts;
      total += ts.integrate(g, nodes[0], nodes[1], opts.rel_tol, &err);
    } else {
      total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, nodes[k], nodes[k + 1], 30,
                                                                              opts.rel_tol, &err);
    }
    total_err += err;
  }
  if (total_err > 100.0 * opts.rel_tol * std::abs(total) && total_err > 1e-300)
    throw QuadratureError("radial quadrature did not reach the requested tolerance");
  return unit_sphere_area(n) * total;
}

}  // namespace entropylab
