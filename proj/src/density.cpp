#include "entropylab/density.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "entropylab/closed_forms.hpp"
#include "entropylab/errors.hpp"
#include "entropylab/parallel.hpp"
#include "entropylab/stencils.hpp"

namespace entropylab {

AnalyticDensity::AnalyticDensity(int dim, PParams params, Potential potential, DecayRadius radius, std::string label)
    : dim_(dim), params_(params), potential_(std::move(potential)), radius_(std::move(radius)), label_(std::move(label)) {
  if (dim != 1 && dim != 2) throw InvalidInput("analytic densities are defined for d = 1 or 2");
}

double AnalyticDensity::mass_density(const Point& x) const { return std::exp(-potential(x)); }
double AnalyticDensity::u(const Point& x) const { return std::exp(-potential(x) / (params_.p - 1.0)); }
double AnalyticDensity::g(const Point& x) const { return std::exp(-potential(x) / params_.p); }

AnalyticDensity AnalyticDensity::shifted(double shift) const {
  auto base = potential_;
  return AnalyticDensity(
      dim_, params_,
      [base, shift](const Point& x) {
        PotentialSample s = base(x);
        s.v += shift;
        return s;
      },
      radius_, label_);
}

namespace {

double radial_norm(const Point& x, int dim) { return dim == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]); }

}  // namespace

AnalyticDensity barenblatt_density(const PParams& params, int dim, double t) {
  if (!(t > 0.0)) throw InvalidInput("Barenblatt time must be positive");
  if (params.n != dim) throw InvalidInput("Barenblatt density needs n equal to the grid dimension");
  const double p = params.p, q = params.q;
  const double k = (p - 1.0) / std::pow(p, q) * std::pow(t, -q / p);
  const double offset = params.n / p * std::log(t) - log_c_pn(params);
  auto potential = [=](const Point& x) {
    const double r = radial_norm(x, dim);
    PotentialSample s{k * std::pow(r, q) + offset, {0.0, 0.0}};
    if (r > 0.0) {
      const double f = k * q * std::pow(r, q - 2.0);
      s.grad = {f * x[0], dim == 2 ? f * x[1] : 0.0};
    }
    return s;
  };
  auto radius = [=](double decay) { return std::pow(decay / k, 1.0 / q); };
  return AnalyticDensity(dim, params, potential, radius, "barenblatt");
}

AnalyticDensity gaussian_density(const PParams& params, int dim, double sigma) {
  if (!(sigma > 0.0)) throw InvalidInput("Gaussian width must be positive");
  const double s2 = sigma * sigma;
  const double offset = 0.5 * dim * std::log(2.0 * std::numbers::pi * s2);
  auto potential = [=](const Point& x) {
    const double r2 = x[0] * x[0] + (dim == 2 ? x[1] * x[1] : 0.0);
    return PotentialSample{0.5 * r2 / s2 + offset, {x[0] / s2, dim == 2 ? x[1] / s2 : 0.0}};
  };
  auto radius = [=](double decay) { return sigma * std::sqrt(2.0 * decay); };
  return AnalyticDensity(dim, params, potential, radius, "gaussian");
}

AnalyticDensity bump_density(const PParams& params, int dim, double width) {
  if (!(width > 0.0)) throw InvalidInput("bump width must be positive");
  const double w4 = std::pow(width, 4);
  auto potential = [=](const Point& x) {
    const double r2 = x[0] * x[0] + (dim == 2 ? x[1] * x[1] : 0.0);
    const double f = 4.0 * r2 / w4;
    return PotentialSample{r2 * r2 / w4, {f * x[0], dim == 2 ? f * x[1] : 0.0}};
  };
  auto radius = [=](double decay) { return width * std::pow(decay, 0.25); };
  return normalize_mass(AnalyticDensity(dim, params, potential, radius, "compact_bump"));
}

AnalyticDensity perturbed_barenblatt_density(const PParams& params, int dim, double amplitude, int wave_number,
                                             double period_half_width, double phase) {
  if (!(amplitude >= 0.0 && amplitude < 1.0)) throw InvalidInput("perturbation amplitude must lie in [0, 1)");
  if (!(period_half_width > 0.0)) throw InvalidInput("perturbation period must be positive");
  const AnalyticDensity base = barenblatt_density(params, dim);
  const double kappa = std::numbers::pi * wave_number / period_half_width;
  auto potential = [=](const Point& x) {
    PotentialSample s = base(x);
    for (int i = 0; i < dim; ++i) {
      const double arg = kappa * x[i] + phase;
      const double den = 1.0 + amplitude * std::cos(arg);
      s.v -= std::log(den);
      s.grad[i] += amplitude * kappa * std::sin(arg) / den;
    }
    return s;
  };
  const double slack = dim * std::log((1.0 + amplitude) / (1.0 - amplitude));
  auto radius = [=](double decay) { return base.radius(decay + slack); };
  return normalize_mass(AnalyticDensity(dim, params, potential, radius, "perturbed_barenblatt"));
}

AnalyticDensity dilate_analytic(const AnalyticDensity& d, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("dilation factor must be positive");
  const double shift = d.params().n * std::log(lambda);
  auto potential = [d, lambda, shift](const Point& x) {
    PotentialSample s = d({x[0] / lambda, x[1] / lambda});
    s.v += shift;
    s.grad = {s.grad[0] / lambda, s.grad[1] / lambda};
    return s;
  };
  auto radius = [d, lambda](double decay) { return lambda * d.radius(decay); };
  return AnalyticDensity(d.dim(), d.params(), potential, radius, d.label());
}

double integrate_analytic(const AnalyticDensity& d, const AnalyticIntegrand& f, double decay) {
  using boost::math::quadrature::gauss_kronrod;
  const double R = d.radius(decay);
  if (!(R > 0.0) || !std::isfinite(R)) throw QuadratureError("density has no finite decay radius");
  constexpr int kPieces = 16;
  constexpr double kTol = 1e-13;

  if (d.dim() == 1) {
    auto g = [&](double x) {
      const Point pt{x, 0.0};
      return f(pt, d(pt));
    };
    double total = 0.0;
    for (int k = -kPieces; k < kPieces; ++k) {
      total += gauss_kronrod<double, 31>::integrate(g, R * k / kPieces, R * (k + 1) / kPieces, 25, kTol);
    }
    return total;
  }

  constexpr int kAngles = 512;
  auto ring = [&](double r) {
    double s = 0.0;
    for (int a = 0; a < kAngles; ++a) {
      const double th = 2.0 * std::numbers::pi * a / kAngles;
      const Point pt{r * std::cos(th), r * std::sin(th)};
      s += f(pt, d(pt));
    }
    return r * s * (2.0 * std::numbers::pi / kAngles);
  };
  double total = 0.0;
  for (int k = 0; k < kPieces; ++k) {
    total += gauss_kronrod<double, 31>::integrate(ring, R * k / kPieces, R * (k + 1) / kPieces, 20, kTol);
  }
  return total;
}

double analytic_mass(const AnalyticDensity& d) {
  return integrate_analytic(d, [](const Point&, const PotentialSample& s) { return std::exp(-s.v); });
}

double analytic_l1(const AnalyticDensity& d) {
  const double p = d.params().p;
  return integrate_analytic(
      d, [p](const Point&, const PotentialSample& s) { return std::exp(-s.v / p); }, kTailDecay * p);
}

AnalyticDensity normalize_mass(const AnalyticDensity& d) {
  const double m = analytic_mass(d);
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidInput("density is not normalizable");
  return d.shifted(std::log(m));
}

AnalyticDensity normalize_l1(const AnalyticDensity& d) {
  const double m = analytic_l1(d);
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidInput("density is not normalizable in L1");
  // g -> g / m  <=>  v -> v + p log m
  return d.shifted(d.params().p * std::log(m));
}

ScalarField potential_field(const AnalyticDensity& d, const GridSpec& grid) {
  if (grid.dim() != d.dim()) throw InvalidInput("grid and density dimensions differ");
  return ScalarField::sample(grid, [&](const Point& x) { return d.potential(x); }, FieldRole::log_potential_v);
}

namespace {

void fill_derived(DensitySample& s) {
  const double p = s.params.p;
  s.w.resize(s.v.size());
  s.u.resize(s.v.size());
  parallel::for_each(s.v.size(), [&](std::size_t k) {
    s.w[k] = std::exp(-s.v[k]);
    s.u[k] = std::exp(-s.v[k] / (p - 1.0));
  });
}

}  // namespace

DensitySample sample_density(const AnalyticDensity& d, const GridSpec& grid) {
  if (grid.dim() != d.dim()) throw InvalidInput("grid and density dimensions differ");
  DensitySample s{grid, d.params(), {}, {}, {}, {}, {}, true};
  s.v.resize(grid.size());
  for (int a = 0; a < grid.dim(); ++a) s.grad_v[a].resize(grid.size());
  parallel::for_each(grid.size(), [&](std::size_t k) {
    const PotentialSample ps = d(grid.node(k));
    s.v[k] = ps.v;
    for (int a = 0; a < grid.dim(); ++a) s.grad_v[a][k] = ps.grad[a];
  });
  fill_derived(s);
  const double p = s.params.p;
  for (int a = 0; a < grid.dim(); ++a) {
    s.grad_u[a].resize(grid.size());
    parallel::for_each(grid.size(), [&](std::size_t k) { s.grad_u[a][k] = -s.u[k] * s.grad_v[a][k] / (p - 1.0); });
  }
  return s;
}

DensitySample sample_density(const ScalarField& v, const PParams& params) {
  const GridSpec& grid = v.grid();
  DensitySample s{grid, params, {v.values().begin(), v.values().end()}, {}, {}, {}, {}, false};
  fill_derived(s);
  const TensorField gv = gradient(v);
  // u itself may underflow in the tails; differencing it directly is the
  // independent route for the Fisher check.
  const TensorField gu = gradient(ScalarField(grid, s.u));
  for (int a = 0; a < grid.dim(); ++a) {
    s.grad_v[a] = gv.gradient[a];
    s.grad_u[a] = gu.gradient[a];
  }
  return s;
}

}  // namespace entropylab
