#include "entropylab/stencils.hpp"

#include <cmath>

#include "entropylab/errors.hpp"
#include "entropylab/parallel.hpp"

namespace entropylab {

namespace {
inline std::size_t shift(const GridSpec& g, std::size_t k, int a, int s) { return g.neighbor(k, a, s); }
}  // namespace

TensorField gradient(const ScalarField& f) {
  const GridSpec& g = f.grid();
  TensorField out(g);
  const double inv2h = 0.5 / g.spacing();
  const auto v = f.values();
  for (int a = 0; a < g.dim(); ++a) {
    std::vector<double> d(g.size());
    parallel::for_each(g.size(), [&](std::size_t k) { d[k] = (v[shift(g, k, a, 1)] - v[shift(g, k, a, -1)]) * inv2h; });
    out.gradient.push_back(std::move(d));
  }
  return out;
}

TensorField hessian(const ScalarField& f) {
  const GridSpec& g = f.grid();
  TensorField out(g);
  const double h = g.spacing();
  const double invh2 = 1.0 / (h * h);
  const auto v = f.values();
  std::vector<double> xx(g.size());
  parallel::for_each(g.size(), [&](std::size_t k) {
    xx[k] = (v[shift(g, k, 0, 1)] - 2.0 * v[k] + v[shift(g, k, 0, -1)]) * invh2;
  });
  out.hessian.push_back(std::move(xx));
  if (g.dim() == 2) {
    std::vector<double> xy(g.size()), yy(g.size());
    const double inv4h2 = 0.25 * invh2;
    parallel::for_each(g.size(), [&](std::size_t k) {
      const std::size_t e = shift(g, k, 0, 1), w = shift(g, k, 0, -1);
      xy[k] = (v[shift(g, e, 1, 1)] - v[shift(g, e, 1, -1)] - v[shift(g, w, 1, 1)] + v[shift(g, w, 1, -1)]) * inv4h2;
      yy[k] = (v[shift(g, k, 1, 1)] - 2.0 * v[k] + v[shift(g, k, 1, -1)]) * invh2;
    });
    out.hessian.push_back(std::move(xy));
    out.hessian.push_back(std::move(yy));
  }
  return out;
}

TensorField derivatives(const ScalarField& f) {
  TensorField out = gradient(f);
  out.hessian = hessian(f).hessian;
  return out;
}

double integrate(const GridSpec& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw InvalidInput("integrand size does not match grid");
  return grid.cell_volume() * parallel::sum(values.size(), [&](std::size_t k) { return values[k]; });
}

double integrate(const ScalarField& f) { return integrate(f.grid(), f.values()); }

ScalarField u_to_v(const ScalarField& u, const PParams& params) {
  std::vector<double> v(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!(u[k] > 0.0)) throw InvalidInput("u_to_v needs a strictly positive field");
  }
  parallel::for_each(u.size(), [&](std::size_t k) { v[k] = -(params.p - 1.0) * std::log(u[k]); });
  return ScalarField(u.grid(), std::move(v), FieldRole::log_potential_v);
}

ScalarField v_to_u(const ScalarField& v, const PParams& params) {
  std::vector<double> u(v.size());
  parallel::for_each(v.size(), [&](std::size_t k) { u[k] = std::exp(-v[k] / (params.p - 1.0)); });
  return ScalarField(v.grid(), std::move(u), FieldRole::density_u);
}

double flux_scale(double omega, double p, double eps) {
  if (p == 2.0) return 1.0;
  return std::pow(omega + eps * eps, 0.5 * p - 1.0);
}

FaceFlux face_flux(const ScalarField& v, double p, double eps) {
  const GridSpec& g = v.grid();
  const double invh = 1.0 / g.spacing();
  const auto x = v.values();
  FaceFlux out;
  TensorField centered(g);
  if (g.dim() == 2) centered = gradient(v);
  for (int a = 0; a < g.dim(); ++a) {
    auto& nrm = out.normal[a];
    auto& om = out.omega[a];
    auto& fl = out.flux[a];
    nrm.resize(g.size());
    om.resize(g.size());
    fl.resize(g.size());
    parallel::for_each(g.size(), [&](std::size_t k) {
      const std::size_t up = shift(g, k, a, 1);
      const double gn = (x[up] - x[k]) * invh;
      double w = gn * gn;
      if (g.dim() == 2) {
        const auto& tang = centered.gradient[1 - a];
        const double gt = 0.5 * (tang[k] + tang[up]);
        w += gt * gt;
      }
      nrm[k] = gn;
      om[k] = w;
      fl[k] = flux_scale(w, p, eps) * gn;
    });
  }
  return out;
}

}  // namespace entropylab
