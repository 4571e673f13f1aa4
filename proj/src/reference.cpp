#include "entropylab/reference.hpp"

#include <cmath>

#include "entropylab/errors.hpp"

namespace entropylab::reference {

namespace {

struct Walker {
  const GridSpec& g;
  int m;
  explicit Walker(const GridSpec& grid) : g(grid), m(grid.points()) {}
  std::size_t at(int i, int j) const { return g.dim() == 1 ? g.wrap(i) : g.index(g.wrap(i), g.wrap(j)); }
  int rows() const { return g.dim() == 1 ? 1 : m; }
};

}  // namespace

TensorField gradient(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const Walker w(g);
  const double h = g.spacing();
  TensorField out(g);
  out.gradient.assign(g.dim(), std::vector<double>(g.size()));
  for (int j = 0; j < w.rows(); ++j) {
    for (int i = 0; i < w.m; ++i) {
      const std::size_t k = w.at(i, j);
      out.gradient[0][k] = (f[w.at(i + 1, j)] - f[w.at(i - 1, j)]) * (0.5 / h);
      if (g.dim() == 2) out.gradient[1][k] = (f[w.at(i, j + 1)] - f[w.at(i, j - 1)]) * (0.5 / h);
    }
  }
  return out;
}

TensorField hessian(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const Walker w(g);
  const double h = g.spacing();
  TensorField out(g);
  out.hessian.assign(g.dim() == 1 ? 1 : 3, std::vector<double>(g.size()));
  for (int j = 0; j < w.rows(); ++j) {
    for (int i = 0; i < w.m; ++i) {
      const std::size_t k = w.at(i, j);
      out.hessian[0][k] = (f[w.at(i + 1, j)] - 2.0 * f[k] + f[w.at(i - 1, j)]) * (1.0 / (h * h));
      if (g.dim() == 2) {
        out.hessian[1][k] =
            (f[w.at(i + 1, j + 1)] - f[w.at(i + 1, j - 1)] - f[w.at(i - 1, j + 1)] + f[w.at(i - 1, j - 1)]) *
            (0.25 * (1.0 / (h * h)));
        out.hessian[2][k] = (f[w.at(i, j + 1)] - 2.0 * f[k] + f[w.at(i, j - 1)]) * (1.0 / (h * h));
      }
    }
  }
  return out;
}

double integrate(const GridSpec& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw InvalidInput("integrand size does not match grid");
  double s = 0.0;
  for (double x : values) s += x;
  return grid.cell_volume() * s;
}

FaceFlux face_flux(const ScalarField& v, double p, double eps) {
  const GridSpec& g = v.grid();
  const Walker w(g);
  const double h = g.spacing();
  const TensorField c = reference::gradient(v);
  FaceFlux out;
  for (int a = 0; a < g.dim(); ++a) {
    out.normal[a].resize(g.size());
    out.omega[a].resize(g.size());
    out.flux[a].resize(g.size());
  }
  for (int j = 0; j < w.rows(); ++j) {
    for (int i = 0; i < w.m; ++i) {
      const std::size_t k = w.at(i, j);
      for (int a = 0; a < g.dim(); ++a) {
        const std::size_t up = a == 0 ? w.at(i + 1, j) : w.at(i, j + 1);
        const double gn = (v[up] - v[k]) * (1.0 / h);
        double om = gn * gn;
        if (g.dim() == 2) {
          const double gt = 0.5 * (c.gradient[1 - a][k] + c.gradient[1 - a][up]);
          om += gt * gt;
        }
        out.normal[a][k] = gn;
        out.omega[a][k] = om;
        out.flux[a][k] = (p == 2.0 ? 1.0 : std::pow(om + eps * eps, 0.5 * p - 1.0)) * gn;
      }
    }
  }
  return out;
}

std::vector<double> conservative_rhs(const ScalarField& v, double p, double eps) {
  const GridSpec& g = v.grid();
  const Walker w(g);
  const double h = g.spacing();
  const FaceFlux f = reference::face_flux(v, p, eps);
  std::vector<double> out(g.size(), 0.0);
  for (int j = 0; j < w.rows(); ++j) {
    for (int i = 0; i < w.m; ++i) {
      const std::size_t k = w.at(i, j);
      double r = 0.0;
      for (int a = 0; a < g.dim(); ++a) {
        const std::size_t down = a == 0 ? w.at(i - 1, j) : w.at(i, j - 1);
        r += std::exp(-0.5 * h * f.normal[a][k]) * f.flux[a][k] - std::exp(0.5 * h * f.normal[a][down]) * f.flux[a][down];
      }
      out[k] = r / h;
    }
  }
  return out;
}

}  // namespace entropylab::reference
