#include "entropylab/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "entropylab/errors.hpp"
#include "entropylab/parallel.hpp"
#include "entropylab/stencils.hpp"

namespace entropylab {

double TwoRoute::relative_gap() const {
  const double scale = std::max(std::abs(route_a), std::abs(route_b));
  return scale > 0.0 ? std::abs(route_a - route_b) / scale : 0.0;
}

namespace {

std::string gap_message(const char* what, const TwoRoute& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s routes disagree: %.17g vs %.17g", what, r.route_a, r.route_b);
  return buf;
}

}  // namespace

TwoRoute entropy(const DensitySample& s) {
  const double p = s.params.p;
  const double hd = s.grid.cell_volume();
  const std::size_t n = s.v.size();
  const double a = -hd * parallel::sum(n, [&](std::size_t k) {
    const double w = std::pow(s.u[k], p - 1.0);
    return w > 0.0 ? w * std::log(w) : 0.0;
  });
  const double b = hd * parallel::sum(n, [&](std::size_t k) { return s.v[k] * s.w[k]; });
  // Relative to the integral of |v| e^{-v}, which stays away from zero
  // when the entropy itself happens to vanish.
  const double scale = hd * parallel::sum(n, [&](std::size_t k) { return std::abs(s.v[k]) * s.w[k]; });
  TwoRoute r{a, b};
  if (std::abs(a - b) > kEntropyRouteTol * std::max(scale, 1e-300)) throw ConsistencyError(gap_message("entropy", r));
  return r;
}

TwoRoute entropy(const ScalarField& u, const PParams& params) {
  return entropy(sample_density(u_to_v(u, params), params));
}

double entropy_power(double entropy, const PParams& params) { return std::exp(params.p / params.n * entropy); }

TwoRoute fisher(const DensitySample& s) {
  const double p = s.params.p;
  const double hd = s.grid.cell_volume();
  const int d = s.grid.dim();
  const std::size_t n = s.v.size();
  const double a = std::pow(p - 1.0, p) * hd * parallel::sum(n, [&](std::size_t k) {
    if (!(s.u[k] > 0.0)) return 0.0;
    double g2 = 0.0;
    for (int i = 0; i < d; ++i) g2 += s.grad_u[i][k] * s.grad_u[i][k];
    return std::pow(g2, 0.5 * p) / s.u[k];
  });
  const double b = hd * parallel::sum(n, [&](std::size_t k) {
    double om = 0.0;
    for (int i = 0; i < d; ++i) om += s.grad_v[i][k] * s.grad_v[i][k];
    return std::pow(om, 0.5 * p) * s.w[k];
  });
  TwoRoute r{a, b};
  if (s.exact_derivatives && r.relative_gap() > kFisherRouteTol) throw ConsistencyError(gap_message("fisher", r));
  return r;
}

TwoRoute fisher(const ScalarField& u, const PParams& params) {
  return fisher(sample_density(u_to_v(u, params), params));
}

double mass(const DensitySample& s) { return integrate(s.grid, s.w); }

AMetric a_metric(const Point& grad_v, int dim, double p, double eps) {
  if (!(eps > 0.0)) throw InvalidInput("a_metric needs eps > 0");
  const double gx = grad_v[0], gy = dim == 2 ? grad_v[1] : 0.0;
  const double om = gx * gx + gy * gy;
  const double up = (p - 2.0) / (om + eps * eps);
  const double lo = (p - 2.0) / ((p - 1.0) * om + eps * eps);
  AMetric m;
  m.upper.dim = m.lower.dim = dim;
  if (dim == 1) {
    m.upper.c = {1.0 + up * gx * gx, 0.0, 0.0};
    m.lower.c = {1.0 - lo * gx * gx, 0.0, 0.0};
  } else {
    m.upper.c = {1.0 + up * gx * gx, up * gx * gy, 1.0 + up * gy * gy};
    m.lower.c = {1.0 - lo * gx * gx, -lo * gx * gy, 1.0 - lo * gy * gy};
  }
  return m;
}

double a_norm(const SymMatrix& t, const SymMatrix& upper) {
  const int d = t.dim;
  double at[2][2] = {{0, 0}, {0, 0}};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) at[i][j] += upper(i, k) * t(k, j);
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s += at[i][j] * at[j][i];
  return s;
}

double default_regularization(const ScalarField& v) {
  const TensorField g = gradient(v);
  const double mx = parallel::max(v.size(), [&](std::size_t k) { return g.grad_norm2(k); });
  return mx > 0.0 ? 1e-8 * std::sqrt(mx) : 1e-8;
}

double a_lambda(const ScalarField& v, double lambda, const PParams& params, double eps, const SecondOrderOptions& opts) {
  if (!(eps > 0.0)) throw InvalidInput("regularization must be positive");
  const GridSpec& g = v.grid();
  const int d = g.dim();
  const double p = params.p;
  const double h = g.spacing();
  const TensorField cg = gradient(v);

  auto curvature = [&](std::size_t k) {
    if (!opts.ricci) return 0.0;
    const Point grad{cg.gradient[0][k], d == 2 ? cg.gradient[1][k] : 0.0};
    const double om = cg.grad_norm2(k) + eps * eps;
    return std::pow(om, p - 2.0) * opts.ricci(g.node(k), grad);
  };

  double total = 0.0;
  if (opts.route == HessianRoute::flux_jacobian) {
    const FaceFlux f = face_flux(v, p, eps);
    std::vector<double> nodal[2];
    if (d == 2) {
      for (int a = 0; a < 2; ++a) {
        nodal[a].resize(g.size());
        parallel::for_each(g.size(), [&](std::size_t k) {
          nodal[a][k] = flux_scale(cg.grad_norm2(k), p, eps) * cg.gradient[a][k];
        });
      }
    }
    total = parallel::sum(g.size(), [&](std::size_t k) {
      double diag[2] = {0.0, 0.0};
      for (int a = 0; a < d; ++a) diag[a] = (f.flux[a][k] - f.flux[a][g.neighbor(k, a, -1)]) / h + lambda;
      double tr = diag[0] * diag[0] + diag[1] * diag[1];
      if (d == 2) {
        const double mxy = (nodal[0][g.neighbor(k, 1, 1)] - nodal[0][g.neighbor(k, 1, -1)]) / (2.0 * h);
        const double myx = (nodal[1][g.neighbor(k, 0, 1)] - nodal[1][g.neighbor(k, 0, -1)]) / (2.0 * h);
        tr += 2.0 * mxy * myx;
      }
      return (tr + curvature(k)) * std::exp(-v[k]);
    });
  } else {
    const TensorField hs = hessian(v);
    total = parallel::sum(g.size(), [&](std::size_t k) {
      const Point grad{cg.gradient[0][k], d == 2 ? cg.gradient[1][k] : 0.0};
      const AMetric m = a_metric(grad, d, p, eps);
      const double s = flux_scale(cg.grad_norm2(k), p, eps);
      SymMatrix t;
      t.dim = d;
      for (std::size_t c = 0; c < hs.hessian.size(); ++c) t.c[c] = s * hs.hessian[c][k] + lambda * m.lower.c[c];
      return (a_norm(t, m.upper) + curvature(k)) * std::exp(-v[k]);
    });
  }
  return g.cell_volume() * total;
}

double j_direct(const ScalarField& v, const PParams& params, double eps, const SecondOrderOptions& opts) {
  return a_lambda(v, 0.0, params, eps, opts);
}

double error_term(const ScalarField& v, double fisher_value, const PParams& params, double eps,
                  const SecondOrderOptions& opts) {
  return a_lambda(v, -fisher_value / params.n, params, eps, opts);
}

DiagnosticsRow diagnose(const ScalarField& v, double t, const PParams& params, double eps) {
  if (params.n != v.grid().dim()) throw InvalidInput("diagnostics need n equal to the grid dimension");
  const DensitySample s = sample_density(v, params);
  DiagnosticsRow row;
  row.t = t;
  row.H = entropy(s).value();
  row.N = entropy_power(row.H, params);
  row.I = fisher(s).route_b;
  row.J_direct = j_direct(v, params, eps);
  row.Psi = row.N * row.I;
  row.mass = mass(s);
  row.err_term = error_term(v, row.I, params, eps);
  row.eps = eps;
  return row;
}

}  // namespace entropylab
