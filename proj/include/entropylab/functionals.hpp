#pragma once

#include <array>
#include <functional>

#include "entropylab/density.hpp"
#include "entropylab/grid.hpp"
#include "entropylab/params.hpp"

namespace entropylab {

struct TwoRoute {
  double route_a;
  double route_b;
  double value() const { return route_b; }
  double relative_gap() const;
};

inline constexpr double kEntropyRouteTol = 1e-10;
inline constexpr double kFisherRouteTol = 1e-8;

// Route A: -sum u^{p-1} log u^{p-1}. Route B: sum v e^{-v}.
TwoRoute entropy(const DensitySample& s);
TwoRoute entropy(const ScalarField& u, const PParams& params);
double entropy_power(double entropy, const PParams& params);

// Route A: (p-1)^p sum |grad u|^p / u. Route B: sum omega^{p/2} e^{-v}.
// The agreement check is enforced on exact-derivative samples only; with
// finite differences of u and of v the two routes differ at O(h^2).
TwoRoute fisher(const DensitySample& s);
TwoRoute fisher(const ScalarField& u, const PParams& params);

double mass(const DensitySample& s);

// Symmetric d x d matrix, packed {xx} or {xx, xy, yy}.
struct SymMatrix {
  int dim = 1;
  std::array<double, 3> c{};
  double operator()(int a, int b) const { return c[a + b]; }
};

struct AMetric {
  SymMatrix upper;  // a^{ij}
  SymMatrix lower;  // a_{ij}
};

AMetric a_metric(const Point& grad_v, int dim, double p, double eps);
// a^{ij} a^{kl} T_ik T_jl.
double a_norm(const SymMatrix& t, const SymMatrix& upper);

// Default regularization 1e-8 * max_node |grad v| (1e-8 if v is flat).
double default_regularization(const ScalarField& v);

// Curvature term Ric(grad v, grad v) at a node; the flat torus uses zero.
using RicciHook = std::function<double(const Point& x, const Point& grad_v)>;

enum class HessianRoute {
  // Discrete Jacobian of the face fluxes used by the solver.
  flux_jacobian,
  // omega_eps^{p/2-1} times the finite-difference Hessian, contracted with a.
  nodal,
};

struct SecondOrderOptions {
  HessianRoute route = HessianRoute::flux_jacobian;
  RicciHook ricci;
};

// A(lambda) = integral of |omega^{p/2-1} grad grad v + lambda a|_A^2 e^{-v}.
double a_lambda(const ScalarField& v, double lambda, const PParams& params, double eps,
                const SecondOrderOptions& opts = {});
double j_direct(const ScalarField& v, const PParams& params, double eps, const SecondOrderOptions& opts = {});
double error_term(const ScalarField& v, double fisher_value, const PParams& params, double eps,
                  const SecondOrderOptions& opts = {});

struct DiagnosticsRow {
  double t = 0.0;
  double H = 0.0;
  double N = 0.0;
  double I = 0.0;
  double J_direct = 0.0;
  double J_fd = 0.0;
  double Psi = 0.0;
  double mass = 0.0;
  double dH_dt_fd = 0.0;
  double d2N_dt2_fd = 0.0;
  double err_term = 0.0;
  double eps = 0.0;
};

DiagnosticsRow diagnose(const ScalarField& v, double t, const PParams& params, double eps);

}  // namespace entropylab
