#pragma once

#include <span>

#include "entropylab/grid.hpp"
#include "entropylab/params.hpp"

namespace entropylab {

// Centered second-order periodic differences.
TensorField gradient(const ScalarField& f);
// Pure second derivatives use the 3-point stencil; mixed ones nest two
// centered differences, which is symmetric by construction.
TensorField hessian(const ScalarField& f);
TensorField derivatives(const ScalarField& f);

// h^d times the node sum (periodic trapezoid rule).
double integrate(const ScalarField& f);
double integrate(const GridSpec& grid, std::span<const double> values);

// v = -(p-1) log u and back.
ScalarField u_to_v(const ScalarField& u, const PParams& params);
ScalarField v_to_u(const ScalarField& v, const PParams& params);

// Face quantities of the regularized p-flux Phi = (omega + eps^2)^{(p-2)/2} grad v.
// Along axis a, face k sits between node k and its +1 neighbour on that axis.
// normal[a] is the one-sided difference across the face; in 2-D the
// tangential component is the average of the two adjacent centered
// differences.
struct FaceFlux {
  std::vector<double> normal[2];
  std::vector<double> omega[2];
  std::vector<double> flux[2];
};

FaceFlux face_flux(const ScalarField& v, double p, double eps);

// Regularized scalar flux and its derivative in the normal component.
double flux_scale(double omega, double p, double eps);

}  // namespace entropylab
