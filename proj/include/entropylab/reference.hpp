#pragma once

// Plain sequential versions of the parallel kernels. They are kept for the
// parity tests and the serial-vs-OpenMP benchmark, not for production runs.

#include <span>

#include "entropylab/grid.hpp"
#include "entropylab/stencils.hpp"

namespace entropylab::reference {

TensorField gradient(const ScalarField& f);
TensorField hessian(const ScalarField& f);
double integrate(const GridSpec& grid, std::span<const double> values);
FaceFlux face_flux(const ScalarField& v, double p, double eps);
std::vector<double> conservative_rhs(const ScalarField& v, double p, double eps);

}  // namespace entropylab::reference
