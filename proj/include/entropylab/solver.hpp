#pragma once

#include <span>
#include <vector>

#include "entropylab/density.hpp"
#include "entropylab/functionals.hpp"
#include "entropylab/grid.hpp"
#include "entropylab/params.hpp"

namespace entropylab {

struct StepControl {
  double cfl = 0.9;
  double dt_max = 1e-2;
  int order = 4;  // 2 = explicit midpoint, 4 = classical Runge-Kutta
  // Step-doubling local error bound in max norm; 0 disables it.
  double error_tol = 0.0;

  void validate() const;
};

struct FlowState {
  double t;
  ScalarField v;
  PParams params;
  double eps;
};

enum class RhsForm {
  // e^{v} div(e^{-v} Phi) with face fluxes; conserves the discrete mass exactly.
  conservative,
  // (p/2-1) omega^{p/2-2} <grad omega, grad v> + omega^{p/2-1} lap v - omega^{p/2}.
  expanded,
};

ScalarField rhs(const ScalarField& v, const PParams& params, double eps, RhsForm form = RhsForm::conservative);

// Largest derivative of the discrete face flux with respect to the normal
// difference, including the exponential weights of the conservative form.
double flux_stiffness(const ScalarField& v, const PParams& params, double eps);
double stable_dt(const FlowState& state, const StepControl& control);

FlowState step(const FlowState& state, double dt, const StepControl& control);

struct FlowRun {
  std::vector<DiagnosticsRow> rows;
  FlowState final_state;
  std::size_t steps = 0;
  double max_mass_drift_rate = 0.0;
};

// Integrates from the state's time through each sample time (ascending,
// first one >= state.t) and emits a diagnostics row at every sample.
FlowRun evolve(const FlowState& initial, std::span<const double> sample_times, const StepControl& control);
// Samples the analytic density, optionally renormalizes its grid mass to 1,
// picks eps by the default rule, then evolves.
FlowRun evolve(const AnalyticDensity& initial, const GridSpec& grid, std::span<const double> sample_times,
               const StepControl& control, bool normalize = true);

std::vector<double> uniform_times(double t0, double t1, int samples);

// Finite-difference time derivatives (dH/dt, d2N/dt2, -(1/p) dI/dt) from
// neighbouring rows; one-sided at the ends.
void fill_time_derivatives(std::vector<DiagnosticsRow>& rows, const PParams& params);

}  // namespace entropylab
