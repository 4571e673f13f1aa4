#include "entropylab/solver.hpp"

#include <algorithm>
#include <cmath>

#include "entropylab/errors.hpp"
#include "entropylab/parallel.hpp"
#include "entropylab/stencils.hpp"

namespace entropylab {

void StepControl::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw InvalidInput("CFL factor must lie in (0, 1]");
  if (!(dt_max > 0.0)) throw InvalidInput("dt_max must be positive");
  if (order != 2 && order != 4) throw InvalidInput("integrator order must be 2 or 4");
  if (!(error_tol >= 0.0)) throw InvalidInput("step-doubling tolerance must be >= 0");
}

namespace {

std::vector<double> conservative(const ScalarField& v, double p, double eps) {
  const GridSpec& g = v.grid();
  const double h = g.spacing();
  const FaceFlux f = face_flux(v, p, eps);
  std::vector<double> out(g.size());
  parallel::for_each(g.size(), [&](std::size_t k) {
    double r = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const std::size_t down = g.neighbor(k, a, -1);
      r += std::exp(-0.5 * h * f.normal[a][k]) * f.flux[a][k] - std::exp(0.5 * h * f.normal[a][down]) * f.flux[a][down];
    }
    out[k] = r / h;
  });
  return out;
}

std::vector<double> expanded(const ScalarField& v, double p, double eps) {
  const GridSpec& g = v.grid();
  const int d = g.dim();
  const TensorField t = derivatives(v);
  std::vector<double> out(g.size());
  parallel::for_each(g.size(), [&](std::size_t k) {
    const double gx = t.gradient[0][k];
    const double gy = d == 2 ? t.gradient[1][k] : 0.0;
    const double om = gx * gx + gy * gy;
    const double oe = om + eps * eps;
    const double hxx = t.hessian[0][k];
    const double hxy = d == 2 ? t.hessian[1][k] : 0.0;
    const double hyy = d == 2 ? t.hessian[2][k] : 0.0;
    // <grad omega, grad v> = 2 v_i v_ij v_j
    const double dw = 2.0 * (gx * gx * hxx + 2.0 * gx * gy * hxy + gy * gy * hyy);
    const double lap = hxx + hyy;
    out[k] = (0.5 * p - 1.0) * std::pow(oe, 0.5 * p - 2.0) * dw + std::pow(oe, 0.5 * p - 1.0) * lap -
             std::pow(om, 0.5 * p);
  });
  return out;
}

}  // namespace

ScalarField rhs(const ScalarField& v, const PParams& params, double eps, RhsForm form) {
  auto values = form == RhsForm::conservative ? conservative(v, params.p, eps) : expanded(v, params.p, eps);
  return ScalarField(v.grid(), std::move(values));
}

double flux_stiffness(const ScalarField& v, const PParams& params, double eps) {
  const double p = params.p;
  if (p == 2.0) return 1.0;
  const GridSpec& g = v.grid();
  const FaceFlux f = face_flux(v, p, eps);
  double kappa = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    kappa = std::max(kappa, parallel::max(g.size(), [&](std::size_t k) {
      // d/dg_n of s^{(p-2)/2} g_n with s = omega + eps^2
      const double s = f.omega[a][k] + eps * eps;
      const double gn = f.normal[a][k];
      return std::pow(s, 0.5 * p - 2.0) * (s + (p - 2.0) * gn * gn);
    }));
  }
  return kappa;
}

double stable_dt(const FlowState& state, const StepControl& control) {
  const GridSpec& g = state.v.grid();
  const double kappa = flux_stiffness(state.v, state.params, state.eps);
  const double h = g.spacing();
  if (!(kappa > 0.0)) return control.dt_max;
  return std::min(control.dt_max, control.cfl * h * h / (2.0 * g.dim() * kappa));
}

namespace {

std::vector<double> axpy(std::span<const double> y, double a, const std::vector<double>& k) {
  std::vector<double> out(y.size());
  parallel::for_each(y.size(), [&](std::size_t i) { out[i] = y[i] + a * k[i]; });
  return out;
}

void check_finite(const std::vector<double>& y, double t, double dt) {
  const double bad = parallel::max(y.size(), [&](std::size_t i) { return std::isfinite(y[i]) ? 0.0 : 1.0; });
  if (bad > 0.0) throw InstabilityError(t, dt, "non-finite value in the evolving potential");
}

}  // namespace

FlowState step(const FlowState& state, double dt, const StepControl& control) {
  control.validate();
  if (!(dt > 0.0)) throw InvalidInput("time step must be positive");
  const GridSpec& g = state.v.grid();
  const double p = state.params.p;
  const double eps = state.eps;
  const auto y = state.v.values();
  auto field = [&](std::vector<double> vals) {
    check_finite(vals, state.t, dt);
    return ScalarField(g, std::move(vals), FieldRole::log_potential_v);
  };

  std::vector<double> next;
  if (control.order == 2) {
    const auto k1 = conservative(state.v, p, eps);
    const auto k2 = conservative(field(axpy(y, 0.5 * dt, k1)), p, eps);
    next = axpy(y, dt, k2);
  } else {
    const auto k1 = conservative(state.v, p, eps);
    const auto k2 = conservative(field(axpy(y, 0.5 * dt, k1)), p, eps);
    const auto k3 = conservative(field(axpy(y, 0.5 * dt, k2)), p, eps);
    const auto k4 = conservative(field(axpy(y, dt, k3)), p, eps);
    next.resize(y.size());
    parallel::for_each(y.size(), [&](std::size_t i) {
      next[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    });
  }
  return FlowState{state.t + dt, field(std::move(next)), state.params, eps};
}

namespace {

FlowState advance(const FlowState& s, double dt, const StepControl& c, double& dt_used) {
  if (c.error_tol <= 0.0) {
    dt_used = dt;
    return step(s, dt, c);
  }
  for (int attempt = 0; attempt < 40; ++attempt) {
    const FlowState full = step(s, dt, c);
    const FlowState half = step(step(s, 0.5 * dt, c), 0.5 * dt, c);
    const double err = parallel::max(s.v.size(), [&](std::size_t i) { return std::abs(full.v[i] - half.v[i]); });
    if (err <= c.error_tol) {
      dt_used = dt;
      return half;
    }
    dt *= 0.5;
  }
  throw InstabilityError(s.t, dt, "step-doubling could not meet the error tolerance");
}

}  // namespace

FlowRun evolve(const FlowState& initial, std::span<const double> sample_times, const StepControl& control) {
  control.validate();
  if (sample_times.empty()) throw InvalidInput("evolve needs at least one sample time");
  if (sample_times.front() < initial.t) throw InvalidInput("sample times must not precede the initial time");
  for (std::size_t k = 1; k < sample_times.size(); ++k) {
    if (!(sample_times[k] > sample_times[k - 1])) throw InvalidInput("sample times must be increasing");
  }

  FlowRun run{{}, initial, 0, 0.0};
  FlowState& s = run.final_state;
  double mass0 = 0.0;
  for (double target : sample_times) {
    while (target - s.t > 1e-13 * std::max(1.0, std::abs(target))) {
      const double remaining = target - s.t;
      double dt = std::min(stable_dt(s, control), remaining);
      // Avoid leaving a sliver step before the sample time.
      if (remaining - dt < 1e-3 * dt) dt = remaining;
      double used = dt;
      FlowState next = advance(s, dt, control, used);
      if (used == remaining) next.t = target;
      s = std::move(next);
      ++run.steps;
    }
    s.t = target;
    DiagnosticsRow row = diagnose(s.v, s.t, s.params, s.eps);
    if (run.rows.empty()) {
      mass0 = row.mass;
    } else if (row.t > run.rows.front().t) {
      run.max_mass_drift_rate =
          std::max(run.max_mass_drift_rate, std::abs(row.mass - mass0) / mass0 / (row.t - run.rows.front().t));
    }
    run.rows.push_back(row);
  }
  fill_time_derivatives(run.rows, initial.params);
  return run;
}

FlowRun evolve(const AnalyticDensity& initial, const GridSpec& grid, std::span<const double> sample_times,
               const StepControl& control, bool normalize) {
  if (sample_times.empty()) throw InvalidInput("evolve needs at least one sample time");
  ScalarField v = potential_field(initial, grid);
  if (normalize) {
    const double m = integrate(grid, sample_density(v, initial.params()).w);
    const double shift = std::log(m);
    std::vector<double> vals(v.values().begin(), v.values().end());
    for (double& x : vals) x += shift;
    v = ScalarField(grid, std::move(vals), FieldRole::log_potential_v);
  }
  const double eps = default_regularization(v);
  return evolve(FlowState{sample_times.front(), v, initial.params(), eps}, sample_times, control);
}

std::vector<double> uniform_times(double t0, double t1, int samples) {
  if (samples < 2) throw InvalidInput("need at least two sample times");
  if (!(t1 > t0)) throw InvalidInput("time span must be increasing");
  std::vector<double> t(samples);
  for (int k = 0; k < samples; ++k) t[k] = t0 + (t1 - t0) * k / (samples - 1);
  t.back() = t1;
  return t;
}

void fill_time_derivatives(std::vector<DiagnosticsRow>& rows, const PParams& params) {
  const std::size_t n = rows.size();
  if (n < 3) return;
  // Three-point first derivative on a possibly uneven stencil.
  auto first = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t at, auto field) {
    const double ta = rows[a].t, tb = rows[b].t, tc = rows[c].t, t = rows[at].t;
    const double fa = field(rows[a]), fb = field(rows[b]), fc = field(rows[c]);
    const double la = ((t - tb) + (t - tc)) / ((ta - tb) * (ta - tc));
    const double lb = ((t - ta) + (t - tc)) / ((tb - ta) * (tb - tc));
    const double lc = ((t - ta) + (t - tb)) / ((tc - ta) * (tc - tb));
    return la * fa + lb * fb + lc * fc;
  };
  auto second = [&](std::size_t a, std::size_t b, std::size_t c, auto field) {
    const double h1 = rows[b].t - rows[a].t, h2 = rows[c].t - rows[b].t;
    return 2.0 * ((field(rows[c]) - field(rows[b])) / h2 - (field(rows[b]) - field(rows[a])) / h1) / (h1 + h2);
  };
  auto H = [](const DiagnosticsRow& r) { return r.H; };
  auto N = [](const DiagnosticsRow& r) { return r.N; };
  auto I = [](const DiagnosticsRow& r) { return r.I; };
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t a = k == 0 ? 0 : (k == n - 1 ? n - 3 : k - 1);
    rows[k].dH_dt_fd = first(a, a + 1, a + 2, k, H);
    rows[k].J_fd = -first(a, a + 1, a + 2, k, I) / params.p;
    rows[k].d2N_dt2_fd = second(a, a + 1, a + 2, N);
  }
}

}  // namespace entropylab
