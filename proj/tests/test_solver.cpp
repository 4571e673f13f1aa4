#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "entropylab/closed_forms.hpp"
#include "entropylab/errors.hpp"
#include "entropylab/functionals.hpp"
#include "entropylab/harness.hpp"
#include "entropylab/solver.hpp"
#include "entropylab/stencils.hpp"

using namespace entropylab;

namespace {

// Max error over inner <= |x| <= outer.
double max_interior_error(const ScalarField& a, const std::function<double(const Point&)>& exact, double outer,
                          double inner = 0.0) {
  double err = 0.0;
  const GridSpec& g = a.grid();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Point x = g.node(k);
    const double r = std::hypot(x[0], x[1]);
    if (r > outer || r < inner) continue;
    err = std::max(err, std::abs(a[k] - exact(x)));
  }
  return err;
}

}  // namespace

TEST(StepControl, Validation) {
  StepControl c;
  EXPECT_NO_THROW(c.validate());
  c.cfl = 0.0;
  EXPECT_THROW(c.validate(), InvalidInput);
  c = {};
  c.order = 3;
  EXPECT_THROW(c.validate(), InvalidInput);
  c = {};
  c.dt_max = -1.0;
  EXPECT_THROW(c.validate(), InvalidInput);
  c = {};
  c.error_tol = -1.0;
  EXPECT_THROW(c.validate(), InvalidInput);
}

TEST(Rhs, ConservativeFormPreservesMass) {
  for (double p : {1.5, 2.0, 3.0}) {
    for (int n = 1; n <= 2; ++n) {
      const PParams pp(p, n);
      const AnalyticDensity d = perturbed_barenblatt_density(pp, n, 0.3, 2, 4.0);
      const ScalarField v = potential_field(d, GridSpec(n, n == 1 ? 256 : 64, 4.0));
      const ScalarField r = rhs(v, pp, default_regularization(v));
      double flow = 0.0, scale = 0.0;
      for (std::size_t k = 0; k < v.size(); ++k) {
        flow += std::exp(-v[k]) * r[k];
        scale += std::exp(-v[k]) * std::abs(r[k]);
      }
      EXPECT_LT(std::abs(flow), 1e-13 * scale) << "p=" << p << " n=" << n;
    }
  }
}

TEST(Rhs, FormsAgreeOnSmoothFields) {
  const PParams pp(3.0, 2);
  const AnalyticDensity d = gaussian_density(pp, 2, 1.0);
  std::vector<double> errs;
  for (int m : {64, 128, 256}) {
    const ScalarField v = potential_field(d, GridSpec(2, m, 8.0));
    const double eps = default_regularization(v);
    const ScalarField a = rhs(v, pp, eps, RhsForm::conservative);
    const ScalarField b = rhs(v, pp, eps, RhsForm::expanded);
    double e = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Point x = v.grid().node(k);
      // omega^{p/2-2} in the expanded form is singular at the critical point.
      const double r = std::hypot(x[0], x[1]);
      if (r > 1.0 && r < 3.0) e = std::max(e, std::abs(a[k] - b[k]));
    }
    errs.push_back(e);
  }
  EXPECT_GT(std::log2(errs[1] / errs[2]), 1.8);
}

// Away from the cusp of v at the origin (for p > 2 the discrete divergence
// there is off by a fixed factor at every resolution).
TEST(Rhs, MatchesBarenblattTimeDerivative) {
  for (double p : {2.0, 3.0}) {
    const PParams pp(p, 1);
    std::vector<double> errs;
    for (int m : {256, 512, 1024}) {
      const AnalyticDensity d = barenblatt_density(pp, 1, 1.0);
      const ScalarField v = potential_field(d, GridSpec(1, m, 8.0));
      const ScalarField r = rhs(v, pp, default_regularization(v));
      errs.push_back(max_interior_error(
          r, [&](const Point& x) { return barenblatt_potential_dt(std::abs(x[0]), 1.0, pp); }, 3.0, 0.5));
    }
    EXPECT_GT(std::log2(errs[1] / errs[2]), 1.8) << "p=" << p;
    EXPECT_LT(errs.back(), 1e-4) << "p=" << p;
  }
}

TEST(StableDt, HeatEquationLimit) {
  const PParams pp(2.0, 2);
  const GridSpec g(2, 64, 4.0);
  FlowState s{1.0, potential_field(gaussian_density(pp, 2, 1.0), g), pp, 1e-8};
  EXPECT_EQ(flux_stiffness(s.v, pp, s.eps), 1.0);
  StepControl c;
  c.dt_max = 1.0;
  EXPECT_NEAR(stable_dt(s, c), c.cfl * g.spacing() * g.spacing() / 4.0, 1e-15);
  c.dt_max = 1e-4;
  EXPECT_EQ(stable_dt(s, c), 1e-4);
}

TEST(Step, OversizedStepsBlowUp) {
  const PParams pp(2.0, 1);
  const GridSpec g(1, 128, 4.0);
  FlowState s{1.0, potential_field(perturbed_barenblatt_density(pp, 1, 0.3, 4, 4.0), g), pp, 1e-8};
  const double dt = 50.0 * g.spacing() * g.spacing();
  StepControl c;
  bool thrown = false;
  try {
    for (int k = 0; k < 500; ++k) s = step(s, dt, c);
  } catch (const InstabilityError& e) {
    thrown = true;
    EXPECT_GE(e.t(), 1.0);
    EXPECT_EQ(e.dt(), dt);
  }
  EXPECT_TRUE(thrown);
}

TEST(Evolve, RejectsBadSampleTimes) {
  const PParams pp(2.0, 1);
  const GridSpec g(1, 64, 4.0);
  FlowState s{1.0, potential_field(gaussian_density(pp, 1, 1.0), g), pp, 1e-8};
  const std::vector<double> back{0.5, 1.5};
  const std::vector<double> flat{1.2, 1.2};
  EXPECT_THROW(evolve(s, back, {}), InvalidInput);
  EXPECT_THROW(evolve(s, flat, {}), InvalidInput);
  EXPECT_THROW(uniform_times(1.0, 1.0, 5), InvalidInput);
}

TEST(Evolve, UniformTimes) {
  const auto t = uniform_times(1.0, 2.0, 5);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t.front(), 1.0);
  EXPECT_EQ(t.back(), 2.0);
  EXPECT_DOUBLE_EQ(t[2], 1.5);
}

TEST(Evolve, BarenblattStaysSelfSimilar) {
  for (double p : {2.0, 3.0}) {
    const PParams pp(p, 1);
    const GridSpec g(1, 512, 9.0);
    const std::vector<double> times = uniform_times(1.0, 1.5, 3);
    const FlowRun run = evolve(barenblatt_density(pp, 1, 1.0), g, times, {}, false);
    const ScalarField& v = run.final_state.v;
    const double err = max_interior_error(
        v, [&](const Point& x) { return barenblatt_potential(std::abs(x[0]), 1.5, pp); }, 3.0);
    EXPECT_LT(err, p == 2.0 ? 1e-4 : 5e-4) << "p=" << p;
    EXPECT_LT(run.max_mass_drift_rate, 1e-10);
    EXPECT_EQ(run.rows.size(), 3u);
    EXPECT_NEAR(run.rows.back().t, 1.5, 1e-14);
  }
}

TEST(Evolve, EntropyGrowsAndDeBruijnHolds) {
  const PParams pp(2.5, 1);
  const GridSpec g(1, 512, 8.0);
  const FlowRun run = evolve(perturbed_barenblatt_density(pp, 1, 0.3, 4, 8.0), g, uniform_times(1.0, 1.5, 11), {});
  for (std::size_t k = 1; k < run.rows.size(); ++k) EXPECT_GT(run.rows[k].H, run.rows[k - 1].H);
  EXPECT_LT(debruijn_residual(run.rows, 1.0), 1e-2 * run.rows.front().I);
  EXPECT_NEAR(run.rows.front().mass, 1.0, 1e-12);
}

TEST(Evolve, StepDoublingAgrees) {
  const PParams pp(3.0, 1);
  const GridSpec g(1, 256, 8.0);
  const AnalyticDensity d = perturbed_barenblatt_density(pp, 1, 0.2, 2, 8.0);
  const std::vector<double> times{1.0, 1.2};
  StepControl c;
  const FlowRun a = evolve(d, g, times, c);
  c.error_tol = 1e-8;
  c.order = 2;
  const FlowRun b = evolve(d, g, times, c);
  EXPECT_NEAR(a.rows.back().H, b.rows.back().H, 1e-6);
}

TEST(TimeDerivatives, ExactForQuadratics) {
  const PParams pp(2.0, 1);
  std::vector<DiagnosticsRow> rows;
  for (double t : {1.0, 1.1, 1.25, 1.5, 1.6}) {
    DiagnosticsRow r;
    r.t = t;
    r.H = 0.5 * std::log(t * t);  // N = t^2 at p = 2, n = 1
    r.N = t * t;
    r.I = 3.0 * t * t - t;
    rows.push_back(r);
  }
  fill_time_derivatives(rows, pp);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.d2N_dt2_fd, 2.0, 1e-10);
    EXPECT_NEAR(r.J_fd, -0.5 * (6.0 * r.t - 1.0), 1e-10);
  }
  EXPECT_NEAR(rows[2].dH_dt_fd, 1.0 / 1.25, 5e-2);
}
