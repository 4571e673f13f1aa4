#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "entropylab/closed_forms.hpp"
#include "entropylab/errors.hpp"
#include "entropylab/functionals.hpp"
#include "entropylab/inequalities.hpp"
#include "entropylab/richardson.hpp"
#include "entropylab/stencils.hpp"
#include "oracle_values.hpp"

using namespace entropylab;
using std::numbers::e;
using std::numbers::pi;

namespace {

double analytic_entropy(const AnalyticDensity& d) {
  return integrate_analytic(d, [](const Point&, const PotentialSample& s) { return s.v * std::exp(-s.v); });
}

double analytic_fisher(const AnalyticDensity& d) {
  const double p = d.params().p;
  return integrate_analytic(d, [p](const Point&, const PotentialSample& s) {
    return std::pow(s.grad[0] * s.grad[0] + s.grad[1] * s.grad[1], 0.5 * p) * std::exp(-s.v);
  });
}

GridSpec box_for(const AnalyticDensity& d, int m) { return GridSpec(d.dim(), m, 1.02 * d.radius(kTailDecay)); }

}  // namespace

TEST(Entropy, UniformDensity) {
  for (int d = 1; d <= 2; ++d) {
    const PParams pp(2.5, d);
    const GridSpec g(d, 32, 1.5);
    const double w = std::pow(3.0, -d);
    const auto u = ScalarField::sample(g, [&](const Point&) { return std::pow(w, 1.0 / (pp.p - 1)); }, FieldRole::density_u);
    const TwoRoute h = entropy(u, pp);
    EXPECT_NEAR(h.route_a, d * std::log(3.0), 1e-12);
    EXPECT_NEAR(h.route_b, d * std::log(3.0), 1e-12);
  }
}

TEST(Entropy, SampledHeatKernel) {
  const PParams pp(2.0, 1);
  const GridSpec g(1, 1024, 12.0);
  const auto u = ScalarField::sample(g, [&](const Point& x) { return barenblatt_profile(x[0], pp); }, FieldRole::density_u);
  const TwoRoute h = entropy(u, pp);
  EXPECT_NEAR(h.value(), 1.7655121, 1e-6);
  EXPECT_NEAR(h.value(), oracle::kH_2_1, 1e-9);
  EXPECT_NEAR(entropy_power(h.value(), pp) / (4 * pi * e), 1.0, 1e-4);
  EXPECT_EQ(entropy_power(0.0, pp), 1.0);
}

TEST(Entropy, RouteMismatchIsReported) {
  const PParams pp(2.0, 1);
  const GridSpec g(1, 16, 1.0);
  DensitySample s = sample_density(gaussian_density(pp, 1, 0.5), g);
  s.u[3] *= 1.5;  // break the relation between u and v
  EXPECT_THROW(entropy(s), ConsistencyError);
}

TEST(Entropy, DilationShiftsByLogLambda) {
  const PParams pp(3.0, 1);
  for (const AnalyticDensity& d : {barenblatt_density(pp, 1), gaussian_density(pp, 1, 0.8)}) {
    const double shift = analytic_entropy(dilate_analytic(d, 2.0)) - analytic_entropy(d);
    EXPECT_NEAR(shift, std::log(2.0), 1e-8);
  }
  // Grid sampling of a smooth density reaches the same accuracy.
  const AnalyticDensity gd = gaussian_density(pp, 1, 0.8);
  const AnalyticDensity dd = dilate_analytic(gd, 2.0);
  const double h0 = entropy(sample_density(gd, box_for(gd, 2048))).value();
  const double h1 = entropy(sample_density(dd, box_for(dd, 2048))).value();
  EXPECT_NEAR(h1 - h0, std::log(2.0), 1e-8);
}

TEST(EntropyPower, DilationScalesByLambdaToP) {
  const PParams pp(2.5, 1);
  const AnalyticDensity d = perturbed_barenblatt_density(pp, 1, 0.2, 2, 4.0);
  const double n0 = entropy_power(analytic_entropy(d), pp);
  const double n1 = entropy_power(analytic_entropy(dilate_analytic(d, 1.5)), pp);
  EXPECT_NEAR(n1 / n0, std::pow(1.5, 2.5), 1e-8 * std::pow(1.5, 2.5));
}

TEST(Fisher, ConstantIsZero) {
  const PParams pp(3.0, 2);
  const GridSpec g(2, 16, 1.0);
  const auto u = ScalarField::sample(g, [](const Point&) { return 0.7; }, FieldRole::density_u);
  const TwoRoute i = fisher(u, pp);
  EXPECT_EQ(i.route_a, 0.0);
  EXPECT_EQ(i.route_b, 0.0);
}

TEST(Fisher, BarenblattIsNOverP) {
  for (double p : {1.5, 2.0, 3.0}) {
    const PParams pp(p, 1);
    const AnalyticDensity d = barenblatt_density(pp, 1);
    const TwoRoute exact = fisher(sample_density(d, box_for(d, 4096)));
    EXPECT_NEAR(exact.route_a, 1.0 / p, 1e-5);
    EXPECT_NEAR(exact.route_b, 1.0 / p, 1e-5);
    const TwoRoute fd = fisher(sample_density(potential_field(d, box_for(d, 4096)), pp));
    EXPECT_NEAR(fd.route_b, 1.0 / p, 1e-4);
  }
}

TEST(Fisher, DilationScalesByLambdaToMinusP) {
  const PParams pp(2.0, 1);
  const AnalyticDensity d = gaussian_density(pp, 1, 0.9);
  const double i0 = analytic_fisher(d);
  const double i1 = analytic_fisher(dilate_analytic(d, 2.0));
  EXPECT_NEAR(i1 / i0, 0.25, 1e-8 * 0.25);
  const AnalyticDensity dd = dilate_analytic(d, 2.0);
  const double g0 = fisher(sample_density(d, box_for(d, 2048))).value();
  const double g1 = fisher(sample_density(dd, box_for(dd, 2048))).value();
  EXPECT_NEAR(g1 / g0, 0.25, 1e-8 * 0.25);
}

TEST(Fisher, RoutesAgreeOnExactSamples) {
  for (double p : {1.25, 1.5, 2.0, 3.0, 4.0}) {
    for (int n = 1; n <= 2; ++n) {
      const PParams pp(p, n);
      for (const TestDensity& td : standard_densities()) {
        const AnalyticDensity d = make_test_density(td, pp);
        const TwoRoute i = fisher(sample_density(d, box_for(d, n == 1 ? 1024 : 128)));
        EXPECT_LT(i.relative_gap(), 1e-8) << td.describe() << " p=" << p << " n=" << n;
      }
    }
  }
}

TEST(Fisher, FiniteDifferenceRoutesConvergeTogether) {
  const PParams pp(3.0, 1);
  const AnalyticDensity d = perturbed_barenblatt_density(pp, 1, 0.2, 2, 4.0);
  std::vector<double> gaps;
  for (int m : {1024, 2048, 4096, 8192}) {
    const TwoRoute i = fisher(sample_density(potential_field(d, box_for(d, m)), pp));
    gaps.push_back(i.route_a - i.route_b);
  }
  const auto orders = observed_orders(gaps);
  EXPECT_NEAR(orders.back(), 2.0, 0.2);
  EXPECT_LT(std::abs(richardson(gaps).value), 1e-8);
}

TEST(AMetric, IdentityAtPTwo) {
  const AMetric m = a_metric({0.3, -1.2}, 2, 2.0, 1e-8);
  EXPECT_EQ(m.upper.c, (std::array<double, 3>{1.0, 0.0, 1.0}));
  EXPECT_EQ(m.lower.c, (std::array<double, 3>{1.0, 0.0, 1.0}));
}

TEST(AMetric, ScalarLimit) {
  for (double eps : {1e-2, 1e-4, 1e-8}) {
    const AMetric m = a_metric({0.7, 0.0}, 1, 3.5, eps);
    EXPECT_NEAR(m.upper(0, 0), 2.5, 10 * eps * eps);
  }
}

TEST(AMetric, InverseContracts) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const double p = 1.1 + 4.0 * (U(rng) + 2) / 4;
    const AMetric m = a_metric({U(rng), U(rng)}, 2, p, 1e-3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (int k = 0; k < 2; ++k) s += m.upper(i, k) * m.lower(k, j);
        EXPECT_NEAR(s, i == j ? 1.0 : 0.0, 1e-12);
      }
    EXPECT_NEAR(a_norm(m.lower, m.upper), 2.0, 1e-12);
  }
}

TEST(ANorm, FrobeniusAtPTwo) {
  SymMatrix t{2, {1.5, -0.25, 3.0}};
  const AMetric m = a_metric({1.0, 2.0}, 2, 2.0, 1e-8);
  EXPECT_NEAR(a_norm(t, m.upper), 1.5 * 1.5 + 2 * 0.0625 + 9.0, 1e-14);
}

TEST(ANorm, MatchesHessianExpansion) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int trial = 0; trial < 500; ++trial) {
    const double p = 1.2 + 3.0 * (U(rng) + 1.5) / 3.0;
    const double eps = 1e-4;
    const Point g{U(rng), U(rng)};
    const SymMatrix h{2, {U(rng), U(rng), U(rng)}};
    const double om = g[0] * g[0] + g[1] * g[1] + eps * eps;
    // grad omega = 2 H grad v
    const double hg0 = h(0, 0) * g[0] + h(0, 1) * g[1], hg1 = h(1, 0) * g[0] + h(1, 1) * g[1];
    const double dw_dv = 2.0 * (g[0] * hg0 + g[1] * hg1);
    const double dw2 = 4.0 * (hg0 * hg0 + hg1 * hg1);
    const double hh = h(0, 0) * h(0, 0) + 2 * h(0, 1) * h(0, 1) + h(1, 1) * h(1, 1);
    const double expansion = (p - 2) * (p - 2) / 4 * dw_dv * dw_dv / (om * om) + (p - 2) / 2 * dw2 / om + hh;
    const double direct = a_norm(h, a_metric(g, 2, p, eps).upper);
    EXPECT_NEAR(direct, expansion, 1e-8 * std::max(1.0, std::abs(expansion)));
    EXPECT_GE(direct, -1e-12);
  }
}

TEST(JDirect, HeatKernelQuarter) {
  const PParams pp(2.0, 1);
  const GridSpec g(1, 1024, 12.0);
  const ScalarField v = potential_field(barenblatt_density(pp, 1), g);
  const double eps = default_regularization(v);
  EXPECT_NEAR(j_direct(v, pp, eps), 0.25, 1e-4);
  SecondOrderOptions nodal;
  nodal.route = HessianRoute::nodal;
  EXPECT_NEAR(j_direct(v, pp, eps, nodal), 0.25, 1e-4);
}

TEST(JDirect, BarenblattSaturatesLowerBound) {
  for (double p : {1.5, 2.0, 3.0}) {
    const PParams pp(p, 1);
    const AnalyticDensity d = barenblatt_density(pp, 1);
    const ScalarField v = potential_field(d, box_for(d, 2048));
    const double eps = default_regularization(v);
    const double i = fisher(sample_density(v, pp)).value();
    const double j = j_direct(v, pp, eps);
    EXPECT_NEAR(j, i * i, 2e-4 * i * i) << "p=" << p;
    const double err = error_term(v, i, pp, eps);
    EXPECT_GE(err, 0.0);
    EXPECT_LT(err, 1e-3 * i * i) << "p=" << p;
  }
}

TEST(JDirect, PerturbedExceedsLowerBound) {
  for (double p : {1.5, 2.0, 3.0}) {
    for (int n = 1; n <= 2; ++n) {
      const PParams pp(p, n);
      const AnalyticDensity d = perturbed_barenblatt_density(pp, n, 0.2, 2, 4.0);
      const ScalarField v = potential_field(d, box_for(d, n == 1 ? 2048 : 256));
      const double eps = default_regularization(v);
      const double i = fisher(sample_density(v, pp)).value();
      EXPECT_GT(j_direct(v, pp, eps), i * i / n) << "p=" << p << " n=" << n;
    }
  }
}

TEST(ErrorTerm, GaussianAtPTwoVanishes) {
  const PParams pp(2.0, 2);
  const AnalyticDensity d = gaussian_density(pp, 2, 1.3);
  const ScalarField v = potential_field(d, box_for(d, 256));
  const double eps = default_regularization(v);
  const double i = fisher(sample_density(v, pp)).value();
  EXPECT_LT(std::abs(error_term(v, i, pp, eps)), 1e-3 * i * i / 2);
}

TEST(ErrorTerm, QuadraticInLambda) {
  for (auto route : {HessianRoute::flux_jacobian, HessianRoute::nodal}) {
    for (int n = 1; n <= 2; ++n) {
      const PParams pp(3.0, n);
      const AnalyticDensity d = perturbed_barenblatt_density(pp, n, 0.3, 2, 4.0);
      const ScalarField v = potential_field(d, box_for(d, n == 1 ? 1024 : 128));
      const double eps = default_regularization(v);
      SecondOrderOptions o;
      o.route = route;
      const double i = fisher(sample_density(v, pp)).value();
      const double a0 = a_lambda(v, 0.0, pp, eps, o), a1 = a_lambda(v, 1.0, pp, eps, o),
                   am = a_lambda(v, -1.0, pp, eps, o);
      const double c2 = 0.5 * (a1 + am) - a0, c1 = 0.5 * (a1 - am);
      const double lam = -i / n;
      const double err = error_term(v, i, pp, eps, o);
      EXPECT_NEAR(err, a0 + c1 * lam + c2 * lam * lam, 1e-10 * a0);
      // The quadratic coefficient is n times the mass.
      EXPECT_NEAR(c2, n * mass(sample_density(v, pp)), 1e-9 * n);
      EXPECT_EQ(a0, j_direct(v, pp, eps, o));
      EXPECT_GE(err, 0.0);
    }
  }
}

TEST(ErrorTerm, CompletesTheSquareUnderRefinement) {
  const PParams pp(2.5, 1);
  const AnalyticDensity d = perturbed_barenblatt_density(pp, 1, 0.3, 2, 4.0);
  std::vector<double> gaps;
  for (int m : {512, 1024, 2048, 4096}) {
    const ScalarField v = potential_field(d, box_for(d, m));
    const double eps = default_regularization(v);
    const double i = fisher(sample_density(v, pp)).value();
    const double j = j_direct(v, pp, eps);
    gaps.push_back((error_term(v, i, pp, eps) - (j - i * i)) / j);
  }
  EXPECT_LT(std::abs(gaps.back()), 1e-4);
  EXPECT_LT(std::abs(richardson(gaps).value), 1e-6);
}

TEST(ErrorTerm, RicciHookAddsCurvature) {
  const PParams pp(2.0, 1);
  const AnalyticDensity d = gaussian_density(pp, 1, 1.0);
  const ScalarField v = potential_field(d, box_for(d, 512));
  const double eps = default_regularization(v);
  SecondOrderOptions o;
  o.ricci = [](const Point&, const Point& g) { return 0.5 * g[0] * g[0]; };
  const double i = fisher(sample_density(v, pp)).value();
  EXPECT_NEAR(j_direct(v, pp, eps, o) - j_direct(v, pp, eps), 0.5 * i, 1e-10);
}

TEST(Dilation, IdentityAndMass) {
  const PParams pp(3.0, 2);
  const AnalyticDensity d = perturbed_barenblatt_density(pp, 2, 0.2, 2, 4.0);
  const AnalyticDensity same = dilate_analytic(d, 1.0);
  for (const Point& x : {Point{0.0, 0.0}, Point{0.3, -1.1}, Point{2.0, 2.5}}) {
    EXPECT_EQ(same.potential(x), d.potential(x));
  }
  EXPECT_NEAR(analytic_mass(dilate_analytic(d, 2.0)), analytic_mass(d), 1e-10);
  EXPECT_NEAR(analytic_mass(dilate_analytic(d, 0.5)), analytic_mass(d), 1e-10);
  const PParams p1(2.0, 1);
  const AnalyticDensity gd = gaussian_density(p1, 1, 1.0);
  const AnalyticDensity dd = dilate_analytic(gd, 2.0);
  EXPECT_NEAR(mass(sample_density(dd, box_for(dd, 1024))), mass(sample_density(gd, box_for(gd, 1024))), 1e-10);
  EXPECT_THROW(dilate_analytic(d, 0.0), InvalidInput);
}

TEST(Dilation, PsiInvariant) {
  for (double p : {1.5, 3.0}) {
    const PParams pp(p, 1);
    const AnalyticDensity d = perturbed_barenblatt_density(pp, 1, 0.2, 2, 4.0);
    const double psi = entropy_power(analytic_entropy(d), pp) * analytic_fisher(d);
    for (double lam : {0.5, 2.0}) {
      const AnalyticDensity dl = dilate_analytic(d, lam);
      const double psil = entropy_power(analytic_entropy(dl), pp) * analytic_fisher(dl);
      EXPECT_NEAR(psil / psi, 1.0, 1e-7);
    }
  }
}

TEST(Diagnostics, RowInvariants) {
  const PParams pp(2.0, 1);
  const AnalyticDensity d = perturbed_barenblatt_density(pp, 1, 0.2, 3, 6.0);
  const ScalarField v = potential_field(d, GridSpec(1, 512, 6.0));
  const DiagnosticsRow r = diagnose(v, 1.0, pp, default_regularization(v));
  EXPECT_NEAR(r.N, std::exp(2.0 * r.H), 1e-12 * r.N);
  EXPECT_EQ(r.Psi, r.N * r.I);
  EXPECT_GT(r.mass, 0.0);
  EXPECT_GT(r.eps, 0.0);
  EXPECT_GE(r.err_term, 0.0);
}

TEST(Regularization, DefaultScalesWithGradient) {
  const GridSpec g(1, 64, 2.0);
  EXPECT_EQ(default_regularization(ScalarField::sample(g, [](const Point&) { return 1.0; })), 1e-8);
  const double eps = default_regularization(ScalarField::sample(g, [](const Point& x) { return 3.0 * std::sin(x[0] * pi / 2); }));
  EXPECT_GT(eps, 1e-8 * 4.0);
  EXPECT_LT(eps, 1e-8 * 4.8);
}
