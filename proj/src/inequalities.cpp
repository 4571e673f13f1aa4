#include "entropylab/inequalities.hpp"

#include <cmath>
#include <numbers>

#include "entropylab/closed_forms.hpp"
#include "entropylab/errors.hpp"
#include "entropylab/functionals.hpp"
#include "entropylab/parallel.hpp"
#include "entropylab/richardson.hpp"
#include "entropylab/stencils.hpp"

namespace entropylab {

std::string to_string(DensityKind kind) {
  switch (kind) {
    case DensityKind::barenblatt: return "barenblatt";
    case DensityKind::gaussian: return "gaussian";
    case DensityKind::perturbed_barenblatt: return "perturbed_barenblatt";
    case DensityKind::compact_bump: return "compact_bump";
  }
  return "unknown";
}

DensityKind parse_density_kind(const std::string& name) {
  if (name == "barenblatt") return DensityKind::barenblatt;
  if (name == "gaussian") return DensityKind::gaussian;
  if (name == "perturbed_barenblatt" || name == "perturbed-barenblatt" || name == "perturbed")
    return DensityKind::perturbed_barenblatt;
  if (name == "compact_bump" || name == "compact-bump" || name == "bump") return DensityKind::compact_bump;
  throw InvalidInput("unknown density kind '" + name + "'");
}

namespace {
std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}
}  // namespace

std::string TestDensity::describe() const {
  std::string s = to_string(kind);
  switch (kind) {
    case DensityKind::barenblatt: break;
    case DensityKind::gaussian: s += "(sigma=" + fmt(sigma) + ")"; break;
    case DensityKind::perturbed_barenblatt:
      s += "(a=" + fmt(amplitude) + ",k=" + std::to_string(wave_number) + ",L=" + fmt(period_half_width) +
           (phase != 0.0 ? ",phase=" + fmt(phase) : "") + ")";
      break;
    case DensityKind::compact_bump: s += "(width=" + fmt(width) + ")"; break;
  }
  if (dilation != 1.0) s += "*D" + fmt(dilation);
  return s;
}

AnalyticDensity make_test_density(const TestDensity& spec, const PParams& params) {
  const int dim = params.n;
  if (dim != 1 && dim != 2) throw InvalidInput("test densities are available for n = 1 or 2");
  AnalyticDensity d = [&] {
    switch (spec.kind) {
      case DensityKind::barenblatt: return barenblatt_density(params, dim);
      case DensityKind::gaussian: return gaussian_density(params, dim, spec.sigma);
      case DensityKind::perturbed_barenblatt:
        return perturbed_barenblatt_density(params, dim, spec.amplitude, spec.wave_number, spec.period_half_width,
                                            spec.phase);
      case DensityKind::compact_bump: return bump_density(params, dim, spec.width);
    }
    throw InvalidInput("unknown density kind");
  }();
  if (spec.dilation != 1.0) d = dilate_analytic(d, spec.dilation);
  return spec.normalization == Normalization::unit_mass ? normalize_mass(d) : normalize_l1(d);
}

std::vector<TestDensity> standard_densities() {
  TestDensity b;
  TestDensity g;
  g.kind = DensityKind::gaussian;
  TestDensity pb;
  pb.kind = DensityKind::perturbed_barenblatt;
  TestDensity bump;
  bump.kind = DensityKind::compact_bump;
  return {b, g, pb, bump};
}

double lsi_u_constant(const PParams& params) {
  const double p = params.p, q = params.q, n = params.n;
  return n * (std::log(p) / p + std::log(q) / q + 1.0) + 0.5 * n * std::log(std::numbers::pi) +
         log_gamma(n / q + 1.0) - log_gamma(0.5 * n + 1.0);
}

double lsi_u_constant_via_gamma(const PParams& params) {
  const double p = params.p, n = params.n;
  return n / p * (std::log(p / n) + 1.0 + log_gamma_np(params));
}

namespace {

constexpr double kNormTol = 1e-9;

double checked_u_constant(const PParams& params) {
  const double a = lsi_u_constant(params);
  const double b = lsi_u_constant_via_gamma(params);
  if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
    throw ConsistencyError("u-form LSI constant disagrees between its two closed forms");
  return b;
}

void require_unit_mass(const AnalyticDensity& d, const char* who) {
  const double m = analytic_mass(d);
  if (std::abs(m - 1.0) > kNormTol)
    throw PreconditionError(std::string(who) + " needs unit mass; got " + fmt(m));
}

void require_unit_l1(const AnalyticDensity& d, const char* who) {
  const double m = analytic_l1(d);
  if (std::abs(m - 1.0) > kNormTol)
    throw PreconditionError(std::string(who) + " needs integral of g equal to 1; got " + fmt(m));
}

struct Sides {
  double lhs;
  double rhs;
};

// Evaluates the two sides on grids refined by 2 and extrapolates.
template <class F>
DeficitReport refine(const std::string& id, const AnalyticDensity& d, const EvalSpec& spec, double decay, F&& sides) {
  if (spec.levels < 1) throw InvalidInput("need at least one refinement level");
  const int dim = d.dim();
  const int m0 = spec.points > 0 ? spec.points : (dim == 1 ? 2048 : 256);
  const double half_width = 1.02 * d.radius(decay);
  std::vector<double> lhs, rhs, def;
  for (int level = 0; level < spec.levels; ++level) {
    const GridSpec grid(dim, m0 << level, half_width);
    const Sides s = sides(sample_density(d, grid));
    lhs.push_back(s.lhs);
    rhs.push_back(s.rhs);
    def.push_back(s.lhs - s.rhs);
  }
  const RichardsonResult rd = richardson(def);
  DeficitReport r;
  r.id = id;
  r.lhs = richardson(lhs).value;
  r.rhs = richardson(rhs).value;
  r.deficit = rd.value;
  r.order = rd.order;
  r.rel = r.deficit / std::max({std::abs(r.lhs), std::abs(r.rhs), 1.0});
  r.extremal = spec.extremal;
  if (spec.extremal) {
    r.tolerance = spec.extremal_tolerance;
    r.pass = std::abs(r.rel) <= spec.extremal_tolerance;
  } else {
    r.tolerance = spec.tolerance;
    r.pass = r.deficit >= -spec.tolerance;
  }
  if (!std::isfinite(r.deficit)) r.pass = false;
  r.params = {{"p", d.params().p}, {"n", static_cast<double>(d.params().n)}};
  return r;
}

double sum(const DensitySample& s, const std::function<double(std::size_t)>& term) {
  return s.grid.cell_volume() * parallel::sum(s.v.size(), term);
}

double grad_norm(const DensitySample& s, std::size_t k) {
  double om = 0.0;
  for (int a = 0; a < s.grid.dim(); ++a) om += s.grad_v[a][k] * s.grad_v[a][k];
  return std::sqrt(om);
}

// integral of |grad g|^p with g = e^{-v/p}, evaluated through g itself.
double grad_g_p(const DensitySample& s) {
  const double p = s.params.p;
  return sum(s, [&](std::size_t k) {
    const double g = std::exp(-s.v[k] / p);
    return std::pow(g * grad_norm(s, k) / p, p);
  });
}

double barenblatt_v(const DensitySample& s, std::size_t k) {
  const Point x = s.grid.node(k);
  return barenblatt_potential(std::hypot(x[0], x[1]), 1.0, s.params);
}

// log |w/G - 1| with w = e^{-v}, G = e^{-vG}.
double log_abs_ratio_minus_one(double v, double vg) {
  const double d = vg - v;
  if (d > 40.0) return d + std::log1p(-std::exp(-d));
  return std::log(std::abs(std::expm1(d)));
}

// integral |w/G - 1|^theta G
double ratio_moment(const DensitySample& s, double theta) {
  return sum(s, [&](std::size_t k) {
    const double vg = barenblatt_v(s, k);
    return std::exp(theta * log_abs_ratio_minus_one(s.v[k], vg) - vg);
  });
}

void check_theta(double theta) {
  if (!(theta > 0.0 && theta <= 2.0)) throw InvalidInput("theta must lie in (0, 2]");
}

void check_dims(const AnalyticDensity& d) {
  if (d.params().n != d.dim()) throw InvalidInput("density dimension must equal n");
}

}  // namespace

DeficitReport nash_deficit(const AnalyticDensity& g, const EvalSpec& spec) {
  check_dims(g);
  const PParams& pp = g.params();
  const double p = pp.p, q = pp.q, n = pp.n;
  const double gamma = gamma_np(pp);
  auto r = refine("nash", g, spec, kTailDecay * p, [&](const DensitySample& s) {
    const double l1 = sum(s, [&](std::size_t k) { return std::exp(-s.v[k] / p); });
    const double lp = sum(s, [&](std::size_t k) { return s.w[k]; });
    const double grad = grad_g_p(s);
    return Sides{std::pow(p, p) / gamma * std::pow(l1, p * q / n) * grad, std::pow(lp, 1.0 + q / n)};
  });
  return r;
}

DeficitReport lsi_deficit(const AnalyticDensity& g, const EvalSpec& spec) {
  check_dims(g);
  require_unit_mass(g, "lsi_deficit");
  const PParams& pp = g.params();
  const double p = pp.p, n = pp.n;
  const double gamma = gamma_np(pp);
  return refine("lsi", g, spec, kTailDecay, [&](const DensitySample& s) {
    const double grad = grad_g_p(s);
    // integral of g^p log g^p = -integral of v e^{-v}
    const double ent = -sum(s, [&](std::size_t k) { return s.v[k] * s.w[k]; });
    return Sides{n / p * std::log(std::pow(p, p) / gamma * grad), ent};
  });
}

DeficitReport lsi_u_form(const AnalyticDensity& u, const EvalSpec& spec) {
  check_dims(u);
  require_unit_mass(u, "lsi_u_form");
  const double k_const = checked_u_constant(u.params());
  return refine("lsi-u", u, spec, kTailDecay, [&](const DensitySample& s) {
    const TwoRoute i = fisher(s);
    const TwoRoute h = entropy(s);
    return Sides{i.route_a + h.route_a, k_const};
  });
}

MomentCheck moment_check(const AnalyticDensity& u) {
  check_dims(u);
  const PParams& pp = u.params();
  const double q = pp.q;
  const double m = integrate_analytic(u, [q](const Point& x, const PotentialSample& s) {
    return std::pow(std::hypot(x[0], x[1]), q) * std::exp(-s.v);
  });
  MomentCheck c{m / pp.n, std::pow(pp.p, 1.0 / (pp.p - 1.0)), false};
  c.holds = c.value <= c.bound * (1.0 + 1e-9);
  return c;
}

DeficitReport ck_bound(const AnalyticDensity& u, double theta, const EvalSpec& spec) {
  check_theta(theta);
  check_dims(u);
  require_unit_mass(u, "ck_bound");
  auto r = refine("ck", u, spec, kTailDecay, [&](const DensitySample& s) {
    const double kl = sum(s, [&](std::size_t k) { return s.w[k] * (barenblatt_v(s, k) - s.v[k]); });
    return Sides{kl, 0.5 * std::pow(ratio_moment(s, theta), 2.0 / theta)};
  });
  r.params.emplace_back("theta", theta);
  return r;
}

DeficitReport improved_lsi(const AnalyticDensity& g, double theta, const EvalSpec& spec) {
  check_theta(theta);
  check_dims(g);
  require_unit_mass(g, "improved_lsi");
  const MomentCheck mc = moment_check(g);
  if (!mc.holds)
    throw PreconditionError("improved_lsi needs (1/n) integral |x|^q u^{p-1} <= p^{1/(p-1)}; got " + fmt(mc.value) +
                            " > " + fmt(mc.bound));
  const PParams& pp = g.params();
  const double p = pp.p, n = pp.n;
  const double k_const = checked_u_constant(pp);
  auto r = refine("improved-lsi", g, spec, kTailDecay, [&](const DensitySample& s) {
    const double fisher_g = std::pow(p, p) * grad_g_p(s);
    const double ent = -sum(s, [&](std::size_t k) { return s.v[k] * s.w[k]; });
    return Sides{fisher_g - ent - k_const, p / (8.0 * n) * std::pow(ratio_moment(s, theta), 4.0 / theta)};
  });
  r.params.emplace_back("theta", theta);
  return r;
}

DeficitReport isoperimetric_check(const AnalyticDensity& u, const EvalSpec& spec) {
  check_dims(u);
  require_unit_mass(u, "isoperimetric_check");
  const PParams& pp = u.params();
  const double gamma = gamma_np(pp);
  return refine("isoperimetric", u, spec, kTailDecay, [&](const DensitySample& s) {
    const double h = entropy(s).value();
    const double i = fisher(s).value();
    return Sides{entropy_power(h, pp) * i, gamma};
  });
}

DeficitReport jensen_check(const AnalyticDensity& g, const EvalSpec& spec) {
  check_dims(g);
  require_unit_l1(g, "jensen_check");
  const double q = g.params().q;
  return refine("jensen", g, spec, kTailDecay * g.params().p, [&](const DensitySample& s) {
    const double xi = sum(s, [&](std::size_t k) { return s.w[k]; });
    const double neg_h = -sum(s, [&](std::size_t k) { return s.v[k] * s.w[k]; });
    return Sides{neg_h, q * xi * std::log(xi)};
  });
}

double lsi_scaling_factor(const AnalyticDensity& g) {
  const double p = g.params().p;
  const double grad = integrate_analytic(g, [p](const Point&, const PotentialSample& s) {
    const double om = s.grad[0] * s.grad[0] + s.grad[1] * s.grad[1];
    return std::exp(-s.v) * std::pow(om, 0.5 * p) / std::pow(p, p);
  });
  return std::pow(g.params().n * std::pow(p, -(p + 1.0)) / grad, 1.0 / p);
}

namespace {

bool is_barenblatt(const TestDensity& t) { return t.kind == DensityKind::barenblatt && t.dilation == 1.0; }

bool is_extremal(const std::string& id, const TestDensity& t, double p) {
  const bool dilated_barenblatt = t.kind == DensityKind::barenblatt;
  const bool p2_gaussian = p == 2.0 && t.kind == DensityKind::gaussian;
  if (id == "isoperimetric" || id == "lsi") return dilated_barenblatt || p2_gaussian;
  if (id == "lsi-u" || id == "ck" || id == "improved-lsi") {
    const bool matched_gaussian = p2_gaussian && std::abs(t.sigma * t.sigma * t.dilation * t.dilation - 2.0) < 1e-12;
    return is_barenblatt(t) || matched_gaussian;
  }
  return false;
}

}  // namespace

MatrixResult run_inequality_matrix(const MatrixSpec& spec) {
  MatrixResult out;
  for (double p : spec.p_values) {
    for (int n : spec.n_values) {
      const PParams pp(p, n);
      for (const TestDensity& td : spec.densities) {
        TestDensity mass_spec = td;
        mass_spec.normalization = Normalization::unit_mass;
        TestDensity l1_spec = td;
        l1_spec.normalization = Normalization::unit_l1;
        const AnalyticDensity u = make_test_density(mass_spec, pp);
        const AnalyticDensity g1 = make_test_density(l1_spec, pp);
        const std::string tag = "[p=" + fmt(p) + ",n=" + std::to_string(n) + "," + td.describe();

        for (const std::string& id : spec.inequalities) {
          EvalSpec es = spec.eval;
          es.extremal = is_extremal(id, td, p);
          auto add = [&](DeficitReport r, const std::string& extra) {
            r.id = id + tag + extra + "]";
            out.checks.push_back(std::move(r));
          };
          if (id == "isoperimetric") add(isoperimetric_check(u, es), "");
          else if (id == "nash") add(nash_deficit(g1, es), "");
          else if (id == "lsi") add(lsi_deficit(u, es), "");
          else if (id == "lsi-u") add(lsi_u_form(u, es), "");
          else if (id == "jensen") add(jensen_check(g1, es), "");
          else if (id == "ck") {
            for (double th : spec.thetas) add(ck_bound(u, th, es), ",theta=" + fmt(th));
          } else if (id == "improved-lsi") {
            for (double th : spec.thetas) {
              try {
                add(improved_lsi(u, th, es), ",theta=" + fmt(th));
              } catch (const PreconditionError& e) {
                out.skipped.emplace_back(id + tag + ",theta=" + fmt(th) + "]", e.what());
              }
            }
          } else {
            throw InvalidInput("unknown inequality id '" + id + "'");
          }
        }
      }
    }
  }
  return out;
}

}  // namespace entropylab
