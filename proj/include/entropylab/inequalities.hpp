#pragma once

#include <string>
#include <utility>
#include <vector>

#include "entropylab/density.hpp"
#include "entropylab/params.hpp"

namespace entropylab {

enum class DensityKind { barenblatt, gaussian, perturbed_barenblatt, compact_bump };
enum class Normalization {
  unit_mass,  // integral of u^{p-1} = g^p equals 1
  unit_l1,    // integral of g equals 1
};

std::string to_string(DensityKind kind);
DensityKind parse_density_kind(const std::string& name);

struct TestDensity {
  DensityKind kind = DensityKind::barenblatt;
  double sigma = 1.0;              // gaussian: mass density is N(0, sigma^2)
  double amplitude = 0.2;          // perturbed_barenblatt
  int wave_number = 2;
  double period_half_width = 4.0;  // cos(pi k x / L + phase)
  double phase = 0.0;
  double width = 1.0;              // compact_bump: exp(-(|x|/width)^4)
  double dilation = 1.0;           // applied after construction
  Normalization normalization = Normalization::unit_mass;

  std::string describe() const;
};

AnalyticDensity make_test_density(const TestDensity& spec, const PParams& params);

// The four kinds at their default parameters.
std::vector<TestDensity> standard_densities();

struct DeficitReport {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double deficit = 0.0;
  double rel = 0.0;
  bool pass = false;
  bool extremal = false;
  double tolerance = 0.0;
  double order = 0.0;  // observed refinement order of the deficit (NaN if none)
  std::vector<std::pair<std::string, double>> params;
  std::string note;
};

inline constexpr double kStrictTolerance = 1e-6;
inline constexpr double kExtremalRelTolerance = 5e-3;

struct EvalSpec {
  int points = 0;  // base points per axis; 0 picks 2048 in 1-D and 256 in 2-D
  int levels = 3;  // m, 2m, 4m
  double tolerance = kStrictTolerance;
  double extremal_tolerance = kExtremalRelTolerance;
  bool extremal = false;  // judge as an equality case
};

DeficitReport nash_deficit(const AnalyticDensity& g, const EvalSpec& spec = {});
DeficitReport lsi_deficit(const AnalyticDensity& g, const EvalSpec& spec = {});
DeficitReport lsi_u_form(const AnalyticDensity& u, const EvalSpec& spec = {});
DeficitReport ck_bound(const AnalyticDensity& u, double theta, const EvalSpec& spec = {});
DeficitReport improved_lsi(const AnalyticDensity& g, double theta, const EvalSpec& spec = {});
DeficitReport isoperimetric_check(const AnalyticDensity& u, const EvalSpec& spec = {});
DeficitReport jensen_check(const AnalyticDensity& g, const EvalSpec& spec = {});

struct MomentCheck {
  double value;  // (1/n) integral |x|^q u^{p-1}
  double bound;  // p^{1/(p-1)}
  bool holds;
};

MomentCheck moment_check(const AnalyticDensity& u);

// Additive constant of the u-form LSI, in the Gamma-function form and the
// form through gamma_{n,p}; they must agree.
double lsi_u_constant(const PParams& params);
double lsi_u_constant_via_gamma(const PParams& params);

// h with h^p = n p^{-(p+1)} / integral |grad g|^p; dilating by 1/h is the
// optimal scaling in the u-form.
double lsi_scaling_factor(const AnalyticDensity& g);

// Inequality ids accepted by the matrix runner.
inline const std::vector<std::string> kInequalityIds = {"isoperimetric", "nash", "lsi", "lsi-u", "ck",
                                                        "improved-lsi", "jensen"};

struct MatrixSpec {
  std::vector<double> p_values{1.25, 1.5, 2.0, 3.0, 4.0};
  std::vector<int> n_values{1, 2};
  std::vector<TestDensity> densities = standard_densities();
  std::vector<double> thetas{1.0, 2.0};
  std::vector<std::string> inequalities = kInequalityIds;
  EvalSpec eval{};
};

struct MatrixResult {
  std::vector<DeficitReport> checks;
  // Evaluations not run because a stated hypothesis fails, with the reason.
  std::vector<std::pair<std::string, std::string>> skipped;
};

MatrixResult run_inequality_matrix(const MatrixSpec& spec);

}  // namespace entropylab
