#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "entropylab/functionals.hpp"
#include "entropylab/inequalities.hpp"
#include "entropylab/solver.hpp"

namespace entropylab {

inline const std::vector<std::string> kExperimentIds = {"constants", "flow",         "concavity", "isoperimetric", "nash",
                                                        "lsi",       "improved-lsi", "ck",        "convergence"};

struct ExperimentConfig {
  std::string experiment = "flow";
  double p = 2.0;
  int n = 1;
  int grid_m = 512;
  double grid_L = 0.0;  // 0 sizes the box from the initial density
  StepControl control{};
  double t0 = 1.0;
  double t1 = 2.0;
  int samples = 17;
  TestDensity density{};
  std::vector<double> thetas{1.0, 2.0};
  // Matrix experiments; empty lists fall back to the documented defaults.
  std::vector<double> p_values;
  std::vector<int> n_values;
  std::vector<std::string> densities;
  int levels = 3;
  int eval_points = 0;
  std::string out_dir = "out";
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 0;

  double tolerance(const std::string& key) const;
  void validate() const;
};

// Default tolerance for each named check family.
const std::map<std::string, double>& default_tolerances();

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);
nlohmann::json to_json(const DeficitReport& r);

struct RunReport {
  ExperimentConfig config;
  std::vector<DeficitReport> checks;
  std::vector<DiagnosticsRow> series;
  bool pass = false;
  double wall_seconds = 0.0;
  nlohmann::json meta = nlohmann::json::object();
};

// Runs one experiment and writes <out>/<experiment>_report.json plus any
// CSV it produces. Wall-clock time is returned but not written, so files
// depend only on the config.
RunReport run(const ExperimentConfig& config);
RunReport convergence_study(const ExperimentConfig& config);

// Phase in [0, 2 pi) drawn from the seed (seed 0 keeps the configured phase).
double seeded_phase(std::uint64_t seed);

std::string format_double(double x);
std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows);
inline constexpr const char* kDiagnosticsHeader = "t,H,N,I,J_direct,J_fd,Psi,mass,dH_dt_fd,d2N_dt2_fd,err_term,eps";

nlohmann::json report_json(const RunReport& r);

// Flow-level helpers shared with the acceptance suite.
struct FlowSetup {
  AnalyticDensity density;
  GridSpec grid;
};
FlowSetup flow_setup(const ExperimentConfig& c);

// max over k of |(H_{k+1}-H_k)/dt - (I_k+I_{k+1})/2| for rows with t >= t_from.
double debruijn_residual(const std::vector<DiagnosticsRow>& rows, double t_from);
// max over interior k of |-d2N/dt2 - (p^2/n) N err| / ((p^2/n) N err).
double identity_residual(const std::vector<DiagnosticsRow>& rows, const PParams& params, double t_from);
// max over interior k of (N_{k+1} - 2 N_k + N_{k-1}) / N_k.
double max_second_difference(const std::vector<DiagnosticsRow>& rows);

}  // namespace entropylab
