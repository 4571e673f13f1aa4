// entropylab: runs the p-entropy experiments from a config file and/or flags.
//
//   entropylab constants --p 3 --n 2
//   entropylab flow --config flow.json --grid-m 1024
//   entropylab verify --experiment nash
//   entropylab convergence --p 1.5 --density perturbed
//   entropylab report --out out
//
// Exit status: 0 if every check passed, 1 if any failed, 2 for invalid
// input, 3 if the solver went unstable, 4 for any other error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "entropylab/errors.hpp"
#include "entropylab/harness.hpp"
#include "entropylab/parallel.hpp"

using namespace entropylab;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kMatrixExperiments = {"isoperimetric", "nash", "lsi", "improved-lsi", "ck"};

struct Overrides {
  std::string config;
  std::optional<std::string> experiment;
  std::optional<double> p, grid_L, t0, t1;
  std::optional<int> n, grid_m, samples, levels, eval_points;
  std::optional<std::string> density, out;
  std::vector<double> thetas, p_values;
  std::vector<int> n_values;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--p", o.p, "exponent p in (1, 6]");
  app->add_option("--n", o.n, "dimension n");
  app->add_option("--grid-m", o.grid_m, "points per axis");
  app->add_option("--grid-L", o.grid_L, "box half-width (0 = automatic)");
  app->add_option("--t0", o.t0, "initial time");
  app->add_option("--t1", o.t1, "final time");
  app->add_option("--samples", o.samples, "diagnostic sample count");
  app->add_option("--density", o.density, "barenblatt | gaussian | perturbed | bump");
  app->add_option("--theta", o.thetas, "theta values for ck / improved-lsi");
  app->add_option("--p-values", o.p_values, "p values for the inequality matrix");
  app->add_option("--n-values", o.n_values, "dimensions for the inequality matrix");
  app->add_option("--levels", o.levels, "refinement levels");
  app->add_option("--eval-points", o.eval_points, "base points per axis for static checks");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--seed", o.seed, "seed for perturbation phases");
}

ExperimentConfig build_config(const Overrides& o, const std::string& default_experiment) {
  ExperimentConfig c;
  c.experiment = default_experiment;
  if (!o.config.empty()) c = load_config(o.config);
  if (o.experiment) c.experiment = *o.experiment;
  if (o.p) c.p = *o.p;
  if (o.n) c.n = *o.n;
  if (o.grid_m) c.grid_m = *o.grid_m;
  if (o.grid_L) c.grid_L = *o.grid_L;
  if (o.t0) c.t0 = *o.t0;
  if (o.t1) c.t1 = *o.t1;
  if (o.samples) c.samples = *o.samples;
  if (o.density) {
    c.density.kind = parse_density_kind(*o.density);
    c.densities = {*o.density};
  }
  if (!o.thetas.empty()) c.thetas = o.thetas;
  if (!o.p_values.empty()) c.p_values = o.p_values;
  if (!o.n_values.empty()) c.n_values = o.n_values;
  if (o.levels) c.levels = *o.levels;
  if (o.eval_points) c.eval_points = *o.eval_points;
  if (o.out) c.out_dir = *o.out;
  if (o.seed) c.seed = *o.seed;
  return c;
}

void print_report(const RunReport& r) {
  std::size_t failed = 0;
  for (const auto& c : r.checks) {
    if (c.pass) continue;
    ++failed;
    std::printf("  FAIL %s  lhs=%.10g rhs=%.10g deficit=%.3g\n", c.id.c_str(), c.lhs, c.rhs, c.deficit);
  }
  std::printf("%s %s: %zu/%zu checks passed (%.1f s) -> %s\n", r.pass ? "PASS" : "FAIL", r.config.experiment.c_str(),
              r.checks.size() - failed, r.checks.size(), r.wall_seconds, r.config.out_dir.c_str());
}

int run_one(ExperimentConfig c) {
  const RunReport r = c.experiment == "convergence" ? convergence_study(c) : run(c);
  print_report(r);
  return r.pass ? 0 : 1;
}

int summarize(const std::string& dir) {
  if (!fs::is_directory(dir)) throw InvalidInput("no such output directory '" + dir + "'");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.size() > 12 && name.ends_with("_report.json")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InvalidInput("no *_report.json files in '" + dir + "'");
  bool all = true;
  for (const auto& f : files) {
    std::ifstream in(f);
    const nlohmann::json j = nlohmann::json::parse(in);
    std::size_t passed = 0, total = 0;
    for (const auto& c : j.at("checks")) {
      ++total;
      if (c.at("pass").get<bool>()) ++passed;
      else std::printf("  FAIL %s  deficit=%.3g\n", c.at("id").get<std::string>().c_str(), c.at("deficit").get<double>());
    }
    const bool ok = j.at("pass").get<bool>();
    all = all && ok;
    std::printf("%s %-28s %zu/%zu\n", ok ? "PASS" : "FAIL", f.filename().string().c_str(), passed, total);
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  parallel::apply_env_thread_cap();

  CLI::App app{"p-entropy power laboratory"};
  app.require_subcommand(1);
  Overrides o;

  auto* constants = app.add_subcommand("constants", "closed-form constants table with quadrature cross-checks");
  auto* flow = app.add_subcommand("flow", "evolve a test density and check the flow identities");
  auto* verify = app.add_subcommand("verify", "inequality deficits over the density matrix");
  auto* convergence = app.add_subcommand("convergence", "refinement study at m, 2m, 4m");
  auto* report = app.add_subcommand("report", "summarize the reports in an output directory");
  for (auto* sub : {constants, flow, verify, convergence}) add_common(sub, o);
  flow->add_option("--experiment", o.experiment, "flow | concavity");
  verify->add_option("--experiment", o.experiment, "isoperimetric | nash | lsi | improved-lsi | ck (default: all)");
  report->add_option("--out", o.out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*constants) return run_one(build_config(o, "constants"));
    if (*flow) {
      ExperimentConfig c = build_config(o, "flow");
      if (c.experiment != "flow" && c.experiment != "concavity")
        throw InvalidInput("flow runs experiment 'flow' or 'concavity', not '" + c.experiment + "'");
      return run_one(c);
    }
    if (*convergence) {
      ExperimentConfig c = build_config(o, "convergence");
      c.experiment = "convergence";
      return run_one(c);
    }
    if (*verify) {
      const ExperimentConfig base = build_config(o, "");
      std::vector<std::string> ids = kMatrixExperiments;
      if (!base.experiment.empty() && base.experiment != "flow") {
        if (std::find(ids.begin(), ids.end(), base.experiment) == ids.end())
          throw InvalidInput("verify runs an inequality experiment, not '" + base.experiment + "'");
        ids = {base.experiment};
      }
      int status = 0;
      for (const auto& id : ids) {
        ExperimentConfig c = base;
        c.experiment = id;
        status = std::max(status, run_one(c));
      }
      return status;
    }
    if (*report) return summarize(o.out.value_or(ExperimentConfig{}.out_dir));
  } catch (const InstabilityError& e) {
    std::fprintf(stderr, "error: %s (t=%.6g, dt=%.3g)\n", e.what(), e.t(), e.dt());
    return 3;
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  return 0;
}
