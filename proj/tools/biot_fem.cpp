// biot_fem: solve, audit and convergence driver for the Biot benchmarks.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "biot/commands.hpp"
#include "biot/run_config.hpp"

namespace {

using nlohmann::json;

struct Overrides {
  std::string config_path;
  std::optional<std::string> scenario, scheme, stab_weight, initial_condition, output_dir;
  std::optional<double> epsilon, tau, t_final;
  std::optional<int> nx, ny, dim, steps, jobs;
};

void add_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON run configuration");
  cmd->add_option("--scenario", o.scenario, "terzaghi | layered | mandel | barry_mercer | custom");
  cmd->add_option("--scheme", o.scheme, "p1p1 | mini | taylor_hood");
  cmd->add_option("--epsilon", o.epsilon, "stabilization parameter (0 disables it)");
  cmd->add_option("--stab-weight", o.stab_weight, "plain | youngs");
  cmd->add_option("--initial-condition", o.initial_condition, "zero_div | stabilized_stokes");
  cmd->add_option("--nx", o.nx, "cells along x (1D: number of cells)");
  cmd->add_option("--ny", o.ny, "cells along y");
  cmd->add_option("--dim", o.dim, "dimension of the layered scenario");
  cmd->add_option("--tau", o.tau, "time step in scenario time units");
  cmd->add_option("--steps", o.steps, "number of time steps");
  cmd->add_option("--t-final", o.t_final, "final time in scenario time units");
  cmd->add_option("-o,--output-dir", o.output_dir, "directory for output files");
  cmd->add_option("-j,--jobs", o.jobs, "parallel ladder rows (capped by BIOT_FEM_THREADS)");
}

json merged_config(const Overrides& o) {
  json j = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw biot::ConfigError("config", "cannot open " + o.config_path);
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw biot::ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw biot::ConfigError("config", "top level must be an object");
  }
  auto set = [&j](const std::string& key, const auto& v) {
    if (v) j[key] = *v;
  };
  auto set_in = [&j](const std::string& obj, const std::string& key, const auto& v) {
    if (!v) return;
    if (!j.contains(obj)) j[obj] = json::object();
    if (!j[obj].is_object()) throw biot::ConfigError(obj, "expected an object");
    j[obj][key] = *v;
  };
  set("scenario", o.scenario);
  set("scheme", o.scheme);
  set("epsilon", o.epsilon);
  set("stab_weight", o.stab_weight);
  set("initial_condition", o.initial_condition);
  set("output_dir", o.output_dir);
  set("jobs", o.jobs);
  set_in("mesh", "nx", o.nx);
  set_in("mesh", "ny", o.ny);
  set_in("mesh", "dim", o.dim);
  set_in("time", "tau", o.tau);
  set_in("time", "n_steps", o.steps);
  set_in("time", "t_final", o.t_final);
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite element solver for quasi-static Biot consolidation"};
  app.require_subcommand(1);

  Overrides o;
  CLI::App* solve = app.add_subcommand("solve", "run a scenario; writes pressure_profile.csv and report.json");
  CLI::App* conv = app.add_subcommand("convergence", "run a mesh/time-step ladder; writes convergence.csv");
  CLI::App* audit = app.add_subcommand("audit", "monotonicity audit of the pressure operator; writes audit.json");
  CLI::App* dump = app.add_subcommand("mesh-dump", "write the scenario mesh as CSV");
  for (CLI::App* c : {solve, conv, audit, dump}) add_options(c, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? biot::kExitOk : biot::kExitConfig;
  }

  biot::RunConfig cfg;
  try {
    cfg = biot::parse_run_config(merged_config(o));
  } catch (const biot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return biot::kExitConfig;
  }

  if (solve->parsed()) return biot::cmd_solve(cfg, std::cout, std::cerr);
  if (conv->parsed()) return biot::cmd_convergence(cfg, std::cout, std::cerr);
  if (audit->parsed()) return biot::cmd_audit(cfg, std::cout, std::cerr);
  return biot::cmd_mesh_dump(cfg, std::cout, std::cerr);
}
