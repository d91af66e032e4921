#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "biot/commands.hpp"

using namespace biot;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("biot_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string config_error_field(const json& j) {
  try {
    parse_run_config(j);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST(RunConfig, Defaults) {
  const RunConfig c = parse_run_config(json::object());
  EXPECT_EQ(c.scenario, ScenarioKind::Terzaghi);
  EXPECT_EQ(c.scheme, SchemeKind::P1P1);
  EXPECT_FALSE(c.epsilon.has_value());
  EXPECT_EQ(c.initial_condition, InitialCondition::ZeroDiv);
  EXPECT_EQ(c.jobs, 1);
}

TEST(RunConfig, ParsesNestedFields) {
  const json j = json::parse(R"({
    "scenario": "mandel", "scheme": "mini", "epsilon": 0.2, "stab_weight": "plain",
    "initial_condition": "stabilized_stokes",
    "mesh": {"nx": 12, "ny": 6},
    "time": {"tau": 0.25, "t_final": 1.0},
    "material": {"young": 2e4, "poisson": 0.1, "permeability": 1e-5},
    "load": {"force": 2.0},
    "sampling_line": {"axis": "vertical", "index": 3},
    "ladder": [{"nx": 4, "n_steps": 2}],
    "output_dir": "out", "jobs": 3
  })");
  const RunConfig c = parse_run_config(j);
  EXPECT_EQ(c.scenario, ScenarioKind::Mandel);
  EXPECT_EQ(c.scheme, SchemeKind::MINI);
  EXPECT_DOUBLE_EQ(*c.epsilon, 0.2);
  EXPECT_EQ(*c.stab_weight, StabWeight::Plain);
  EXPECT_EQ(c.nx, 12);
  EXPECT_EQ(c.ny, 6);
  EXPECT_DOUBLE_EQ(*c.poisson, 0.1);
  EXPECT_EQ(c.line->axis, SamplingLineSpec::Axis::Vertical);
  ASSERT_EQ(c.ladder.size(), 1u);
  EXPECT_EQ(c.ladder[0].ny, 4);
  const TimeParams t = resolve_time(c, {1.0, 1});
  EXPECT_DOUBLE_EQ(t.tau, 0.25);
  EXPECT_EQ(t.n_steps, 4);
}

TEST(RunConfig, ReportsOffendingField) {
  EXPECT_EQ(config_error_field({{"scheme", "p2p1"}}), "scheme");
  EXPECT_EQ(config_error_field({{"colour", 1}}), "colour");
  EXPECT_EQ(config_error_field({{"mesh", {{"nx", 0}}}}), "mesh.nx");
  EXPECT_EQ(config_error_field({{"mesh", {{"depth", 2}}}}), "mesh.depth");
  EXPECT_EQ(config_error_field({{"epsilon", -0.1}}), "epsilon");
  EXPECT_EQ(config_error_field({{"time", {{"tau", 0.3}, {"t_final", 1.0}}}}), "time.t_final");
  EXPECT_EQ(config_error_field({{"material", {{"poisson", 0.5}}}}), "material.poisson");
  EXPECT_EQ(config_error_field({{"scenario", "mandel"}, {"scheme", "taylor_hood"}}), "scheme");
  EXPECT_EQ(config_error_field({{"scenario", "terzaghi"}, {"sampling_line", {{"index", 1}}}}), "sampling_line");
  EXPECT_EQ(config_error_field({{"scenario", "custom"}}), "custom");
  EXPECT_EQ(config_error_field({{"ladder", {{{"n_steps", 2}}}}}), "ladder[0].nx");
}

TEST(RunConfig, ResolveTimeCombinations) {
  RunConfig c;
  EXPECT_EQ(resolve_time(c, {0.5, 3}).n_steps, 3);
  c.t_final = 2.0;
  c.n_steps = 8;
  EXPECT_DOUBLE_EQ(resolve_time(c, {0.5, 3}).tau, 0.25);
  c.t_final.reset();
  c.tau = 0.1;
  const TimeParams t = resolve_time(c, {0.5, 3});
  EXPECT_DOUBLE_EQ(t.tau, 0.1);
  EXPECT_EQ(t.n_steps, 8);
}

TEST(Commands, SchemeResolutionPrefersConfiguredValues) {
  RunConfig c = parse_run_config({{"scenario", "mandel"}, {"mesh", {{"nx", 4}, {"ny", 4}}}});
  const Scenario s = build_scenario(c);
  SchemeConfig sc = resolve_scheme(c, s);
  EXPECT_DOUBLE_EQ(sc.epsilon, *s.recommended_epsilon);
  EXPECT_EQ(sc.stab_weight, s.recommended_weight);
  c.epsilon = 0.0;
  c.stab_weight = StabWeight::Plain;
  sc = resolve_scheme(c, s);
  EXPECT_DOUBLE_EQ(sc.epsilon, 0.0);
  EXPECT_EQ(sc.stab_weight, StabWeight::Plain);
  const RunConfig t = parse_run_config({{"scenario", "terzaghi"}, {"scheme", "taylor_hood"}});
  EXPECT_DOUBLE_EQ(resolve_scheme(t, build_scenario(t)).epsilon, 1.0 / 6.0);
}

TEST(Commands, ScenarioRejectsUnsupportedOverrides) {
  EXPECT_THROW(build_scenario(parse_run_config({{"scenario", "layered"}, {"material", {{"young", 2.0}}}})), ConfigError);
  EXPECT_THROW(build_scenario(parse_run_config({{"scenario", "terzaghi"}, {"load", {{"force", 2.0}}}})), ConfigError);
  EXPECT_THROW(build_scenario(parse_run_config({{"scenario", "mandel"}, {"mesh", {{"nx", 4}, {"ny", 4}}},
                                                {"sampling_line", {{"index", 9}}}})),
               ConfigError);
}

TEST(Commands, TimeUnitScalesBarryMercer) {
  const RunConfig c = parse_run_config({{"scenario", "barry_mercer"}, {"mesh", {{"nx", 4}, {"ny", 4}}}, {"time", {{"tau", 0.5}, {"n_steps", 2}}}});
  const Scenario s = build_scenario(c);
  EXPECT_NEAR(s.time.tau, 0.5 * s.time_unit, 1e-12 * s.time_unit);
  EXPECT_EQ(s.time.n_steps, 2);
}

TEST(Commands, SolveWritesProfileAndReport) {
  const fs::path dir = fresh_dir("solve");
  const RunConfig c = parse_run_config({{"scenario", "terzaghi"}, {"mesh", {{"nx", 16}}}, {"output_dir", dir.string()}});
  std::ostringstream out, err;
  ASSERT_EQ(cmd_solve(c, out, err), kExitOk) << err.str();
  const std::string csv = slurp(dir / "pressure_profile.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "coordinate,numeric,analytic");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 18);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  const json report = json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(report["scenario"], "terzaghi");
  EXPECT_EQ(report["monotonicity"]["oscillation_score"], 0);
  EXPECT_LE(report["max_relative_residual"].get<double>(), 1e-10);
}

TEST(Commands, UnstabilizedColumnOscillates) {
  const RunConfig c = parse_run_config({{"scenario", "terzaghi"}, {"epsilon", 0.0}, {"mesh", {{"nx", 32}}}});
  const SolveOutcome r = solve(c);
  EXPECT_GT(*r.monotonicity.oscillation_score, 0);
  EXPECT_GT(*r.monotonicity.restriction_margin, 0.0);
}

TEST(Commands, ConvergenceCsvIsDeterministic) {
  const json base = {{"scenario", "mandel"}, {"ladder", {{{"nx", 4}, {"n_steps", 1}}, {{"nx", 8}, {"n_steps", 2}}}}, {"jobs", 2}};
  std::string first;
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = fresh_dir("conv" + std::to_string(run));
    json j = base;
    j["output_dir"] = dir.string();
    std::ostringstream out, err;
    ASSERT_EQ(cmd_convergence(parse_run_config(j), out, err), kExitOk) << err.str();
    const std::string csv = slurp(dir / "convergence.csv");
    if (run == 0) {
      first = csv;
      EXPECT_EQ(csv.substr(0, csv.find('\n')), "nx,ny,n_steps,tau,energy_error,l2_error,rate,status");
    } else {
      EXPECT_EQ(csv, first);
    }
  }
}

TEST(Commands, SingleRowLadderHasNoRate) {
  const RunConfig c = parse_run_config({{"scenario", "mandel"}, {"ladder", {{{"nx", 4}, {"n_steps", 1}}}}});
  const auto rows = convergence_table(c);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].rate.has_value());
  EXPECT_TRUE(rows[0].error.empty());
  EXPECT_GT(*rows[0].energy_error, 0.0);
}

TEST(Commands, ConvergenceNeedsAnalyticScenario) {
  std::ostringstream out, err;
  const RunConfig c = parse_run_config({{"scenario", "layered"}, {"ladder", {{{"nx", 4}, {"n_steps", 1}}}}});
  EXPECT_EQ(cmd_convergence(c, out, err), kExitConfig);
  EXPECT_NE(err.str().find("scenario"), std::string::npos);
}

TEST(Commands, AuditReportsRestriction) {
  const RunConfig c = parse_run_config({{"scenario", "terzaghi"}, {"epsilon", 0.0}, {"mesh", {{"nx", 500}}}});
  const json j = audit(c);
  EXPECT_EQ(j["matrix"], "schur_pressure");
  EXPECT_EQ(j["restriction"]["required_divisions_uniform"], 500);
  EXPECT_EQ(j["monotonicity"]["positive_offdiag_count"], 0);
  const json m = audit(parse_run_config({{"scenario", "mandel"}, {"mesh", {{"nx", 4}, {"ny", 4}}}}));
  EXPECT_EQ(m["matrix"], "pressure_block");
  EXPECT_TRUE(m["restriction"].is_null());
}

TEST(Commands, SchemeErrorMapsToConfigExit) {
  std::ostringstream out, err;
  const RunConfig c = parse_run_config({{"scenario", "terzaghi"}, {"epsilon", 0.0}, {"initial_condition", "stabilized_stokes"},
                                        {"output_dir", fresh_dir("scheme").string()}});
  EXPECT_EQ(cmd_solve(c, out, err), kExitConfig);
}

TEST(Commands, MeshDumpWritesFiles) {
  const fs::path dir = fresh_dir("mesh");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_mesh_dump(parse_run_config({{"scenario", "mandel"}, {"mesh", {{"nx", 3}, {"ny", 2}}}, {"output_dir", dir.string()}}), out, err),
            kExitOk);
  EXPECT_TRUE(fs::exists(dir / "mesh_vertices.csv"));
  EXPECT_TRUE(fs::exists(dir / "mesh_triangles.csv"));
}

TEST(Commands, WorkerLimitHonoursEnvironment) {
  ::setenv("BIOT_FEM_THREADS", "2", 1);
  EXPECT_EQ(worker_limit(8), 2);
  EXPECT_EQ(worker_limit(1), 1);
  ::setenv("BIOT_FEM_THREADS", "junk", 1);
  EXPECT_EQ(worker_limit(8), 8);
  ::unsetenv("BIOT_FEM_THREADS");
  EXPECT_EQ(worker_limit(0), 1);
}
