#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "biot/analysis.hpp"
#include "biot/benchmarks.hpp"
#include "biot/run_config.hpp"

namespace biot {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitSolver = 2;

/// Scenario for the configured problem on an nx x ny grid (nx cells in 1D),
/// with material, load, sampling line and time overrides applied.
Scenario build_scenario(const RunConfig& cfg, int nx, int ny);
Scenario build_scenario(const RunConfig& cfg);

/// Scheme settings: configured values first, then the scenario's tuned 2D
/// values, then the scheme defaults.
SchemeConfig resolve_scheme(const RunConfig& cfg, const Scenario& scenario);

/// Error norms over the physical domain (the computational domain mirrored
/// `symmetry_copies` times).
ErrorNorms physical_error_norms(const Scenario& scenario, const Eigen::VectorXd& pressure, double t, double tau);

struct SolveOutcome {
  Scenario scenario;
  SchemeConfig scheme;
  SolutionHistory history;
  std::vector<double> profile;
  std::vector<std::optional<double>> analytic_profile;
  MonotonicityReport monotonicity;
  std::optional<ErrorNorms> norms;
  nlohmann::json report;
};

/// Runs the configured scenario without writing files.
SolveOutcome solve(const RunConfig& cfg);

struct ConvergenceRow {
  LadderRow size;
  double tau = 0.0;
  std::optional<double> energy_error;
  std::optional<double> l2_error;
  std::optional<double> rate;  ///< log2 of the previous row's error over this one's
  std::string error;           ///< failure message, empty on success
};

/// Ladder rows run concurrently on up to worker_limit(cfg.jobs) threads.
std::vector<ConvergenceRow> convergence_table(const RunConfig& cfg);

/// Pressure operator audit: the Schur pressure matrix in 1D, the pressure
/// block tau Ap + C in 2D, plus restriction thresholds where derived.
nlohmann::json audit(const RunConfig& cfg);

/// `jobs` capped by the BIOT_FEM_THREADS environment variable when set.
int worker_limit(int jobs);

/// Subcommands; each returns a process exit code and reports to `out`/`err`.
int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_convergence(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_audit(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_mesh_dump(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace biot
