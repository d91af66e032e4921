#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "biot/assembly.hpp"
#include "biot/linalg.hpp"

namespace biot {

enum class SchemeKind { P1P1, MINI, TaylorHood1D };
enum class InitialCondition { StabilizedStokes, ZeroDiv };

std::string to_string(SchemeKind k);
std::string to_string(InitialCondition ic);
std::string to_string(StabWeight w);

/// Default epsilon: 1/4 for P1-P1, 1/6 for bubble-enriched pairs.
double default_epsilon(SchemeKind kind);
DisplacementSpace displacement_space(SchemeKind kind, int dim);

struct SchemeConfig {
  SchemeKind kind = SchemeKind::P1P1;
  double epsilon = 0.0;
  StabWeight stab_weight = StabWeight::Plain;
  InitialCondition initial_condition = InitialCondition::ZeroDiv;
};

struct TimeParams {
  double tau = 1.0;
  int n_steps = 1;
  double t_final() const { return tau * n_steps; }
};

/// Loads in full numbering: displacement load f and pressure source s
/// (positive s injects fluid).
struct LoadVectors {
  Eigen::VectorXd f;
  Eigen::VectorXd s;
};

/// Time dependence of the loads. The boundary load of the system is scaled
/// by `traction_scale(t)`; point sources are scaled by `source_rate(t)`.
struct LoadSchedule {
  std::function<double(double)> traction_scale;
  std::vector<std::pair<int, double>> point_sources;
  std::function<double(double)> source_rate;

  LoadVectors evaluate(const BiotSystem& system, double t) const;
};

struct State {
  Eigen::VectorXd U;  ///< reduced displacement
  Eigen::VectorXd P;  ///< reduced pressure
};

struct StepRecord {
  int index = 0;
  double time = 0.0;
  Eigen::VectorXd displacement;  ///< full numbering, bubbles included
  Eigen::VectorXd pressure;      ///< full numbering
  State reduced;
  double wall_seconds = 0.0;
  double residual = 0.0;
};

struct SolutionHistory {
  std::vector<StepRecord> steps;
  const StepRecord& final_step() const { return steps.back(); }
};

class StepError : public std::runtime_error {
 public:
  StepError(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

class SchemeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// [[A, B^T], [B, -(tau Ap + C)]] on reduced DOFs.
SparseMatrix step_matrix(const BiotSystem& system, double tau);

/// Right-hand side (f^m, B U^{m-1} - C P^{m-1} - tau s^m) on reduced DOFs.
Eigen::VectorXd step_rhs(const BiotSystem& system, const State& previous, const LoadVectors& loads, double tau);

/// Implicit Euler stepper; the step matrix is factored once.
class TimeStepper {
 public:
  TimeStepper(const BiotSystem& system, double tau);
  State step(const State& previous, const LoadVectors& loads) const;
  double last_residual() const { return solver_.last_residual(); }

 private:
  const BiotSystem& system_;
  double tau_;
  SymmetricSolver solver_;
};

/// One implicit Euler step with a fresh factorization.
State step(const BiotSystem& system, const State& previous, const LoadVectors& loads, double tau);

State zero_state(const BiotSystem& system);

/// Initial data. StabilizedStokes solves [[A, B^T], [B, -C]] with load f0;
/// ZeroDiv returns zero displacement and pressure.
State initial_state(const BiotSystem& system, const SchemeConfig& cfg, const LoadVectors& f0);

BiotSystem assemble_for_scheme(std::shared_ptr<const SimplexMesh> mesh, const MaterialField& material, const BoundarySpec& bc,
                               const SchemeConfig& cfg);

void validate_scheme(const SimplexMesh& mesh, const SchemeConfig& cfg);

SolutionHistory run(const BiotSystem& system, const SchemeConfig& cfg, const TimeParams& time, const LoadSchedule& loads,
                    const std::function<void(const StepRecord&)>& observer = {});

SolutionHistory run(std::shared_ptr<const SimplexMesh> mesh, const MaterialField& material, const BoundarySpec& bc,
                    const SchemeConfig& cfg, const TimeParams& time, const LoadSchedule& loads);

/// Pressure-only matrix after eliminating displacement (and bubbles):
/// B A^{-1} B^T + C + tau Ap. 1D meshes only.
SparseMatrix schur_pressure_matrix(const BiotSystem& system, double tau);
/// The eliminated part B A^{-1} B^T alone (C_l, plus C_b with bubbles).
SparseMatrix displacement_schur(const BiotSystem& system);

/// Reduced pressure update
/// (S + C + tau Ap) P^m = (S + C) P^{m-1} + B A^{-1} (f^m - f^{m-1}) + tau s^m,
/// valid when the previous state satisfies the displacement equation.
Eigen::VectorXd reduced_pressure_update(const BiotSystem& system, const Eigen::VectorXd& p_prev, const LoadVectors& loads_prev,
                                        const LoadVectors& loads, double tau);

}  // namespace biot
