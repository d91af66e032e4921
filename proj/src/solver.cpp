#include "biot/solver.hpp"

#include <chrono>

namespace biot {

std::string to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::P1P1: return "p1p1";
    case SchemeKind::MINI: return "mini";
    case SchemeKind::TaylorHood1D: return "taylor_hood";
  }
  return "unknown";
}

std::string to_string(InitialCondition ic) {
  return ic == InitialCondition::StabilizedStokes ? "stabilized_stokes" : "zero_div";
}

std::string to_string(StabWeight w) { return w == StabWeight::Plain ? "plain" : "youngs"; }

double default_epsilon(SchemeKind kind) { return kind == SchemeKind::P1P1 ? 0.25 : 1.0 / 6.0; }

DisplacementSpace displacement_space(SchemeKind kind, int dim) {
  switch (kind) {
    case SchemeKind::P1P1: return DisplacementSpace::P1;
    case SchemeKind::MINI: return DisplacementSpace::P1PlusBubble;
    case SchemeKind::TaylorHood1D:
      if (dim != 1) throw SchemeError("the Taylor-Hood scheme is only available on 1D meshes");
      return DisplacementSpace::P2_1D;
  }
  throw SchemeError("unknown scheme");
}

void validate_scheme(const SimplexMesh& mesh, const SchemeConfig& cfg) {
  if (!(cfg.epsilon >= 0.0)) throw SchemeError("epsilon must be non-negative");
  if (cfg.kind == SchemeKind::TaylorHood1D && mesh.dim() != 1) {
    throw SchemeError("the Taylor-Hood scheme is only available on 1D meshes");
  }
  if (cfg.kind == SchemeKind::P1P1 && cfg.epsilon == 0.0 && cfg.initial_condition == InitialCondition::StabilizedStokes) {
    throw SchemeError("stabilized_stokes initial data needs epsilon > 0 for the P1-P1 pair (the Stokes system is singular)");
  }
}

LoadVectors LoadSchedule::evaluate(const BiotSystem& system, double t) const {
  LoadVectors lv;
  const double ts = traction_scale ? traction_scale(t) : 1.0;
  lv.f = ts * system.boundary_load;
  lv.s = Eigen::VectorXd::Zero(system.dofs.n_pressure_full());
  if (!point_sources.empty()) {
    const double rate = source_rate ? source_rate(t) : 0.0;
    for (const auto& [vertex, weight] : point_sources) lv.s[vertex] += weight * rate;
  }
  return lv;
}

SparseMatrix step_matrix(const BiotSystem& system, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("time step tau must be positive");
  const SparseMatrix lower = tau * system.reduced.Ap + system.reduced.C;
  return saddle_point_matrix(system.reduced.A, system.reduced.B, lower);
}

Eigen::VectorXd step_rhs(const BiotSystem& system, const State& previous, const LoadVectors& loads, double tau) {
  const auto& r = system.reduced;
  const auto& dm = system.dofs;
  if (previous.U.size() != dm.n_disp || previous.P.size() != dm.n_pressure) throw ShapeError("state does not match the DOF map");
  Eigen::VectorXd rhs(dm.n_disp + dm.n_pressure);
  rhs.head(dm.n_disp) = dm.restrict_displacement(loads.f);
  rhs.tail(dm.n_pressure) = r.B * previous.U - r.C * previous.P - tau * dm.restrict_pressure(loads.s);
  return rhs;
}

namespace {

State split(const BiotSystem& system, const Eigen::VectorXd& x) {
  return {x.head(system.dofs.n_disp), x.tail(system.dofs.n_pressure)};
}

StepRecord record(const BiotSystem& system, int index, double time, const State& s) {
  StepRecord rec;
  rec.index = index;
  rec.time = time;
  rec.displacement = system.dofs.expand_displacement(s.U);
  rec.pressure = system.dofs.expand_pressure(s.P);
  rec.reduced = s;
  return rec;
}

}  // namespace

TimeStepper::TimeStepper(const BiotSystem& system, double tau)
    : system_(system), tau_(tau), solver_(step_matrix(system, tau)) {}

State TimeStepper::step(const State& previous, const LoadVectors& loads) const {
  return split(system_, solver_.solve(step_rhs(system_, previous, loads, tau_)));
}

State step(const BiotSystem& system, const State& previous, const LoadVectors& loads, double tau) {
  return TimeStepper(system, tau).step(previous, loads);
}

State zero_state(const BiotSystem& system) {
  return {Eigen::VectorXd::Zero(system.dofs.n_disp), Eigen::VectorXd::Zero(system.dofs.n_pressure)};
}

State initial_state(const BiotSystem& system, const SchemeConfig& cfg, const LoadVectors& f0) {
  if (cfg.initial_condition == InitialCondition::ZeroDiv) return zero_state(system);
  if (cfg.kind == SchemeKind::P1P1 && system.epsilon == 0.0) {
    throw SchemeError("stabilized_stokes initial data needs epsilon > 0 for the P1-P1 pair (the Stokes system is singular)");
  }
  const auto& dm = system.dofs;
  const Eigen::VectorXd fr = dm.restrict_displacement(f0.f);
  if (fr.isZero(0.0)) return zero_state(system);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dm.n_disp + dm.n_pressure);
  rhs.head(dm.n_disp) = fr;
  const SparseMatrix m = saddle_point_matrix(system.reduced.A, system.reduced.B, system.reduced.C);
  return split(system, solve_symmetric_indefinite(m, rhs));
}

BiotSystem assemble_for_scheme(std::shared_ptr<const SimplexMesh> mesh, const MaterialField& material, const BoundarySpec& bc,
                               const SchemeConfig& cfg) {
  validate_scheme(*mesh, cfg);
  return assemble_system(mesh, material, bc, displacement_space(cfg.kind, mesh->dim()), cfg.epsilon, cfg.stab_weight);
}

SolutionHistory run(const BiotSystem& system, const SchemeConfig& cfg, const TimeParams& time, const LoadSchedule& loads,
                    const std::function<void(const StepRecord&)>& observer) {
  if (!(time.tau > 0.0)) throw std::invalid_argument("time step tau must be positive");
  if (time.n_steps < 0) throw std::invalid_argument("n_steps must be non-negative");
  validate_scheme(*system.mesh, cfg);

  using clock = std::chrono::steady_clock;
  SolutionHistory hist;
  auto t0 = clock::now();
  State state;
  try {
    state = initial_state(system, cfg, loads.evaluate(system, 0.0));
  } catch (const std::exception& e) {
    throw StepError(std::string("initial state: ") + e.what(), 0);
  }
  hist.steps.push_back(record(system, 0, 0.0, state));
  hist.steps.back().wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  if (observer) observer(hist.steps.back());
  if (time.n_steps == 0) return hist;

  std::unique_ptr<TimeStepper> stepper;
  try {
    stepper = std::make_unique<TimeStepper>(system, time.tau);
  } catch (const std::exception& e) {
    throw StepError(std::string("step 1: ") + e.what(), 1);
  }
  for (int m = 1; m <= time.n_steps; ++m) {
    t0 = clock::now();
    const double t = m * time.tau;
    try {
      state = stepper->step(state, loads.evaluate(system, t));
    } catch (const std::exception& e) {
      throw StepError("step " + std::to_string(m) + ": " + e.what(), m);
    }
    StepRecord rec = record(system, m, t, state);
    rec.residual = stepper->last_residual();
    rec.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    hist.steps.push_back(std::move(rec));
    if (observer) observer(hist.steps.back());
  }
  return hist;
}

SolutionHistory run(std::shared_ptr<const SimplexMesh> mesh, const MaterialField& material, const BoundarySpec& bc,
                    const SchemeConfig& cfg, const TimeParams& time, const LoadSchedule& loads) {
  const BiotSystem system = assemble_for_scheme(std::move(mesh), material, bc, cfg);
  return run(system, cfg, time, loads);
}

SparseMatrix displacement_schur(const BiotSystem& system) {
  if (system.mesh->dim() != 1) throw std::invalid_argument("the displacement Schur complement is only formed on 1D meshes");
  const auto& r = system.reduced;
  const SymmetricSolver a(r.A);
  const SparseMatrix bt = r.B.transpose();
  const long np = r.B.rows();
  Eigen::MatrixXd s(np, np);
  for (long j = 0; j < np; ++j) {
    const Eigen::VectorXd col = bt * Eigen::VectorXd::Unit(np, j);
    s.col(j) = r.B * a.solve(col);
  }
  s = 0.5 * (s + s.transpose());
  const double drop = 1e-15 * s.cwiseAbs().maxCoeff();
  Triplets t;
  for (long i = 0; i < np; ++i) {
    for (long j = 0; j < np; ++j) {
      if (std::abs(s(i, j)) > drop) t.emplace_back(i, j, s(i, j));
    }
  }
  return from_triplets(np, np, t);
}

SparseMatrix schur_pressure_matrix(const BiotSystem& system, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("time step tau must be positive");
  SparseMatrix m = displacement_schur(system) + system.reduced.C + tau * system.reduced.Ap;
  m.makeCompressed();
  return m;
}

Eigen::VectorXd reduced_pressure_update(const BiotSystem& system, const Eigen::VectorXd& p_prev, const LoadVectors& loads_prev,
                                        const LoadVectors& loads, double tau) {
  const auto& r = system.reduced;
  const auto& dm = system.dofs;
  const SparseMatrix s = displacement_schur(system);
  const SparseMatrix lhs = s + r.C + tau * r.Ap;
  const SymmetricSolver a(r.A);
  const Eigen::VectorXd df = dm.restrict_displacement(loads.f - loads_prev.f);
  const Eigen::VectorXd rhs = (s + r.C) * p_prev + r.B * a.solve(df) + tau * dm.restrict_pressure(loads.s);
  return solve_symmetric_indefinite(lhs, rhs);
}

}  // namespace biot
