#include "biot/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "biot/csv.hpp"

namespace biot {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void reject_material(const RunConfig& cfg, bool young, bool poisson, bool permeability) {
  const std::string s = to_string(cfg.scenario);
  if (cfg.young && !young) throw ConfigError("material.young", "not adjustable for scenario " + s);
  if (cfg.poisson && !poisson) throw ConfigError("material.poisson", "not adjustable for scenario " + s);
  if (cfg.permeability && !permeability) throw ConfigError("material.permeability", "not adjustable for scenario " + s);
}

int nearest_index(double x, double length, int n) {
  const long i = std::lround(x / length * n);
  return static_cast<int>(std::clamp<long>(i, 0, n));
}

Scenario build_custom(const RunConfig& cfg, int nx, int ny) {
  const CustomSpec& c = *cfg.custom;
  Scenario s;
  s.name = "custom";
  const double young = cfg.young.value_or(1.0);
  const double nu = cfg.poisson.value_or(0.0);
  const double k = cfg.permeability.value_or(1.0);
  s.bc = c.bc;
  if (c.dim == 1) {
    auto mesh = std::make_shared<IntervalMesh>(build_interval_mesh(nx, c.width));
    s.material = MaterialField::uniform(mesh->num_cells(), young, nu, k);
    for (const auto& p : c.sources) s.loads.point_sources.push_back({nearest_index(p.x, c.width, nx), p.rate});
    s.line = whole_interval(*mesh);
    s.mesh = std::move(mesh);
  } else {
    auto mesh = std::make_shared<TriMesh>(build_structured_tri_mesh(nx, ny, c.width, c.height));
    s.material = MaterialField::uniform(mesh->num_cells(), young, nu, k);
    for (const auto& p : c.sources) {
      const int v = mesh->grid_vertex(nearest_index(p.x, c.width, nx), nearest_index(p.y, c.height, ny));
      s.loads.point_sources.push_back({v, p.rate});
    }
    s.line = horizontal_line(*mesh, ny / 2);
    s.mesh = std::move(mesh);
  }
  if (!s.loads.point_sources.empty()) s.loads.source_rate = [](double) { return 1.0; };
  s.time = {1.0, 1};
  return s;
}

}  // namespace

Scenario build_scenario(const RunConfig& cfg, int nx, int ny) {
  Scenario s;
  switch (cfg.scenario) {
    case ScenarioKind::Terzaghi:
      reject_material(cfg, true, false, true);
      if (cfg.force) throw ConfigError("load.force", "only used by the mandel scenario");
      s = build_terzaghi_scenario(nx, 1.0, cfg.young.value_or(1.0), cfg.permeability.value_or(1.0), cfg.sigma0.value_or(-1.0));
      break;
    case ScenarioKind::Layered:
      reject_material(cfg, false, false, false);
      if (cfg.sigma0 || cfg.force) throw ConfigError("load", "the layered scenario has a fixed unit load");
      s = build_layered_scenario(nx, cfg.dim);
      break;
    case ScenarioKind::Mandel:
      reject_material(cfg, true, true, true);
      if (cfg.sigma0) throw ConfigError("load.sigma0", "only used by the terzaghi scenario");
      s = build_mandel_scenario(nx, ny, cfg.young.value_or(1e4), cfg.poisson.value_or(0.0), cfg.permeability.value_or(1e-6),
                                cfg.force.value_or(1.0));
      break;
    case ScenarioKind::BarryMercer:
      reject_material(cfg, true, true, true);
      if (cfg.sigma0 || cfg.force) throw ConfigError("load", "the barry_mercer scenario is driven by its point source");
      s = build_barry_mercer_scenario(nx, ny, cfg.permeability.value_or(1e-2), cfg.young.value_or(1e5), cfg.poisson.value_or(0.1));
      break;
    case ScenarioKind::Custom:
      if (cfg.sigma0 || cfg.force) throw ConfigError("load", "custom loads are given per side");
      s = build_custom(cfg, nx, ny);
      break;
  }

  if (cfg.line) {
    const auto* tri = dynamic_cast<const TriMesh*>(s.mesh.get());
    if (!tri) throw ConfigError("sampling_line", "only 2D scenarios take a sampling line");
    const int limit = cfg.line->axis == SamplingLineSpec::Axis::Horizontal ? tri->ny() : tri->nx();
    if (cfg.line->index > limit) throw ConfigError("sampling_line.index", "outside the grid (max " + std::to_string(limit) + ")");
    s.line = cfg.line->axis == SamplingLineSpec::Axis::Horizontal ? horizontal_line(*tri, cfg.line->index)
                                                                   : vertical_line(*tri, cfg.line->index);
    // The analytic reference count only holds on the scenario's own line.
    if (cfg.scenario != ScenarioKind::Mandel) s.reference_segments = 0;
  }

  const TimeParams user = resolve_time(cfg, {s.time.tau / s.time_unit, s.time.n_steps});
  s.time = {user.tau * s.time_unit, user.n_steps};
  return s;
}

Scenario build_scenario(const RunConfig& cfg) { return build_scenario(cfg, cfg.nx, cfg.ny); }

SchemeConfig resolve_scheme(const RunConfig& cfg, const Scenario& scenario) {
  SchemeConfig sc;
  sc.kind = cfg.scheme;
  sc.initial_condition = cfg.initial_condition;
  sc.stab_weight = cfg.stab_weight.value_or(scenario.recommended_weight);
  if (cfg.epsilon) {
    sc.epsilon = *cfg.epsilon;
  } else if (scenario.mesh->dim() == 2 && scenario.recommended_epsilon) {
    sc.epsilon = *scenario.recommended_epsilon;
  } else {
    sc.epsilon = default_epsilon(cfg.scheme);
  }
  return sc;
}

ErrorNorms physical_error_norms(const Scenario& scenario, const Eigen::VectorXd& pressure, double t, double tau) {
  if (!scenario.analytic) throw UnsupportedError("scenario " + scenario.name + " has no analytic pressure");
  const auto& exact = scenario.analytic;
  ErrorNorms n = error_norms(pressure, [&](double x, double y) { return exact(x, y, t); }, *scenario.mesh, scenario.material, tau);
  const double f = std::sqrt(static_cast<double>(scenario.symmetry_copies));
  n.l2_pressure *= f;
  n.energy_pressure *= f;
  return n;
}

namespace {

bool has_restriction(const Scenario& s, SchemeKind kind) { return s.mesh->dim() == 1 && kind != SchemeKind::MINI; }

SparseMatrix audited_matrix(const BiotSystem& system, double tau) {
  if (system.mesh->dim() == 1) return schur_pressure_matrix(system, tau);
  SparseMatrix m = tau * system.reduced.Ap + system.reduced.C;
  m.makeCompressed();
  return m;
}

json describe(const Scenario& s, const SchemeConfig& sc) {
  json j;
  j["scenario"] = s.name;
  j["scheme"] = to_string(sc.kind);
  j["epsilon"] = sc.epsilon;
  j["stab_weight"] = to_string(sc.stab_weight);
  j["initial_condition"] = to_string(sc.initial_condition);
  json mesh{{"dim", s.mesh->dim()}, {"vertices", s.mesh->num_vertices()}, {"cells", s.mesh->num_cells()}};
  if (const auto* tri = dynamic_cast<const TriMesh*>(s.mesh.get())) {
    mesh["nx"] = tri->nx();
    mesh["ny"] = tri->ny();
  }
  j["mesh"] = mesh;
  j["time"] = {{"tau", s.time.tau / s.time_unit},
               {"n_steps", s.time.n_steps},
               {"t_final", s.time.t_final() / s.time_unit},
               {"time_unit", s.time_unit}};
  j["sampling_line"] = s.line.description;
  j["warnings"] = s.warnings;
  return j;
}

}  // namespace

SolveOutcome solve(const RunConfig& cfg) {
  using clock = std::chrono::steady_clock;
  SolveOutcome out;
  out.scenario = build_scenario(cfg);
  const Scenario& s = out.scenario;
  out.scheme = resolve_scheme(cfg, s);
  validate_scheme(*s.mesh, out.scheme);

  const auto t0 = clock::now();
  const BiotSystem system = assemble_for_scheme(s.mesh, s.material, s.bc, out.scheme);
  const double assembly_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  out.history = run(system, out.scheme, s.time, s.loads);
  const StepRecord& last = out.history.final_step();

  out.profile = sample_line(s.line, last.pressure);
  out.analytic_profile.assign(out.profile.size(), std::nullopt);
  if (s.analytic) {
    for (std::size_t i = 0; i < s.line.vertices.size(); ++i) {
      const auto v = s.mesh->vertex(static_cast<std::size_t>(s.line.vertices[i]));
      out.analytic_profile[i] = s.analytic(v[0], s.mesh->dim() == 2 ? v[1] : 0.0, last.time);
    }
  }

  out.monotonicity = m_matrix_check(audited_matrix(system, s.time.tau));
  if (has_restriction(s, out.scheme.kind)) {
    out.monotonicity.restriction_margin = restriction_margin(*s.mesh, s.material, out.scheme.kind, s.time.tau);
  }
  out.monotonicity.oscillation_score = oscillation_score(out.profile, s.reference_segments);
  if (s.bounds) out.monotonicity.max_overshoot = max_overshoot(out.profile, s.bounds->first, s.bounds->second);

  if (s.analytic) {
    out.norms = physical_error_norms(s, last.pressure, last.time, s.time.tau);
    out.norms->tau_h_norm = tau_h_norm(system, last.reduced.U, last.reduced.P, s.time.tau);
  }

  json& r = out.report;
  r = describe(s, out.scheme);
  r["monotonicity"] = to_json(out.monotonicity);
  r["norms"] = out.norms ? to_json(*out.norms) : json(nullptr);
  r["symmetry_copies"] = s.symmetry_copies;
  double step_seconds = 0.0;
  double max_residual = 0.0;
  for (const auto& st : out.history.steps) {
    step_seconds += st.wall_seconds;
    max_residual = std::max(max_residual, st.residual);
  }
  r["timings"] = {{"assembly_seconds", assembly_seconds}, {"stepping_seconds", step_seconds}};
  r["max_relative_residual"] = max_residual;
  return out;
}

int worker_limit(int jobs) {
  int limit = std::max(1, jobs);
  if (const char* env = std::getenv("BIOT_FEM_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) limit = std::min<long>(limit, cap);
  }
  return limit;
}

std::vector<ConvergenceRow> convergence_table(const RunConfig& cfg) {
  if (cfg.ladder.empty()) throw ConfigError("ladder", "required for the convergence command");
  {
    // Fail fast on configuration problems before spawning work.
    const Scenario probe = build_scenario(cfg, cfg.ladder.front().nx, cfg.ladder.front().ny);
    if (!probe.analytic) throw ConfigError("scenario", "has no analytic pressure to measure errors against");
    validate_scheme(*probe.mesh, resolve_scheme(cfg, probe));
  }

  std::vector<ConvergenceRow> rows(cfg.ladder.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < rows.size(); k = next++) {
      ConvergenceRow& row = rows[k];
      row.size = cfg.ladder[k];
      try {
        RunConfig rc = cfg;
        const double t_final = cfg.t_final.value_or(build_scenario(cfg, row.size.nx, row.size.ny).time.t_final());
        rc.t_final = t_final;
        rc.tau.reset();
        rc.n_steps = row.size.n_steps;
        const Scenario s = build_scenario(rc, row.size.nx, row.size.ny);
        row.tau = s.time.tau / s.time_unit;
        const SchemeConfig sc = resolve_scheme(rc, s);
        const SolutionHistory h = run(s.mesh, s.material, s.bc, sc, s.time, s.loads);
        const ErrorNorms n = physical_error_norms(s, h.final_step().pressure, h.final_step().time, s.time.tau);
        row.energy_error = n.energy_pressure;
        row.l2_error = n.l2_pressure;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const int n_threads = std::min<int>(worker_limit(cfg.jobs), static_cast<int>(rows.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto& a = rows[k - 1].energy_error;
    const auto& b = rows[k].energy_error;
    if (a && b && *a > 0.0 && *b > 0.0) rows[k].rate = std::log2(*a / *b);
  }
  return rows;
}

json audit(const RunConfig& cfg) {
  const Scenario s = build_scenario(cfg);
  const SchemeConfig sc = resolve_scheme(cfg, s);
  validate_scheme(*s.mesh, sc);
  const BiotSystem system = assemble_for_scheme(s.mesh, s.material, s.bc, sc);
  MonotonicityReport rep = m_matrix_check(audited_matrix(system, s.time.tau));
  json j = describe(s, sc);
  j["matrix"] = s.mesh->dim() == 1 ? "schur_pressure" : "pressure_block";
  if (has_restriction(s, sc.kind)) {
    rep.restriction_margin = restriction_margin(*s.mesh, s.material, sc.kind, s.time.tau);
    const RestrictionThreshold th = restriction_threshold(*s.mesh, s.material, sc.kind);
    json r{{"divisor", th.divisor}, {"tau_min", th.tau_min}, {"margin", *rep.restriction_margin}};
    const auto* line = dynamic_cast<const IntervalMesh*>(s.mesh.get());
    const double ekt = s.material.constrained_modulus(0) * s.material.permeability(0) * s.time.tau;
    r["required_divisions_uniform"] = ekt > 0.0 ? json(required_divisions(line->length(), ekt, sc.kind)) : json(nullptr);
    j["restriction"] = r;
  } else {
    j["restriction"] = nullptr;
    j["restriction_note"] = s.mesh->dim() == 1 ? "no restriction is derived for the MINI scheme"
                                               : "no monotonicity restriction is derived in 2D; sign violations only";
  }
  j["monotonicity"] = to_json(rep);
  return j;
}

namespace {

fs::path output_dir(const RunConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("output_dir", "cannot create " + cfg.output_dir);
  return dir;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("output_dir", "cannot write " + path.string());
  f << j.dump(2) << '\n';
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StepError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const fs::path dir = output_dir(cfg);
    const SolveOutcome res = solve(cfg);
    {
      CsvWriter csv((dir / "pressure_profile.csv").string());
      csv.header({"coordinate", "numeric", "analytic"});
      for (std::size_t i = 0; i < res.profile.size(); ++i) {
        csv.row(std::vector<std::optional<double>>{res.scenario.line.coordinate[i], res.profile[i], res.analytic_profile[i]});
      }
    }
    write_json(dir / "report.json", res.report);
    for (const auto& w : res.scenario.warnings) err << "warning: " << w << '\n';
    out << res.scenario.name << " " << to_string(res.scheme.kind) << " eps=" << res.scheme.epsilon
        << " oscillation_score=" << *res.monotonicity.oscillation_score;
    if (res.norms) out << " energy_error=" << res.norms->energy_pressure;
    out << '\n';
    return kExitOk;
  });
}

int cmd_convergence(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const fs::path dir = output_dir(cfg);
    const auto rows = convergence_table(cfg);
    CsvWriter csv((dir / "convergence.csv").string());
    csv.header({"nx", "ny", "n_steps", "tau", "energy_error", "l2_error", "rate", "status"});
    bool failed = false;
    for (const auto& r : rows) {
      auto opt = [](const std::optional<double>& v) { return v ? CsvWriter::format(*v) : std::string{}; };
      csv.text_row({std::to_string(r.size.nx), std::to_string(r.size.ny), std::to_string(r.size.n_steps), CsvWriter::format(r.tau),
                    opt(r.energy_error), opt(r.l2_error), opt(r.rate), r.error.empty() ? "ok" : "failed"});
      out << r.size.nx << "x" << r.size.ny << "x" << r.size.n_steps << "  ";
      if (r.error.empty()) {
        out << "energy " << *r.energy_error;
        if (r.rate) out << "  rate " << *r.rate;
      } else {
        out << "failed: " << r.error;
        failed = true;
      }
      out << '\n';
    }
    return failed ? kExitSolver : kExitOk;
  });
}

int cmd_audit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const fs::path dir = output_dir(cfg);
    const json j = audit(cfg);
    write_json(dir / "audit.json", j);
    out << j.dump(2) << '\n';
    return kExitOk;
  });
}

int cmd_mesh_dump(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const fs::path dir = output_dir(cfg);
    const Scenario s = build_scenario(cfg);
    const std::string prefix = (dir / "mesh_").string();
    write_mesh_csv(*s.mesh, prefix);
    out << "wrote " << prefix << "vertices.csv and " << prefix << (s.mesh->dim() == 1 ? "cells.csv" : "triangles.csv") << '\n';
    return kExitOk;
  });
}

}  // namespace biot
