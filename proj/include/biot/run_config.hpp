#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "biot/assembly.hpp"
#include "biot/solver.hpp"

namespace biot {

/// Invalid configuration; `field()` is the dotted path of the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class ScenarioKind { Terzaghi, Layered, Mandel, BarryMercer, Custom };
std::string to_string(ScenarioKind k);

struct PointSourceSpec {
  double x = 0.0;
  double y = 0.0;
  double rate = 1.0;
};

/// User-defined box problem with uniform material and constant loads.
struct CustomSpec {
  int dim = 2;
  double width = 1.0;
  double height = 1.0;
  BoundarySpec bc;
  std::vector<PointSourceSpec> sources;
};

struct SamplingLineSpec {
  enum class Axis { Horizontal, Vertical } axis = Axis::Horizontal;
  int index = 0;
};

struct LadderRow {
  int nx = 0;
  int ny = 0;
  int n_steps = 0;
};

struct RunConfig {
  ScenarioKind scenario = ScenarioKind::Terzaghi;
  SchemeKind scheme = SchemeKind::P1P1;
  /// Empty means the scenario's tuned value (2D) or the scheme default.
  std::optional<double> epsilon;
  std::optional<StabWeight> stab_weight;
  InitialCondition initial_condition = InitialCondition::ZeroDiv;

  int dim = 2;  ///< layered scenario only
  int nx = 32;
  int ny = 32;

  /// Times are in the scenario's user-facing unit.
  std::optional<double> tau;
  std::optional<int> n_steps;
  std::optional<double> t_final;

  std::optional<double> young;
  std::optional<double> poisson;
  std::optional<double> permeability;
  std::optional<double> sigma0;  ///< terzaghi
  std::optional<double> force;   ///< mandel

  std::optional<SamplingLineSpec> line;
  std::optional<CustomSpec> custom;
  std::vector<LadderRow> ladder;

  std::string output_dir = ".";
  int jobs = 1;
};

/// Validates every field; unknown keys are rejected.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

/// Resolves tau and the step count from the configured pair, falling back
/// to `fallback` for anything not given.
TimeParams resolve_time(const RunConfig& cfg, const TimeParams& fallback);

}  // namespace biot
