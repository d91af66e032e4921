#include "biot/run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace biot {

using nlohmann::json;

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Terzaghi: return "terzaghi";
    case ScenarioKind::Layered: return "layered";
    case ScenarioKind::Mandel: return "mandel";
    case ScenarioKind::BarryMercer: return "barry_mercer";
    case ScenarioKind::Custom: return "custom";
  }
  return "unknown";
}

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Typed access to one JSON object that remembers which keys were read.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) {
    known_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const std::string& key) {
    known_.insert(key);
    return j_.at(key);
  }

  std::string field(const std::string& key) const { return join(path_, key); }

  template <class T>
  std::optional<T> get(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = j_.at(key);
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(field(key), "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, int>) {
      if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
      return v.get<int>();
    } else {
      if (!v.is_number()) throw ConfigError(field(key), "expected a number");
      const double d = v.get<double>();
      if (!std::isfinite(d)) throw ConfigError(field(key), "expected a finite number");
      return d;
    }
  }

  void reject_unknown() const {
    for (const auto& [key, value] : j_.items()) {
      if (!known_.count(key)) throw ConfigError(field(key), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

template <class E>
E pick(const std::string& field, const std::string& value, std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [name, e] : options) {
    if (value == name) return e;
    names += names.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError(field, "unknown value '" + value + "' (expected one of " + names + ")");
}

int positive_int(ObjectReader& r, const std::string& key, int fallback) {
  const auto v = r.get<int>(key);
  if (v && *v < 1) throw ConfigError(r.field(key), "must be at least 1");
  return v.value_or(fallback);
}

std::optional<double> positive_real(ObjectReader& r, const std::string& key) {
  const auto v = r.get<double>(key);
  if (v && !(*v > 0.0)) throw ConfigError(r.field(key), "must be positive");
  return v;
}

std::array<double, 2> pair_of_reals(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(field, "expected two numbers");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

SideCondition parse_side(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  SideCondition s;
  if (r.has("displacement")) {
    const json& v = r.raw("displacement");
    if (!v.is_array() || v.size() != 2) throw ConfigError(r.field("displacement"), "expected two component conditions");
    for (std::size_t c = 0; c < 2; ++c) {
      if (!v[c].is_string()) throw ConfigError(r.field("displacement"), "expected strings");
      s.displacement[c] = pick<DisplacementCondition>(r.field("displacement"), v[c].get<std::string>(),
                                                      {{"free", DisplacementCondition::Free},
                                                       {"fixed", DisplacementCondition::Fixed},
                                                       {"tied", DisplacementCondition::Tied}});
    }
  }
  if (auto p = r.get<std::string>("pressure")) {
    s.pressure = pick<PressureCondition>(r.field("pressure"), *p, {{"no_flux", PressureCondition::NoFlux}, {"drained", PressureCondition::Drained}});
  }
  if (r.has("traction")) s.traction = pair_of_reals(r.raw("traction"), r.field("traction"));
  if (r.has("tied_force")) s.tied_force = pair_of_reals(r.raw("tied_force"), r.field("tied_force"));
  r.reject_unknown();
  return s;
}

CustomSpec parse_custom(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  CustomSpec c;
  c.dim = r.get<int>("dim").value_or(2);
  if (c.dim != 1 && c.dim != 2) throw ConfigError(r.field("dim"), "must be 1 or 2");
  c.width = positive_real(r, "width").value_or(1.0);
  c.height = positive_real(r, "height").value_or(1.0);
  if (!r.has("sides")) throw ConfigError(r.field("sides"), "required for the custom scenario");
  {
    ObjectReader sides(r.raw("sides"), r.field("sides"));
    const std::initializer_list<std::pair<const char*, Side>> names = {
        {"bottom", Side::Bottom}, {"right", Side::Right}, {"top", Side::Top}, {"left", Side::Left}};
    for (const auto& [name, side] : names) {
      if (sides.has(name)) c.bc.set(side, parse_side(sides.raw(name), sides.field(name)));
    }
    sides.reject_unknown();
  }
  if (r.has("point_sources")) {
    const json& arr = r.raw("point_sources");
    if (!arr.is_array()) throw ConfigError(r.field("point_sources"), "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      ObjectReader ps(arr[i], r.field("point_sources") + "[" + std::to_string(i) + "]");
      PointSourceSpec s;
      s.x = ps.get<double>("x").value_or(0.0);
      s.y = ps.get<double>("y").value_or(0.0);
      s.rate = ps.get<double>("rate").value_or(1.0);
      ps.reject_unknown();
      c.sources.push_back(s);
    }
  }
  r.reject_unknown();
  return c;
}

bool is_one_dimensional(const RunConfig& c) {
  switch (c.scenario) {
    case ScenarioKind::Terzaghi: return true;
    case ScenarioKind::Layered: return c.dim == 1;
    case ScenarioKind::Custom: return c.custom && c.custom->dim == 1;
    default: return false;
  }
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  ObjectReader r(j, "");
  RunConfig c;
  if (auto s = r.get<std::string>("scenario")) {
    c.scenario = pick<ScenarioKind>("scenario", *s,
                                    {{"terzaghi", ScenarioKind::Terzaghi},
                                     {"layered", ScenarioKind::Layered},
                                     {"mandel", ScenarioKind::Mandel},
                                     {"barry_mercer", ScenarioKind::BarryMercer},
                                     {"custom", ScenarioKind::Custom}});
  }
  if (auto s = r.get<std::string>("scheme")) {
    c.scheme = pick<SchemeKind>("scheme", *s, {{"p1p1", SchemeKind::P1P1}, {"mini", SchemeKind::MINI}, {"taylor_hood", SchemeKind::TaylorHood1D}});
  }
  c.epsilon = r.get<double>("epsilon");
  if (c.epsilon && *c.epsilon < 0.0) throw ConfigError("epsilon", "must be non-negative");
  if (auto s = r.get<std::string>("stab_weight")) {
    c.stab_weight = pick<StabWeight>("stab_weight", *s, {{"plain", StabWeight::Plain}, {"youngs", StabWeight::Youngs}});
  }
  if (auto s = r.get<std::string>("initial_condition")) {
    c.initial_condition = pick<InitialCondition>("initial_condition", *s,
                                                 {{"zero_div", InitialCondition::ZeroDiv},
                                                  {"stabilized_stokes", InitialCondition::StabilizedStokes}});
  }

  if (r.has("mesh")) {
    ObjectReader m(r.raw("mesh"), "mesh");
    c.nx = positive_int(m, "nx", c.nx);
    c.ny = positive_int(m, "ny", c.ny);
    c.dim = m.get<int>("dim").value_or(c.dim);
    if (c.dim != 1 && c.dim != 2) throw ConfigError("mesh.dim", "must be 1 or 2");
    m.reject_unknown();
  }

  if (r.has("time")) {
    ObjectReader t(r.raw("time"), "time");
    c.tau = positive_real(t, "tau");
    c.t_final = positive_real(t, "t_final");
    if (t.has("n_steps")) c.n_steps = positive_int(t, "n_steps", 1);
    t.reject_unknown();
    if (c.tau && c.t_final) {
      const double n = *c.t_final / *c.tau;
      const double rounded = std::round(n);
      if (rounded < 1.0 || std::abs(n - rounded) > 1e-9 * n) throw ConfigError("time.t_final", "is not a whole number of steps of tau");
      if (c.n_steps && *c.n_steps != static_cast<int>(rounded)) throw ConfigError("time.n_steps", "inconsistent with tau and t_final");
    }
  }

  if (r.has("material")) {
    ObjectReader m(r.raw("material"), "material");
    c.young = positive_real(m, "young");
    c.poisson = m.get<double>("poisson");
    if (c.poisson && !(*c.poisson >= 0.0 && *c.poisson < 0.5)) throw ConfigError("material.poisson", "must lie in [0, 0.5)");
    c.permeability = m.get<double>("permeability");
    if (c.permeability && *c.permeability < 0.0) throw ConfigError("material.permeability", "must be non-negative");
    m.reject_unknown();
  }

  if (r.has("load")) {
    ObjectReader l(r.raw("load"), "load");
    c.sigma0 = l.get<double>("sigma0");
    c.force = l.get<double>("force");
    l.reject_unknown();
  }

  if (r.has("sampling_line")) {
    ObjectReader l(r.raw("sampling_line"), "sampling_line");
    SamplingLineSpec s;
    if (auto a = l.get<std::string>("axis")) {
      s.axis = pick<SamplingLineSpec::Axis>("sampling_line.axis", *a,
                                            {{"horizontal", SamplingLineSpec::Axis::Horizontal},
                                             {"vertical", SamplingLineSpec::Axis::Vertical}});
    }
    const auto idx = l.get<int>("index");
    if (!idx) throw ConfigError("sampling_line.index", "required");
    if (*idx < 0) throw ConfigError("sampling_line.index", "must be non-negative");
    s.index = *idx;
    l.reject_unknown();
    c.line = s;
  }

  if (r.has("custom")) c.custom = parse_custom(r.raw("custom"), "custom");
  if (c.scenario == ScenarioKind::Custom && !c.custom) throw ConfigError("custom", "required for the custom scenario");
  if (c.scenario != ScenarioKind::Custom && c.custom) throw ConfigError("custom", "only valid with scenario 'custom'");

  if (r.has("ladder")) {
    const json& arr = r.raw("ladder");
    if (!arr.is_array()) throw ConfigError("ladder", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      ObjectReader row(arr[i], "ladder[" + std::to_string(i) + "]");
      LadderRow lr;
      lr.nx = positive_int(row, "nx", 0);
      lr.ny = positive_int(row, "ny", lr.nx);
      lr.n_steps = positive_int(row, "n_steps", 0);
      if (lr.nx == 0) throw ConfigError(row.field("nx"), "required");
      if (lr.n_steps == 0) throw ConfigError(row.field("n_steps"), "required");
      row.reject_unknown();
      c.ladder.push_back(lr);
    }
  }

  if (auto o = r.get<std::string>("output_dir")) {
    if (o->empty()) throw ConfigError("output_dir", "must not be empty");
    c.output_dir = *o;
  }
  c.jobs = positive_int(r, "jobs", c.jobs);
  r.reject_unknown();

  const bool one_d = is_one_dimensional(c);
  if (c.scheme == SchemeKind::TaylorHood1D && !one_d) throw ConfigError("scheme", "taylor_hood is only available in 1D");
  if (c.line && one_d) throw ConfigError("sampling_line", "1D scenarios always sample the whole interval");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

TimeParams resolve_time(const RunConfig& cfg, const TimeParams& fallback) {
  TimeParams t = fallback;
  if (cfg.tau && cfg.t_final) {
    t.tau = *cfg.tau;
    t.n_steps = static_cast<int>(std::lround(*cfg.t_final / *cfg.tau));
  } else if (cfg.t_final) {
    t.n_steps = cfg.n_steps.value_or(fallback.n_steps);
    t.tau = *cfg.t_final / t.n_steps;
  } else {
    if (cfg.tau) t.tau = *cfg.tau;
    if (cfg.n_steps) t.n_steps = *cfg.n_steps;
  }
  return t;
}

}  // namespace biot
