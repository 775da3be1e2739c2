#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdq/convergence.hpp"
#include "pdq/intensity.hpp"
#include "pdq/io.hpp"
#include "pdq/simulate.hpp"
#include "pdq/state.hpp"

namespace pdq {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_keys(const ordered_json& j, const char* section,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw ConfigError(std::string(section) + " must be a json object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("unknown key '" + item.key() + "' in " + section);
  }
}

inline std::string require_string(const ordered_json& j, const char* section,
                                  const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw ConfigError(std::string(section) + " needs string '" + key + "'");
  return j[key].get<std::string>();
}

inline double require_finite(const ordered_json& j, const char* section,
                             const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError(std::string(section) + " needs number '" + key + "'");
  const double v = j[key].get<double>();
  if (!std::isfinite(v))
    throw ConfigError(std::string(section) + "." + key + " must be finite");
  return v;
}

inline double number_or(const ordered_json& j, const char* section,
                        const char* key, double def) {
  if (!j.contains(key)) return def;
  return require_finite(j, section, key);
}

inline std::uint64_t count_or(const ordered_json& j, const char* section,
                              const char* key, std::uint64_t def) {
  if (!j.contains(key)) return def;
  if (j[key].is_number_unsigned()) return j[key].get<std::uint64_t>();
  if (j[key].is_number_integer() && j[key].get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(j[key].get<std::int64_t>());
  throw ConfigError(std::string(section) + "." + key +
                    " must be a non-negative integer");
}

}  // namespace detail

struct ModelConfig {
  std::string lambda;
  std::string h;
  std::string lambda0;
  double lambda_sup = 0.0;
  double h_sup = 0.0;

  static ModelConfig from_json(const ordered_json& j) {
    detail::check_keys(j, "model",
                       {"lambda", "h", "lambda0", "lambda_sup", "h_sup"});
    ModelConfig m;
    m.lambda = detail::require_string(j, "model", "lambda");
    m.h = detail::require_string(j, "model", "h");
    m.lambda0 = detail::require_string(j, "model", "lambda0");
    m.lambda_sup = detail::require_finite(j, "model", "lambda_sup");
    m.h_sup = detail::require_finite(j, "model", "h_sup");
    if (!(m.lambda_sup >= 0.0) || !(m.h_sup >= 0.0))
      throw ConfigError("model rate bounds must be non-negative");
    return m;
  }

  ordered_json to_json() const {
    return ordered_json{{"lambda", lambda},
                        {"h", h},
                        {"lambda0", lambda0},
                        {"lambda_sup", lambda_sup},
                        {"h_sup", h_sup}};
  }
};

inline IntensityField build_field(const ModelConfig& m) {
  try {
    return IntensityField::parse(m.lambda, m.h, m.lambda0, m.lambda_sup,
                                 m.h_sup);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("bad rate expression: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad model: ") + e.what());
  }
}

inline StateX state_from_json(const ordered_json& j, const char* section) {
  detail::check_keys(j, section, {"n", "x", "y"});
  StateX s;
  s.n = static_cast<std::uint32_t>(
      detail::count_or(j, section, "n", 0));
  s.x = detail::number_or(j, section, "x", 0.0);
  s.y = detail::number_or(j, section, "y", 0.0);
  if (!is_valid_state(s))
    throw ConfigError(std::string(section) +
                      " is not a valid state (x needs n > 0)");
  return s;
}

inline ordered_json state_to_json(const StateX& s) {
  return ordered_json{{"n", s.n}, {"x", s.x}, {"y", s.y}};
}

struct SimulateConfig {
  StateX start{1, 0.0, 0.0};
  double horizon = 100.0;

  static SimulateConfig from_json(const ordered_json& j) {
    detail::check_keys(j, "simulate", {"start", "horizon"});
    SimulateConfig c;
    if (j.contains("start")) c.start = state_from_json(j["start"], "start");
    c.horizon = detail::number_or(j, "simulate", "horizon", c.horizon);
    if (!(c.horizon > 0.0)) throw ConfigError("horizon must be positive");
    return c;
  }
};

struct StationaryConfig {
  std::size_t cycles = 100000;
  std::size_t warmup = 100;
  std::uint32_t levels = 10;

  static StationaryConfig from_json(const ordered_json& j) {
    detail::check_keys(j, "stationary", {"cycles", "warmup", "levels"});
    StationaryConfig c;
    c.cycles = detail::count_or(j, "stationary", "cycles", c.cycles);
    c.warmup = detail::count_or(j, "stationary", "warmup", c.warmup);
    c.levels = static_cast<std::uint32_t>(
        detail::count_or(j, "stationary", "levels", c.levels));
    if (c.cycles < 100) throw ConfigError("stationary.cycles must be >= 100");
    if (c.levels < 1 || c.levels > 100000)
      throw ConfigError("stationary.levels out of range");
    return c;
  }
};

struct HittingConfig {
  std::vector<StateX> starts;
  int k = 1;
  int m = 2;
  std::size_t replicas = 10000;
  double cap = 1e6;

  static HittingConfig from_json(const ordered_json& j) {
    detail::check_keys(j, "hitting", {"starts", "k", "m", "replicas", "cap"});
    HittingConfig c;
    if (!j.contains("starts") || !j["starts"].is_array() ||
        j["starts"].empty())
      throw ConfigError("hitting.starts must be a non-empty array");
    for (const auto& s : j["starts"])
      c.starts.push_back(state_from_json(s, "hitting.starts"));
    c.k = static_cast<int>(detail::count_or(j, "hitting", "k", 1));
    c.m = static_cast<int>(detail::count_or(j, "hitting", "m", 2));
    c.replicas = detail::count_or(j, "hitting", "replicas", c.replicas);
    c.cap = detail::number_or(j, "hitting", "cap", c.cap);
    if (c.k < 1) throw ConfigError("hitting.k must be >= 1");
    if (c.m <= c.k)
      throw ConfigError("hitting.m must exceed hitting.k for the bound");
    if (c.replicas < 100)
      throw ConfigError("hitting.replicas must be >= 100");
    if (!(c.cap > 0.0)) throw ConfigError("hitting.cap must be positive");
    return c;
  }
};

struct DynkinConfig {
  int k = 0;  // time weight exponent; 0 selects the plain identity
  int m = 1;
  double cap = 1e3;
  StateX start{1, 0.0, 0.0};
  double t_end = 5.0;
  std::size_t replicas = 10000;

  static DynkinConfig from_json(const ordered_json& j) {
    detail::check_keys(j, "dynkin",
                       {"k", "m", "cap", "start", "t_end", "replicas"});
    DynkinConfig c;
    c.k = static_cast<int>(detail::count_or(j, "dynkin", "k", 0));
    c.m = static_cast<int>(detail::count_or(j, "dynkin", "m", 1));
    c.cap = detail::number_or(j, "dynkin", "cap", c.cap);
    if (j.contains("start")) c.start = state_from_json(j["start"], "start");
    c.t_end = detail::number_or(j, "dynkin", "t_end", c.t_end);
    c.replicas = detail::count_or(j, "dynkin", "replicas", c.replicas);
    if (c.m < 1) throw ConfigError("dynkin.m must be >= 1");
    if (!(c.cap > 0.0)) throw ConfigError("dynkin.cap must be positive");
    if (!(c.t_end > 0.0)) throw ConfigError("dynkin.t_end must be positive");
    if (c.replicas < 100) throw ConfigError("dynkin.replicas must be >= 100");
    return c;
  }
};

struct JumpProbConfig {
  StateX start{1, 0.0, 0.0};
  std::vector<double> deltas{0.1, 0.05, 0.025};
  std::size_t trials = 100000;

  static JumpProbConfig from_json(const ordered_json& j) {
    detail::check_keys(j, "jumpprob", {"start", "deltas", "trials"});
    JumpProbConfig c;
    if (j.contains("start")) c.start = state_from_json(j["start"], "start");
    if (j.contains("deltas")) {
      if (!j["deltas"].is_array() || j["deltas"].empty())
        throw ConfigError("jumpprob.deltas must be a non-empty array");
      c.deltas.clear();
      for (const auto& d : j["deltas"]) {
        if (!d.is_number() || !(d.get<double>() > 0.0))
          throw ConfigError("jumpprob.deltas must be positive numbers");
        c.deltas.push_back(d.get<double>());
      }
    }
    c.trials = detail::count_or(j, "jumpprob", "trials", c.trials);
    if (c.trials < 1000) throw ConfigError("jumpprob.trials must be >= 1000");
    return c;
  }
};

struct ConvergeConfig {
  StartMode mode = StartMode::fixed;
  StateX start{1, 0.0, 0.0};
  std::vector<double> grid{1.0, 2.0, 3.5, 6.0, 10.0, 16.0, 25.0, 50.0};
  std::size_t replicas = 100000;
  std::size_t reference_cycles = 300000;
  std::size_t warmup = 100;
  double floor_margin = 0.003;

  static ConvergeConfig from_json(const ordered_json& j) {
    detail::check_keys(j, "converge",
                       {"mode", "start", "grid", "replicas",
                        "reference_cycles", "warmup", "floor_margin"});
    ConvergeConfig c;
    if (j.contains("mode")) {
      const auto mode = detail::require_string(j, "converge", "mode");
      if (mode == "fixed")
        c.mode = StartMode::fixed;
      else if (mode == "stationary")
        c.mode = StartMode::stationary_pool;
      else
        throw ConfigError("converge.mode must be 'fixed' or 'stationary'");
    }
    if (j.contains("start")) c.start = state_from_json(j["start"], "start");
    if (j.contains("grid")) {
      if (!j["grid"].is_array())
        throw ConfigError("converge.grid must be an array");
      c.grid.clear();
      for (const auto& t : j["grid"]) {
        if (!t.is_number())
          throw ConfigError("converge.grid must hold numbers");
        c.grid.push_back(t.get<double>());
      }
    }
    c.replicas = detail::count_or(j, "converge", "replicas", c.replicas);
    c.reference_cycles = detail::count_or(j, "converge", "reference_cycles",
                                          c.reference_cycles);
    c.warmup = detail::count_or(j, "converge", "warmup", c.warmup);
    c.floor_margin =
        detail::number_or(j, "converge", "floor_margin", c.floor_margin);
    if (c.replicas < 100) throw ConfigError("converge.replicas >= 100");
    if (c.reference_cycles < 1000)
      throw ConfigError("converge.reference_cycles must be >= 1000");
    if (!(c.floor_margin >= 0.0))
      throw ConfigError("converge.floor_margin must be >= 0");
    return c;
  }
};

/// Whole config file: a model plus optional per-command sections.
struct RunConfig {
  ModelConfig model;
  std::uint64_t seed = 1;
  ordered_json raw;

  static RunConfig from_json(const ordered_json& j) {
    detail::check_keys(j, "config",
                       {"model", "seed", "simulate", "stationary", "hitting",
                        "dynkin", "jumpprob", "converge"});
    if (!j.contains("model")) throw ConfigError("config needs a 'model'");
    RunConfig c;
    c.model = ModelConfig::from_json(j["model"]);
    c.seed = detail::count_or(j, "config", "seed", 1);
    c.raw = j;
    return c;
  }

  ordered_json section(const char* name) const {
    return raw.contains(name) ? raw[name] : ordered_json::object();
  }
};

}  // namespace pdq
