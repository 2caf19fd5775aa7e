#pragma once

// Run configuration: one flat table of dotted keys with units in their names,
// loaded from a nested JSON file and overridable key by key.
//
//   {"wire": {"length_mm": 10}, "device": {"temperature_k": 0}}
//
// Precedence is flag > file > built-in default. Unknown keys are rejected.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "melink/baselines.hpp"
#include "melink/core.hpp"
#include "melink/link_sim.hpp"

namespace melink {

struct RunConfig {
  LinkConfig link;
  RepeaterParams repeaters;
  LowSwingParams lowswing;
  double window = 2e-9;   // s, switching window for trajectories and sweeps
  unsigned threads = 0;   // 0 = one per hardware thread

  CompareOptions compare_options() const { return {repeaters, lowswing, 64}; }

  void validate() const {
    link.validate();
    repeaters.validate();
    lowswing.validate();
    require(window > 0 && std::isfinite(window), "sim.window_ns must be positive");
  }
};

namespace config_detail {

enum class Kind { real, integer, optional_real };

struct Key {
  const char* name;
  Kind kind;
  double scale;  // file value * scale = internal SI value
  std::function<double&(RunConfig&)> ref;
  std::function<std::optional<double>&(RunConfig&)> opt_ref = {};
};

inline const std::vector<Key>& keys() {
  using K = Kind;
  static const std::vector<Key> table = {
      {"device.length_nm", K::real, 1e-9, [](RunConfig& c) -> double& { return c.link.magnet.length; }},
      {"device.width_nm", K::real, 1e-9, [](RunConfig& c) -> double& { return c.link.magnet.width; }},
      {"device.thickness_nm", K::real, 1e-9, [](RunConfig& c) -> double& { return c.link.magnet.thickness; }},
      {"device.ms_a_per_m", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.magnet.ms; }},
      {"device.alpha", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.magnet.alpha; }},
      {"device.gamma_rad_per_s_t", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.magnet.gamma; }},
      {"device.ki_j_per_m2", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.magnet.ki; }},
      {"device.t_me_nm", K::real, 1e-9, [](RunConfig& c) -> double& { return c.link.magnet.t_me; }},
      {"device.alpha_me_s_per_m", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.magnet.alpha_me; }},
      {"device.eps_r_me", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.magnet.eps_r_me; }},
      {"device.temperature_k", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.magnet.temperature; }},

      {"mtj.r_p_ohm", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.mtj.r_p; }},
      {"mtj.tmr", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.mtj.tmr; }},
      {"mtj.r_ref_ohm", K::optional_real, 1.0, {}, [](RunConfig& c) -> std::optional<double>& { return c.link.mtj.r_ref; }},
      {"mtj.v_read", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.mtj.v_read; }},
      {"mtj.t_read_ns", K::optional_real, 1e-9, {}, nullptr},

      {"wire.length_mm", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.wire.length_mm; }},
      {"wire.r_per_mm_ohm", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.wire.r_per_mm; }},
      {"wire.c_per_mm_ff_per_um", K::real, 1e-12, [](RunConfig& c) -> double& { return c.link.wire.c_per_mm; }},
      {"wire.n_segments", K::integer, 1.0, nullptr},

      {"link.cs_ratio", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.cs_ratio; }},
      {"link.r_driver_ohm", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.r_driver; }},
      {"link.c_l_extra_ff", K::real, 1e-15, [](RunConfig& c) -> double& { return c.link.c_l_extra; }},
      {"link.rise_time_ps", K::real, 1e-12, [](RunConfig& c) -> double& { return c.link.rise_time; }},
      {"link.sense_latency_ps", K::real, 1e-12, [](RunConfig& c) -> double& { return c.link.sense_latency; }},
      {"link.activity", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.activity; }},
      {"drive.vdd", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.vdd; }},

      {"clock.period_ns", K::real, 1e-9, [](RunConfig& c) -> double& { return c.link.clock.period; }},
      {"clock.write_fraction", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.clock.write_fraction; }},
      {"clock.read_fraction", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.clock.read_fraction; }},
      {"clock.reset_fraction", K::real, 1.0, [](RunConfig& c) -> double& { return c.link.clock.reset_fraction; }},

      {"sim.llg_dt_ps", K::real, 1e-12, [](RunConfig& c) -> double& { return c.link.llg_dt; }},
      {"sim.circuit_dt_ps", K::real, 1e-12, [](RunConfig& c) -> double& { return c.link.circuit_dt; }},
      {"sim.window_ns", K::real, 1e-9, [](RunConfig& c) -> double& { return c.window; }},
      {"sim.seed", K::integer, 1.0, nullptr},
      {"sim.threads", K::integer, 1.0, nullptr},

      {"baseline.r0_ohm", K::real, 1.0, [](RunConfig& c) -> double& { return c.repeaters.r0; }},
      {"baseline.c0_ff", K::real, 1e-15, [](RunConfig& c) -> double& { return c.repeaters.c0; }},
      {"baseline.cp_ff", K::real, 1e-15, [](RunConfig& c) -> double& { return c.repeaters.cp; }},
      {"baseline.spacing_factor", K::real, 1.0, [](RunConfig& c) -> double& { return c.repeaters.spacing_factor; }},
      {"baseline.size_factor", K::real, 1.0, [](RunConfig& c) -> double& { return c.repeaters.size_factor; }},
      {"baseline.i_bias_ua", K::real, 1e-6, [](RunConfig& c) -> double& { return c.lowswing.i_bias; }},
      {"baseline.bit_period_ns", K::real, 1e-9, [](RunConfig& c) -> double& { return c.lowswing.bit_period; }},
      {"baseline.amp_input_c_ff", K::real, 1e-15, [](RunConfig& c) -> double& { return c.lowswing.amp_input_c; }},
      {"baseline.amp_latency_ps", K::real, 1e-12, [](RunConfig& c) -> double& { return c.lowswing.amp_latency; }},
  };
  return table;
}

inline const Key* find(const std::string& name) {
  for (const auto& k : keys())
    if (name == k.name) return &k;
  return nullptr;
}

// Keys whose storage is not a plain double.
inline void set_special(RunConfig& c, const std::string& name, std::optional<double> v) {
  if (name == "mtj.t_read_ns") {
    c.link.read_window_from_clock = !v.has_value();
    if (v) c.link.mtj.t_read = *v * 1e-9;
  } else if (name == "wire.n_segments") {
    c.link.wire.n_segments = static_cast<int>(*v);
  } else if (name == "sim.seed") {
    c.link.seed = static_cast<std::uint64_t>(*v);
  } else if (name == "sim.threads") {
    c.threads = static_cast<unsigned>(*v);
  }
}

inline std::optional<double> get_special(const RunConfig& c, const std::string& name) {
  if (name == "mtj.t_read_ns") {
    if (c.link.read_window_from_clock) return std::nullopt;
    return c.link.mtj.t_read * 1e9;
  }
  if (name == "wire.n_segments") return c.link.wire.n_segments;
  if (name == "sim.seed") return static_cast<double>(c.link.seed);
  if (name == "sim.threads") return c.threads;
  return std::nullopt;
}

}  // namespace config_detail

/// Sets one dotted key from a value in the key's own units. nullopt clears an
/// optional key (or restores its derived default).
inline void set_config_value(RunConfig& c, const std::string& name, std::optional<double> value) {
  using config_detail::Kind;
  const auto* k = config_detail::find(name);
  if (!k) throw ParameterError("unknown configuration key: " + name);
  if (!value) {
    if (k->kind != Kind::optional_real) throw ParameterError("configuration key " + name + " may not be null");
  } else {
    if (!std::isfinite(*value)) throw ParameterError("configuration key " + name + " must be finite");
    if (k->kind == Kind::integer) {
      if (*value < 0 || *value != std::floor(*value) || *value > 9.007199254740992e15) {
        throw ParameterError("configuration key " + name + " must be a non-negative integer");
      }
    }
  }
  if (k->opt_ref) {
    auto& slot = k->opt_ref(c);
    slot = value ? std::optional<double>(*value * k->scale) : std::nullopt;
  } else if (k->ref) {
    k->ref(c) = *value * k->scale;
  } else {
    config_detail::set_special(c, name, value);
  }
}

inline std::optional<double> get_config_value(const RunConfig& c, const std::string& name) {
  const auto* k = config_detail::find(name);
  if (!k) throw ParameterError("unknown configuration key: " + name);
  auto& mc = const_cast<RunConfig&>(c);
  if (k->opt_ref) {
    const auto& slot = k->opt_ref(mc);
    return slot ? std::optional<double>(*slot / k->scale) : std::nullopt;
  }
  if (k->ref) return k->ref(mc) / k->scale;
  return config_detail::get_special(c, name);
}

inline std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : config_detail::keys()) out.emplace_back(k.name);
  return out;
}

/// Parses "key=value"; the value may be a number or "null".
inline void apply_override(RunConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ParameterError("override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  if (text == "null") {
    set_config_value(c, key, std::nullopt);
    return;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ParameterError("override value for " + key + " is not a number: " + text);
  set_config_value(c, key, v);
}

inline void apply_json(RunConfig& c, const nlohmann::json& j, const std::string& prefix = "") {
  if (!j.is_object()) throw ParameterError("configuration must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    const auto& v = it.value();
    if (v.is_object()) {
      apply_json(c, v, key);
    } else if (v.is_null()) {
      set_config_value(c, key, std::nullopt);
    } else if (v.is_number()) {
      set_config_value(c, key, v.get<double>());
    } else {
      if (!config_detail::find(key)) throw ParameterError("unknown configuration key: " + key);
      throw ParameterError("configuration key " + key + " must be a number");
    }
  }
}

inline void load_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read configuration file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError("configuration file " + path + " is not valid JSON: " + e.what());
  }
  apply_json(c, j);
}

/// Nested JSON of every key, suitable as a configuration file.
inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& name : config_keys()) {
    const auto dot = name.find('.');
    const auto v = get_config_value(c, name);
    auto& slot = j[name.substr(0, dot)][name.substr(dot + 1)];
    if (v) {
      slot = *v;
    } else {
      slot = nullptr;
    }
  }
  return j;
}

}  // namespace melink
