// Copyright 2026 The barrierkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BARRIERKIT_CONFIG_HPP
#define BARRIERKIT_CONFIG_HPP

// JSON echo and strict loading of settings. Unknown keys are rejected and
// every tolerance must be positive.

#include <cmath>
#include <set>
#include <string>

#include "json.hpp"

#include "barrierkit/acc_model.hpp"
#include "barrierkit/assemble.hpp"
#include "barrierkit/barrier.hpp"
#include "barrierkit/errors.hpp"
#include "barrierkit/ode.hpp"
#include "barrierkit/saddle.hpp"
#include "barrierkit/section.hpp"
#include "barrierkit/tangency.hpp"
#include "barrierkit/verify.hpp"

namespace barrierkit::config {

using nlohmann::json;

namespace detail {

inline void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

// infinity is not representable in JSON; it travels as the string "inf"
inline json num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

inline double read_num(const json& j, const std::string& where) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

inline void get(const json& j, const char* key, double& v, const std::string& where) {
  if (j.contains(key)) v = read_num(j.at(key), where + "." + key);
}

inline void get_positive(const json& j, const char* key, double& v, const std::string& where) {
  if (!j.contains(key)) return;
  get(j, key, v, where);
  if (!(v > 0.0)) throw ConfigError(where + "." + key + ": must be positive");
}

template <class I>
inline void get_int(const json& j, const char* key, I& v, const std::string& where) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  v = j.at(key).get<I>();
}

inline void get_bool(const json& j, const char* key, bool& v, const std::string& where) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_boolean()) throw ConfigError(where + "." + key + ": expected a boolean");
  v = j.at(key).get<bool>();
}

}  // namespace detail

// ode::Settings ---------------------------------------------------------------

inline json to_json(const ode::Settings& s) {
  return {{"method", s.method == ode::Method::RK45 ? "RK45" : "RK4"},
          {"atol", s.atol},
          {"rtol", s.rtol},
          {"max_step", detail::num(s.max_step)},
          {"min_step", s.min_step},
          {"initial_step", s.initial_step},
          {"fixed_step", s.fixed_step},
          {"max_steps", s.max_steps},
          {"event_tol", s.event_tol}};
}

inline void apply(ode::Settings& s, const json& j, const std::string& w = "ode") {
  detail::reject_unknown(j, {"method", "atol", "rtol", "max_step", "min_step", "initial_step", "fixed_step",
                             "max_steps", "event_tol"}, w);
  if (j.contains("method")) {
    const std::string m = j.at("method").get<std::string>();
    if (m == "RK45") s.method = ode::Method::RK45;
    else if (m == "RK4") s.method = ode::Method::RK4;
    else throw ConfigError(w + ".method: expected RK45 or RK4");
  }
  detail::get_positive(j, "atol", s.atol, w);
  detail::get_positive(j, "rtol", s.rtol, w);
  detail::get_positive(j, "max_step", s.max_step, w);
  detail::get_positive(j, "min_step", s.min_step, w);
  detail::get(j, "initial_step", s.initial_step, w);
  if (s.initial_step < 0.0) throw ConfigError(w + ".initial_step: must be non-negative");
  detail::get_positive(j, "fixed_step", s.fixed_step, w);
  detail::get_int(j, "max_steps", s.max_steps, w);
  if (s.max_steps <= 0) throw ConfigError(w + ".max_steps: must be positive");
  detail::get_positive(j, "event_tol", s.event_tol, w);
}

// SaddleSettings ---------------------------------------------------------------

inline json to_json(const SaddleSettings& s) {
  return {{"switch_tol", s.switch_tol}, {"saddle_tol", s.saddle_tol}, {"max_iterations", s.max_iterations}};
}

inline void apply(SaddleSettings& s, const json& j, const std::string& w = "saddle") {
  detail::reject_unknown(j, {"switch_tol", "saddle_tol", "max_iterations"}, w);
  detail::get_positive(j, "switch_tol", s.switch_tol, w);
  detail::get_positive(j, "saddle_tol", s.saddle_tol, w);
  detail::get_int(j, "max_iterations", s.max_iterations, w);
  if (s.max_iterations <= 0) throw ConfigError(w + ".max_iterations: must be positive");
}

// BarrierSettings --------------------------------------------------------------

inline json to_json(const BarrierSettings& s) {
  return {{"ode", to_json(s.ode)},
          {"horizon", detail::num(s.horizon)},
          {"max_switches", s.max_switches},
          {"hamiltonian_tol", s.hamiltonian_tol},
          {"g_tol", s.g_tol},
          {"denom_tol", s.denom_tol},
          {"lookahead", s.lookahead},
          {"switch_band", s.switch_band},
          {"reject_drift", s.reject_drift},
          {"stop_at_domain", s.stop_at_domain},
          {"stop_at_constraints", s.stop_at_constraints},
          {"max_arclength", detail::num(s.max_arclength)},
          {"saddle", to_json(s.saddle)}};
}

inline void apply(BarrierSettings& s, const json& j, const std::string& w = "barrier") {
  detail::reject_unknown(j, {"ode", "horizon", "max_switches", "hamiltonian_tol", "g_tol", "denom_tol", "lookahead",
                             "switch_band", "reject_drift", "stop_at_domain", "stop_at_constraints",
                             "max_arclength", "saddle"}, w);
  if (j.contains("ode")) apply(s.ode, j.at("ode"), w + ".ode");
  detail::get_positive(j, "horizon", s.horizon, w);
  detail::get_int(j, "max_switches", s.max_switches, w);
  if (s.max_switches < 0) throw ConfigError(w + ".max_switches: must be non-negative");
  detail::get_positive(j, "hamiltonian_tol", s.hamiltonian_tol, w);
  detail::get_positive(j, "g_tol", s.g_tol, w);
  detail::get_positive(j, "denom_tol", s.denom_tol, w);
  detail::get_positive(j, "lookahead", s.lookahead, w);
  detail::get_positive(j, "switch_band", s.switch_band, w);
  detail::get_bool(j, "reject_drift", s.reject_drift, w);
  detail::get_bool(j, "stop_at_domain", s.stop_at_domain, w);
  detail::get_bool(j, "stop_at_constraints", s.stop_at_constraints, w);
  detail::get_positive(j, "max_arclength", s.max_arclength, w);
  if (j.contains("saddle")) apply(s.saddle, j.at("saddle"), w + ".saddle");
}

// Box ----------------------------------------------------------------------------

inline json to_json(const Box& b) {
  json out = json::array();
  for (Eigen::Index i = 0; i < b.size(); ++i) out.push_back({detail::num(b.lower(i)), detail::num(b.upper(i))});
  return out;
}

inline Box box_from_json(const json& j, const std::string& w) {
  if (!j.is_array()) throw ConfigError(w + ": expected an array of [lo, hi] pairs");
  std::vector<std::pair<double, double>> iv;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw ConfigError(w + ": expected [lo, hi]");
    const double lo = detail::read_num(e[0], w), hi = detail::read_num(e[1], w);
    if (!(lo <= hi)) throw ConfigError(w + ": empty interval");
    iv.push_back({lo, hi});
  }
  return Box::from(iv);
}

// TangencySettings ------------------------------------------------------------

inline json to_json(const TangencySettings& s) {
  return {{"fixed_coords", s.fixed_coords},
          {"search_box", s.search_box ? to_json(*s.search_box) : json(nullptr)},
          {"scan_points", s.scan_points},
          {"residual_tol", s.residual_tol},
          {"dedup_tol", s.dedup_tol},
          {"saddle", to_json(s.saddle)}};
}

inline void apply(TangencySettings& s, const json& j, const std::string& w = "tangency") {
  detail::reject_unknown(j, {"fixed_coords", "search_box", "scan_points", "residual_tol", "dedup_tol", "saddle"}, w);
  if (j.contains("fixed_coords")) s.fixed_coords = j.at("fixed_coords").get<std::vector<int>>();
  if (j.contains("search_box")) {
    if (j.at("search_box").is_null()) s.search_box.reset();
    else s.search_box = box_from_json(j.at("search_box"), w + ".search_box");
  }
  detail::get_int(j, "scan_points", s.scan_points, w);
  if (s.scan_points < 2) throw ConfigError(w + ".scan_points: must be at least 2");
  detail::get_positive(j, "residual_tol", s.residual_tol, w);
  detail::get_positive(j, "dedup_tol", s.dedup_tol, w);
  if (j.contains("saddle")) apply(s.saddle, j.at("saddle"), w + ".saddle");
}

// SliceSettings ---------------------------------------------------------------

inline json to_json(const SliceSettings& s) {
  return {{"fixed_coords", s.fixed_coords}, {"stitch_tol", s.stitch_tol},   {"slice_tol", s.slice_tol},
          {"support_tol", s.support_tol},   {"scan_points", s.scan_points}, {"saddle", to_json(s.saddle)}};
}

inline void apply(SliceSettings& s, const json& j, const std::string& w = "slice") {
  detail::reject_unknown(j, {"fixed_coords", "stitch_tol", "slice_tol", "support_tol", "scan_points", "saddle"}, w);
  if (j.contains("fixed_coords")) s.fixed_coords = j.at("fixed_coords").get<std::vector<int>>();
  detail::get_positive(j, "stitch_tol", s.stitch_tol, w);
  detail::get_positive(j, "slice_tol", s.slice_tol, w);
  detail::get_positive(j, "support_tol", s.support_tol, w);
  detail::get_int(j, "scan_points", s.scan_points, w);
  if (s.scan_points < 2) throw ConfigError(w + ".scan_points: must be at least 2");
  if (j.contains("saddle")) apply(s.saddle, j.at("saddle"), w + ".saddle");
}

// PermeabilitySettings ---------------------------------------------------------

inline json to_json(const verify::PermeabilitySettings& s) {
  return {{"eps_geo", s.eps_geo},     {"horizon", s.horizon},   {"n_controls", s.n_controls},
          {"n_probes", s.n_probes},   {"tube_tol", s.tube_tol}, {"seed", s.seed},
          {"ode", to_json(s.ode)}};
}

inline void apply(verify::PermeabilitySettings& s, const json& j, const std::string& w = "permeability") {
  detail::reject_unknown(j, {"eps_geo", "horizon", "n_controls", "n_probes", "tube_tol", "seed", "ode"}, w);
  detail::get_positive(j, "eps_geo", s.eps_geo, w);
  detail::get_positive(j, "horizon", s.horizon, w);
  detail::get_int(j, "n_controls", s.n_controls, w);
  detail::get_int(j, "n_probes", s.n_probes, w);
  if (s.n_controls <= 0 || s.n_probes <= 0) throw ConfigError(w + ": n_controls and n_probes must be positive");
  detail::get_positive(j, "tube_tol", s.tube_tol, w);
  detail::get_int(j, "seed", s.seed, w);
  if (j.contains("ode")) apply(s.ode, j.at("ode"), w + ".ode");
}

// OracleSettings --------------------------------------------------------------

inline json to_json(const verify::OracleSettings& s) {
  return {{"horizon", s.horizon}, {"dt", s.dt}, {"previews", s.previews}, {"control_grid", s.control_grid}};
}

inline void apply(verify::OracleSettings& s, const json& j, const std::string& w = "oracle") {
  detail::reject_unknown(j, {"horizon", "dt", "previews", "control_grid"}, w);
  detail::get_positive(j, "horizon", s.horizon, w);
  detail::get_positive(j, "dt", s.dt, w);
  if (j.contains("previews")) s.previews = j.at("previews").get<std::vector<double>>();
  for (double T : s.previews) {
    if (!(T > 0.0)) throw ConfigError(w + ".previews: must be positive");
  }
  detail::get_int(j, "control_grid", s.control_grid, w);
}

// SectionSettings -------------------------------------------------------------

inline json to_json(const SectionSettings& s) {
  return {{"steps", s.steps}, {"bisections", s.bisections}, {"jump_tol", s.jump_tol},
          {"probe_length", s.probe_length}};
}

inline void apply(SectionSettings& s, const json& j, const std::string& w = "section") {
  detail::reject_unknown(j, {"steps", "bisections", "jump_tol", "probe_length"}, w);
  detail::get_int(j, "steps", s.steps, w);
  detail::get_int(j, "bisections", s.bisections, w);
  if (s.steps < 2 || s.bisections < 0) throw ConfigError(w + ": steps >= 2 and bisections >= 0 required");
  detail::get_positive(j, "jump_tol", s.jump_tol, w);
  detail::get(j, "probe_length", s.probe_length, w);
}

// AccParameters ---------------------------------------------------------------

inline json to_json(const acc::AccParameters& p) {
  return {{"tau", p.tau},       {"d_max", p.d_max},   {"mass", p.mass},     {"f0", p.f0},
          {"f1", p.f1},         {"f2", p.f2},         {"a", p.a},           {"grav", p.grav},
          {"u_min", p.u_min},   {"u_max", p.u_max},   {"d1_min", p.d1_min}, {"d1_max", p.d1_max},
          {"d2_min", p.d2_min}, {"d2_max", p.d2_max}, {"a0", p.a0()},       {"a1", p.a1()},
          {"a2", p.a2()}};
}

inline void apply(acc::AccParameters& p, const json& j, const std::string& w = "params") {
  // a0..a2 are derived; accepting them would let a stale value in
  detail::reject_unknown(j, {"tau", "d_max", "mass", "f0", "f1", "f2", "a", "grav", "u_min", "u_max", "d1_min",
                             "d1_max", "d2_min", "d2_max"}, w);
  detail::get(j, "tau", p.tau, w);
  detail::get(j, "d_max", p.d_max, w);
  detail::get(j, "mass", p.mass, w);
  detail::get(j, "f0", p.f0, w);
  detail::get(j, "f1", p.f1, w);
  detail::get(j, "f2", p.f2, w);
  detail::get(j, "a", p.a, w);
  detail::get(j, "grav", p.grav, w);
  detail::get(j, "u_min", p.u_min, w);
  detail::get(j, "u_max", p.u_max, w);
  detail::get(j, "d1_min", p.d1_min, w);
  detail::get(j, "d1_max", p.d1_max, w);
  detail::get(j, "d2_min", p.d2_min, w);
  detail::get(j, "d2_max", p.d2_max, w);
  p.validate();
}

}  // namespace barrierkit::config

#endif  // BARRIERKIT_CONFIG_HPP
