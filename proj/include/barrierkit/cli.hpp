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

#ifndef BARRIERKIT_CLI_HPP
#define BARRIERKIT_CLI_HPP

// Command-line front end. run() is the whole program; tools/barrierkit.cpp
// only forwards argv. Exit codes: 0 success, 1 a checked invariant failed
// (or the computation itself failed), 2 usage or configuration error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "barrierkit/acc_pipeline.hpp"
#include "barrierkit/assemble.hpp"
#include "barrierkit/barrier.hpp"
#include "barrierkit/config.hpp"
#include "barrierkit/errors.hpp"
#include "barrierkit/export.hpp"
#include "barrierkit/filter.hpp"
#include "barrierkit/log.hpp"
#include "barrierkit/registry.hpp"
#include "barrierkit/section.hpp"
#include "barrierkit/tangency.hpp"
#include "barrierkit/verify.hpp"

namespace barrierkit::cli {

using nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kOk = 0;
inline constexpr int kInvariantFailed = 1;
inline constexpr int kUsage = 2;

/// Everything a subcommand needs after files and flags are merged.
struct RunConfig {
  json system_file = json{{"system", "acc"}};
  registry::Selection sel = registry::select("acc");
  TangencySettings tangency;
  BarrierSettings barrier;
  SliceSettings slice;
  verify::PermeabilitySettings perm;
  verify::OracleSettings oracle;
  SectionSettings section;
  double probe_length = 0.0;
  std::uint64_t seed = 1;

  // acc pipeline extras
  std::optional<int> grid_n;
  std::vector<double> grid;
  bool sections = false;
  bool run_permeability = true;
  int matched_points = 50;
  double dual_tol = 1e-6;
  double tangency_tol = 1e-8;
  double junction_tol = 1e-3;
  int oracle_samples = 500;

  // verify
  std::vector<std::string> checks;
  std::vector<double> eps = {1e-2, 5e-3, 2.5e-3};
  int specs = 20;
  double needle_horizon = 5.0;
  double order_lo = 1.8, order_hi = 2.2;
  int jacobian_samples = 100;
  double jacobian_tol = 1e-6;
  double min_exit_fraction = 0.95;

  json echo() const {
    return {{"system", system_file},
            {"tangency", config::to_json(tangency)},
            {"barrier", config::to_json(barrier)},
            {"slice", config::to_json(slice)},
            {"permeability", config::to_json(perm)},
            {"oracle", config::to_json(oracle)},
            {"section", config::to_json(section)},
            {"probe_length", probe_length},
            {"seed", seed}};
  }
};

namespace detail {

inline json read_json_file(const std::string& path) {
  try {
    return json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
}

/// Applies a run configuration file. System keys go to the registry, the
/// rest to the settings structs; unknown keys are errors.
inline void apply_file(RunConfig& rc, const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected an object");
  config::detail::reject_unknown(
      j,
      {"system", "params", "control_box", "disturbance_box", "tangency", "barrier", "slice", "permeability", "oracle",
       "section", "probe_length", "seed", "grid", "sections", "run_permeability", "matched_points", "dual_tol",
       "tangency_tol", "junction_tol", "oracle_samples", "eps", "specs", "needle_horizon", "jacobian_samples",
       "jacobian_tol", "min_exit_fraction"},
      "config");
  json sys = rc.system_file;
  for (const char* k : {"system", "params", "control_box", "disturbance_box"}) {
    if (j.contains(k)) sys[k] = j.at(k);
  }
  if (j.contains("system") && !j.contains("params")) sys.erase("params");
  rc.system_file = sys;
  if (j.contains("tangency")) config::apply(rc.tangency, j.at("tangency"));
  if (j.contains("barrier")) config::apply(rc.barrier, j.at("barrier"));
  if (j.contains("slice")) config::apply(rc.slice, j.at("slice"));
  if (j.contains("permeability")) config::apply(rc.perm, j.at("permeability"));
  if (j.contains("oracle")) config::apply(rc.oracle, j.at("oracle"));
  if (j.contains("section")) config::apply(rc.section, j.at("section"));
  namespace cd = config::detail;
  cd::get(j, "probe_length", rc.probe_length, "config");
  cd::get_int(j, "seed", rc.seed, "config");
  if (j.contains("grid")) {
    if (j.at("grid").is_number_integer()) {
      int n = 0;
      cd::get_int(j, "grid", n, "config");
      rc.grid_n = n;
    } else {
      rc.grid = j.at("grid").get<std::vector<double>>();
    }
  }
  cd::get_bool(j, "sections", rc.sections, "config");
  cd::get_bool(j, "run_permeability", rc.run_permeability, "config");
  cd::get_int(j, "matched_points", rc.matched_points, "config");
  cd::get_positive(j, "dual_tol", rc.dual_tol, "config");
  cd::get_positive(j, "tangency_tol", rc.tangency_tol, "config");
  cd::get_positive(j, "junction_tol", rc.junction_tol, "config");
  cd::get_int(j, "oracle_samples", rc.oracle_samples, "config");
  if (j.contains("eps")) rc.eps = j.at("eps").get<std::vector<double>>();
  cd::get_int(j, "specs", rc.specs, "config");
  cd::get_positive(j, "needle_horizon", rc.needle_horizon, "config");
  cd::get_int(j, "jacobian_samples", rc.jacobian_samples, "config");
  cd::get_positive(j, "jacobian_tol", rc.jacobian_tol, "config");
  cd::get(j, "min_exit_fraction", rc.min_exit_fraction, "config");
}

/// Fills settings that depend on the chosen system and were not given.
inline void resolve_system(RunConfig& rc) {
  rc.sel = registry::select(rc.system_file);
  const auto& d = rc.sel.defaults;
  if (rc.tangency.fixed_coords.empty()) rc.tangency.fixed_coords = d.fixed_coords;
  if (!rc.tangency.search_box) rc.tangency.search_box = d.search_box;
  if (rc.slice.fixed_coords.empty()) rc.slice.fixed_coords = d.fixed_coords;
  if (std::isnan(rc.barrier.horizon)) rc.barrier.horizon = d.horizon;
  if (rc.probe_length <= 0.0) rc.probe_length = default_probe_length(rc.sel.system);
  rc.perm.seed = rc.seed;
  rc.section.tangency = rc.tangency;
  rc.section.barrier = rc.barrier;
  rc.section.barrier.reject_drift = false;
  rc.section.probe_length = rc.probe_length;
}

/// Parameter vectors from a flat list of values, grouped by the number of
/// fixed coordinates. Systems without fixed coordinates get one empty vector.
inline std::vector<Vector> parameter_list(const RunConfig& rc, const std::vector<double>& at) {
  const std::size_t k = rc.tangency.fixed_coords.size();
  if (k == 0) {
    if (!at.empty()) throw ConfigError("--at: system '" + rc.sel.name + "' has no slice parameter");
    return {Vector(0)};
  }
  std::vector<double> vals = at;
  if (vals.empty()) {
    if (rc.sel.name == "acc") vals = {10.0, 20.0, 45.0};
    else throw ConfigError("--at is required for system '" + rc.sel.name + "'");
  }
  if (vals.size() % k) throw ConfigError("--at: need a multiple of " + std::to_string(k) + " values");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < vals.size(); i += k) {
    out.push_back(Eigen::Map<const Vector>(vals.data() + i, static_cast<Eigen::Index>(k)));
  }
  return out;
}

inline std::vector<int> constraint_list(const RunConfig& rc, const std::vector<int>& given) {
  std::vector<int> out;
  if (given.empty()) {
    for (int i = 0; i < rc.sel.system.p(); ++i) out.push_back(i);
    return out;
  }
  for (int g : given) {
    if (g < 1 || g > rc.sel.system.p()) throw ConfigError("--constraint " + std::to_string(g) + " out of range");
    out.push_back(g - 1);
  }
  return out;
}

struct Candidates {
  std::vector<TangencyPoint> points;
  std::vector<bool> accepted;
  std::vector<std::string> reasons;
};

inline Candidates candidates(const RunConfig& rc, int i, const Vector& params) {
  const auto& sys = rc.sel.system;
  Candidates c;
  c.points = find_tangency_points_at(sys, i, params, rc.tangency);
  const FilterResult fr = filter_candidates(sys, c.points, rc.probe_length, rc.barrier);
  for (const auto& p : c.points) {
    std::string why;
    for (const auto& d : fr.discarded) {
      if ((d.point.z - p.z).norm() == 0.0) why = d.reason;
    }
    c.accepted.push_back(why.empty());
    c.reasons.push_back(why);
  }
  return c;
}

inline std::vector<BarrierTrajectory> accepted_arcs(const RunConfig& rc, int i, const Vector& params, int coord) {
  const Candidates c = candidates(rc, i, params);
  std::vector<BarrierTrajectory> out;
  for (std::size_t k = 0; k < c.points.size(); ++k) {
    if (!c.accepted[k]) continue;
    out.push_back(coord < 0 ? trace_barrier(rc.sel.system, c.points[k], rc.barrier)
                            : trace_barrier_reparam(rc.sel.system, c.points[k], rc.barrier, coord));
  }
  return out;
}

/// Tangency, filter, barriers and usable parts assembled into one slice.
inline AdmissibleSetSlice generic_slice(const RunConfig& rc, const Vector& params) {
  const auto& sys = rc.sel.system;
  std::vector<BarrierTrajectory> arcs;
  std::vector<UsableSegment> usable;
  for (int i = 0; i < sys.p(); ++i) {
    auto a = accepted_arcs(rc, i, params, -1);
    arcs.insert(arcs.end(), a.begin(), a.end());
    auto u = usable_part(sys, i, params, rc.slice);
    usable.insert(usable.end(), u.begin(), u.end());
  }
  return build_slice(sys, params, arcs, usable, rc.slice);
}

inline std::string index_name(const std::string& stem, std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%03zu", k);
  return stem + buf;
}

inline void write_slice(const fs::path& dir, const std::string& stem, const AdmissibleSetSlice& s,
                        const std::vector<std::string>& formats) {
  for (const auto& f : formats) {
    if (f == "json") io::write_file(dir / (stem + ".json"), io::to_json(s).dump(1) + "\n");
    else if (f == "csv") io::write_file(dir / (stem + ".csv"), io::slice_csv(s));
    else if (f == "svg") io::write_file(dir / (stem + ".svg"), io::slice_svg(s));
  }
}

inline json vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

/// Flipped-control copy of a barrier, used to show the residual check bites.
inline BarrierTrajectory flip_control(const ControlSystem& sys, BarrierTrajectory tr) {
  const Box& U = sys.control_box();
  for (auto& u : tr.u) u = U.lower() + U.upper() - u;
  return tr;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// subcommands

inline int cmd_tangency(RunConfig& rc, const std::vector<double>& at, const std::vector<int>& cons,
                        const std::string& out_file, std::ostream& out) {
  std::vector<TangencyPoint> pts;
  std::vector<bool> acc;
  bool ok = true;
  for (const Vector& prm : detail::parameter_list(rc, at)) {
    for (int i : detail::constraint_list(rc, cons)) {
      const auto c = detail::candidates(rc, i, prm);
      for (std::size_t k = 0; k < c.points.size(); ++k) {
        pts.push_back(c.points[k]);
        acc.push_back(c.accepted[k]);
        if (c.accepted[k] && std::max(std::abs(c.points[k].res_g), std::abs(c.points[k].res_lie)) >
                                 rc.tangency.residual_tol) {
          ok = false;
        }
      }
    }
  }
  const std::string csv = io::tangency_csv(pts, acc);
  if (out_file.empty()) out << csv;
  else io::write_file(out_file, csv);
  return ok ? kOk : kInvariantFailed;
}

inline int cmd_barrier(RunConfig& rc, const std::vector<double>& at, const std::vector<int>& cons, int reparam,
                       const std::string& out_dir, std::ostream& out) {
  if (reparam > rc.sel.system.n()) throw ConfigError("--reparam: coordinate out of range");
  rc.barrier.reject_drift = false;  // report instead of throwing
  json report = json::array();
  bool ok = true;
  std::size_t idx = 0;
  for (const Vector& prm : detail::parameter_list(rc, at)) {
    for (int i : detail::constraint_list(rc, cons)) {
      for (const auto& tr : detail::accepted_arcs(rc, i, prm, reparam - 1)) {
        const double h = tr.max_hamiltonian();
        ok = ok && h <= rc.barrier.hamiltonian_tol;
        json e = {{"param", detail::vec(prm)},
                  {"constraint", i + 1},
                  {"origin", detail::vec(tr.origin.z)},
                  {"parameterization", tr.coord < 0 ? "time" : "x" + std::to_string(tr.coord + 1)},
                  {"termination", to_string(tr.termination)},
                  {"end_reason", tr.end_reason},
                  {"x_end", detail::vec(tr.x_end())},
                  {"samples", tr.size()},
                  {"switches", tr.switching_times.size()},
                  {"max_H_residual", h}};
        if (!out_dir.empty()) {
          const std::string name = detail::index_name("barrier", idx) + ".csv";
          io::write_file(fs::path(out_dir) / name, io::trajectory_csv(tr));
          e["file"] = name;
        }
        report.push_back(e);
        ++idx;
      }
    }
  }
  // stdout carries the family manifest; the directory copy adds the settings echo
  if (!out_dir.empty()) {
    io::write_file(fs::path(out_dir) / "manifest.json",
                   json{{"barriers", report}, {"config", rc.echo()}}.dump(1) + "\n");
  }
  out << report.dump(1) << "\n";
  return ok ? kOk : kInvariantFailed;
}

inline int cmd_slice(RunConfig& rc, const std::vector<double>& at, bool section, const std::string& out_dir,
                     const std::vector<std::string>& formats, std::ostream& out) {
  std::vector<AdmissibleSetSlice> slices;
  bool ok = true;
  json errors = json::array();
  for (const Vector& prm : detail::parameter_list(rc, at)) {
    try {
      if (section) {
        if (prm.size() != 1) throw ConfigError("--section needs exactly one slice parameter");
        slices.push_back(build_section(rc.sel.system, prm[0], rc.section, rc.slice));
      } else {
        slices.push_back(detail::generic_slice(rc, prm));
      }
    } catch (const OpenBoundary& e) {
      ok = false;
      errors.push_back({{"params", detail::vec(prm)}, {"error", e.what()}});
      log::error("slice_open", {{"params", detail::vec(prm)}, {"message", e.what()}});
    }
  }
  if (out_dir.empty()) {
    out << io::to_json(slices).dump(1) << "\n";
  } else {
    for (std::size_t k = 0; k < slices.size(); ++k) {
      detail::write_slice(fs::path(out_dir) / "slices", detail::index_name("slice", k), slices[k], formats);
    }
    json areas = json::array();
    for (const auto& s : slices) areas.push_back({{"params", detail::vec(s.params)}, {"area", slice_area(s)}});
    out << json{{"slices", areas}, {"errors", errors}}.dump(1) << "\n";
  }
  return ok ? kOk : kInvariantFailed;
}

inline json check_needle_suite(const RunConfig& rc) {
  const auto& sys = rc.sel.system;
  if (!sys.domain().is_finite()) throw ConfigError("needle check: the state domain must be bounded");
  std::mt19937_64 rng(rc.seed);
  ode::Settings s;
  s.atol = 1e-13;
  s.rtol = 1e-12;
  json cases = json::array();
  bool pass = true;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int k = 0; k < rc.specs; ++k) {
    const auto c = verify::random_needle_case(sys, sys.domain(), rc.needle_horizon, rc.eps, rng);
    const auto r = verify::check_needle(sys, c.x0, c.base, c.spec, c.t_eval, s);
    const bool ok = r.exact_zero || (r.order >= rc.order_lo && r.order <= rc.order_hi);
    pass = pass && ok;
    if (!r.exact_zero) lo = std::min(lo, r.order), hi = std::max(hi, r.order);
    json e = verify::to_json(r);
    e["tau"] = c.spec.tau;
    e["l"] = c.spec.l;
    e["pass"] = ok;
    cases.push_back(e);
  }
  return {{"check", "needle"}, {"pass", pass}, {"order_range", {rc.order_lo, rc.order_hi}},
          {"order_min", std::isfinite(lo) ? json(lo) : json(nullptr)},
          {"order_max", std::isfinite(hi) ? json(hi) : json(nullptr)},
          {"cases", cases}};
}

inline json check_jacobian_suite(const RunConfig& rc) {
  const double err = verify::check_jacobian(rc.sel.system, rc.jacobian_samples, rc.seed);
  return {{"check", "jacobian"}, {"pass", err <= rc.jacobian_tol}, {"max_relative_error", err},
          {"tolerance", rc.jacobian_tol}, {"samples", rc.jacobian_samples}};
}

inline json check_hamiltonian_suite(RunConfig& rc, const std::vector<double>& at) {
  rc.barrier.reject_drift = false;
  json arcs = json::array();
  bool pass = true, power = true;
  for (const Vector& prm : detail::parameter_list(rc, at)) {
    for (int i = 0; i < rc.sel.system.p(); ++i) {
      for (const auto& tr : detail::accepted_arcs(rc, i, prm, -1)) {
        const auto r = verify::hamiltonian_residual(rc.sel.system, tr);
        const auto m = verify::hamiltonian_residual(rc.sel.system, detail::flip_control(rc.sel.system, tr));
        pass = pass && r.max_residual <= rc.barrier.hamiltonian_tol;
        power = power && m.max_residual > 10.0 * rc.barrier.hamiltonian_tol;
        json e = verify::to_json(r);
        e["params"] = detail::vec(prm);
        e["constraint"] = i + 1;
        e["mutated_max_residual"] = m.max_residual;
        arcs.push_back(e);
      }
    }
  }
  return {{"check", "hamiltonian"}, {"pass", pass && power}, {"residuals_ok", pass}, {"mutation_detected", power},
          {"tolerance", rc.barrier.hamiltonian_tol}, {"arcs", arcs}};
}

inline json check_permeability_suite(RunConfig& rc, const std::vector<double>& at) {
  rc.barrier.reject_drift = false;
  json arcs = json::array();
  bool pass = true;
  std::size_t probed = 0;
  for (const Vector& prm : detail::parameter_list(rc, at)) {
    for (int i = 0; i < rc.sel.system.p(); ++i) {
      for (const auto& tr : detail::accepted_arcs(rc, i, prm, -1)) {
        const auto r = verify::check_semipermeability(rc.sel.system, tr, rc.perm, rc.barrier);
        const bool ok = r.replay_within_tube && (r.probes == 0 || r.exit_fraction >= rc.min_exit_fraction);
        probed += r.probes > 0;
        pass = pass && ok;
        json e = verify::to_json(r);
        e["params"] = detail::vec(prm);
        e["constraint"] = i + 1;
        e["pass"] = ok;
        arcs.push_back(e);
      }
    }
  }
  return {{"check", "permeability"}, {"pass", pass && probed > 0}, {"min_exit_fraction", rc.min_exit_fraction},
          {"arcs", arcs}};
}

inline int cmd_verify(RunConfig& rc, const std::vector<double>& at, const std::string& out_dir, std::ostream& out) {
  std::vector<std::string> checks = rc.checks;
  if (checks.empty()) checks = {"jacobian", "needle", "hamiltonian", "permeability"};
  json reports = json::array();
  bool pass = true;
  for (const auto& c : checks) {
    json r;
    if (c == "needle") r = check_needle_suite(rc);
    else if (c == "jacobian") r = check_jacobian_suite(rc);
    else if (c == "hamiltonian") r = check_hamiltonian_suite(rc, at);
    else if (c == "permeability") r = check_permeability_suite(rc, at);
    else throw ConfigError("unknown check '" + c + "'");
    r["system"] = rc.sel.name;
    r["config"] = rc.echo();
    pass = pass && r.at("pass").get<bool>();
    if (!out_dir.empty()) io::write_file(fs::path(out_dir) / "verify" / (c + ".json"), r.dump(1) + "\n");
    reports.push_back(r);
  }
  out << (reports.size() == 1 ? reports[0] : reports).dump(1) << "\n";
  return pass ? kOk : kInvariantFailed;
}

inline acc::PipelineOptions pipeline_options(const RunConfig& rc) {
  acc::PipelineOptions o;
  o.params = rc.sel.acc;
  if (!rc.grid.empty()) o.grid = rc.grid;
  else o.grid = acc::default_grid(o.params, rc.grid_n.value_or(48));
  o.barrier = rc.barrier;
  o.slice = rc.slice;
  o.tangency = rc.tangency;
  o.probe_length = rc.probe_length;
  o.matched_points = rc.matched_points;
  o.dual_tol = rc.dual_tol;
  o.tangency_tol = rc.tangency_tol;
  o.junction_tol = rc.junction_tol;
  o.permeability = rc.run_permeability;
  o.perm = rc.perm;
  o.sections = rc.sections;
  o.section = rc.section;
  o.oracle_samples = rc.oracle_samples;
  o.oracle = rc.oracle;
  o.seed = rc.seed;
  return o;
}

/// Writes the output tree from the calling thread only.
inline void write_acc_tree(const fs::path& dir, acc::PipelineResult& r, const std::vector<std::string>& formats) {
  json& slices = r.manifest["slices"];
  for (std::size_t k = 0; k < r.slices.size(); ++k) {
    const auto& s = r.slices[k];
    json files = json::array();
    if (s.slice) {
      const std::string stem = detail::index_name("z1", k);
      detail::write_slice(dir / "slices", stem, *s.slice, formats);
      for (const auto& f : formats) files.push_back("slices/" + stem + "." + f);
    }
    if (s.section) {
      const std::string stem = detail::index_name("section", k);
      detail::write_slice(dir / "slices", stem, *s.section, formats);
      for (const auto& f : formats) files.push_back("slices/" + stem + "." + f);
    }
    const std::string vname = "verify/" + detail::index_name("checks", k) + ".json";
    io::write_file(dir / vname, json{{"z1", s.z1}, {"status", s.status}, {"checks", s.checks}}.dump(1) + "\n");
    files.push_back(vname);
    slices[k]["files"] = files;
  }
  io::write_file(dir / "manifest.json", r.manifest.dump(1) + "\n");
}

inline int cmd_acc(RunConfig& rc, const std::string& out_dir, const std::vector<std::string>& formats,
                   std::ostream& out) {
  if (rc.sel.name != "acc") throw ConfigError("acc: the system must be 'acc'");
  acc::PipelineResult r = acc::acc_pipeline(pipeline_options(rc));
  write_acc_tree(out_dir, r, formats);
  const json& sum = r.manifest.at("summary");
  out << sum.dump() << "\n";
  const bool ok = sum.at("failed").get<std::size_t>() == 0 && sum.at("check_failures").get<std::size_t>() == 0;
  return ok ? kOk : kInvariantFailed;
}

inline int cmd_export(const std::string& input, const std::string& out_dir, const std::vector<std::string>& formats,
                      std::ostream& out) {
  json j;
  try {
    j = json::parse(io::read_file(input));
  } catch (const json::parse_error& e) {
    throw ConfigError(input + ": " + e.what());
  }
  const auto slices = io::slices_from_json(j);
  std::vector<std::string> written;
  for (const auto& f : formats) {
    if (f == "json") {
      io::write_file(fs::path(out_dir) / "slices.json", io::to_json(slices).dump(1) + "\n");
      written.push_back("slices.json");
      continue;
    }
    for (std::size_t k = 0; k < slices.size(); ++k) {
      const std::string name = detail::index_name("slice", k) + "." + f;
      io::write_file(fs::path(out_dir) / name, f == "csv" ? io::slice_csv(slices[k]) : io::slice_svg(slices[k]));
      written.push_back(name);
    }
  }
  out << json{{"slices", slices.size()}, {"files", written}}.dump() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

/// argv[0] is the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"barrierkit: robust admissible set boundaries of constrained control systems", "barrierkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  RunConfig rc;
  std::string system_name, system_file, config_file, log_level = "warn";
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon, atol, rtol, max_step, residual_tol, hamiltonian_tol, stitch_tol, probe_length,
      eps_geo, tube_tol;
  std::optional<int> n_controls, n_probes, scan_points;
  std::vector<double> at;
  std::vector<int> cons;

  auto common = [&](CLI::App* sc) {
    sc->add_option("--system", system_name, "Compiled-in system")->check(CLI::IsMember(registry::system_names()));
    sc->add_option("--system-file", system_file, "System JSON: {system, params, control_box, disturbance_box}");
    sc->add_option("--config", config_file, "Run configuration JSON; flags override it");
    sc->add_option("--seed", seed, "Seed for every random sample");
    sc->add_option("--log-level", log_level, "debug, info, warn, error or off")
        ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));
    sc->add_option("--horizon", horizon, "Barrier horizon (time units)")->check(CLI::PositiveNumber);
    sc->add_option("--atol", atol, "Integrator absolute tolerance")->check(CLI::PositiveNumber);
    sc->add_option("--rtol", rtol, "Integrator relative tolerance")->check(CLI::PositiveNumber);
    sc->add_option("--max-step", max_step, "Integrator maximum step")->check(CLI::PositiveNumber);
    sc->add_option("--residual-tol", residual_tol, "Tangency residual tolerance")->check(CLI::PositiveNumber);
    sc->add_option("--hamiltonian-tol", hamiltonian_tol, "Bound on |lambda^T f|")->check(CLI::PositiveNumber);
    sc->add_option("--stitch-tol", stitch_tol, "Slice stitching tolerance")->check(CLI::PositiveNumber);
    sc->add_option("--probe-length", probe_length, "Candidate filter probe length")->check(CLI::PositiveNumber);
    sc->add_option("--scan-points", scan_points, "Tangency scan resolution")->check(CLI::PositiveNumber);
  };
  auto at_opt = [&](CLI::App* sc) {
    sc->add_option("--at", at, "Slice parameter values (comma separated)")->delimiter(',');
  };

  auto* tangency = app.add_subcommand("tangency", "Ultimate tangency points, as CSV");
  common(tangency);
  at_opt(tangency);
  tangency->add_option("--constraint", cons, "Constraint indices, 1-based")->delimiter(',');
  std::string tan_out;
  tangency->add_option("--out", tan_out, "Output CSV file (default: stdout)");

  auto* barrier = app.add_subcommand("barrier", "Barrier trajectories from accepted tangency points");
  common(barrier);
  at_opt(barrier);
  barrier->add_option("--constraint", cons, "Constraint indices, 1-based")->delimiter(',');
  int reparam = 0;
  barrier->add_option("--reparam", reparam, "Integrate against state coordinate k (1-based); 0 for time");
  std::string bar_out;
  barrier->add_option("--out", bar_out, "Directory for trajectory CSV files");

  std::vector<std::string> formats = {"csv", "json", "svg"};
  auto fmt_opt = [&](CLI::App* sc) {
    sc->add_option("--format", formats, "Output formats")
        ->delimiter(',')
        ->check(CLI::IsMember({"csv", "json", "svg"}));
  };

  auto* slice = app.add_subcommand("slice", "Admissible set slices");
  common(slice);
  at_opt(slice);
  bool section = false;
  slice->add_flag("--section", section, "True cross-section through the fixed coordinate instead of a projection");
  std::string slice_out;
  slice->add_option("--out", slice_out, "Output directory (default: JSON on stdout)");
  fmt_opt(slice);

  auto* verify = app.add_subcommand("verify", "Verification checks with a JSON report");
  common(verify);
  at_opt(verify);
  verify->add_option("--check", rc.checks, "needle, permeability, jacobian or hamiltonian")
      ->delimiter(',')
      ->check(CLI::IsMember({"needle", "permeability", "jacobian", "hamiltonian"}));
  std::optional<std::vector<double>> eps;
  std::optional<int> specs, jac_samples;
  verify->add_option("--eps", eps, "Needle widths (comma separated)")->delimiter(',');
  verify->add_option("--specs", specs, "Random needle specifications")->check(CLI::PositiveNumber);
  verify->add_option("--samples", jac_samples, "Jacobian sample states")->check(CLI::PositiveNumber);
  verify->add_option("--eps-geo", eps_geo, "Outside probe offset")->check(CLI::PositiveNumber);
  verify->add_option("--tube-tol", tube_tol, "Replay tube tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--n-controls", n_controls, "Candidate controls per probe")->check(CLI::PositiveNumber);
  verify->add_option("--n-probes", n_probes, "Outside probes per barrier")->check(CLI::PositiveNumber);
  std::string ver_out;
  verify->add_option("--out", ver_out, "Output directory; reports go to <out>/verify/");

  auto* accc = app.add_subcommand("acc", "Adaptive cruise control case study over a speed grid");
  common(accc);
  std::optional<int> grid_n;
  std::string params_file;
  accc->add_option("--grid", grid_n, "Number of uniformly spaced leader speeds")->check(CLI::NonNegativeNumber);
  accc->add_option("--at", at, "Explicit leader speeds")->delimiter(',');
  accc->add_option("--params", params_file, "ACC parameter JSON");
  bool sections = false;
  accc->add_flag("--sections", sections, "Also compute cross-sections and the Monte-Carlo agreement");
  std::string acc_out = "out";
  accc->add_option("--out", acc_out, "Output directory");
  fmt_opt(accc);

  auto* exp = app.add_subcommand("export", "Re-render saved slice JSON");
  std::string exp_in, exp_out = ".";
  exp->add_option("--input", exp_in, "Slice JSON (one object or an array)")->required();
  exp->add_option("--out", exp_out, "Output directory");
  fmt_opt(exp);
  exp->add_option("--log-level", log_level, "debug, info, warn, error or off")
      ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kUsage;
  }

  const std::map<std::string, log::Level> levels = {{"debug", log::Level::Debug}, {"info", log::Level::Info},
                                                    {"warn", log::Level::Warn},   {"error", log::Level::Error},
                                                    {"off", log::Level::Off}};
  log::set_level(levels.at(log_level));

  try {
    if (exp->parsed()) return cmd_export(exp_in, exp_out, formats, out);

    if (!config_file.empty()) detail::apply_file(rc, detail::read_json_file(config_file));
    if (!system_file.empty()) rc.system_file = detail::read_json_file(system_file);
    if (!system_name.empty()) {
      if (!system_file.empty() && rc.system_file.value("system", "") != system_name) {
        throw ConfigError("--system disagrees with --system-file");
      }
      if (rc.system_file.value("system", "") != system_name) rc.system_file = json{{"system", system_name}};
    }
    if (!params_file.empty()) {
      if (rc.system_file.value("system", "") != "acc") throw ConfigError("--params is for the acc system");
      rc.system_file["params"] = detail::read_json_file(params_file);
    }
    if (seed) rc.seed = *seed;
    if (horizon) rc.barrier.horizon = *horizon;
    if (atol) rc.barrier.ode.atol = *atol;
    if (rtol) rc.barrier.ode.rtol = *rtol;
    if (max_step) rc.barrier.ode.max_step = *max_step;
    if (residual_tol) rc.tangency.residual_tol = *residual_tol;
    if (hamiltonian_tol) rc.barrier.hamiltonian_tol = *hamiltonian_tol;
    if (stitch_tol) rc.slice.stitch_tol = *stitch_tol;
    if (probe_length) rc.probe_length = *probe_length;
    if (scan_points) rc.tangency.scan_points = *scan_points;
    if (eps_geo) rc.perm.eps_geo = *eps_geo;
    if (tube_tol) rc.perm.tube_tol = *tube_tol;
    if (n_controls) rc.perm.n_controls = *n_controls;
    if (n_probes) rc.perm.n_probes = *n_probes;
    if (eps) rc.eps = *eps;
    if (specs) rc.specs = *specs;
    if (jac_samples) rc.jacobian_samples = *jac_samples;
    if (grid_n) rc.grid_n = *grid_n, rc.grid.clear();
    if (sections) rc.sections = true;
    detail::resolve_system(rc);

    if (tangency->parsed()) return cmd_tangency(rc, at, cons, tan_out, out);
    if (barrier->parsed()) return cmd_barrier(rc, at, cons, reparam, bar_out, out);
    if (slice->parsed()) return cmd_slice(rc, at, section, slice_out, formats, out);
    if (verify->parsed()) return cmd_verify(rc, at, ver_out, out);
    if (accc->parsed()) {
      if (!at.empty()) rc.grid = at;
      return cmd_acc(rc, acc_out, formats, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kUsage;
  } catch (const std::exception& e) {
    log::error("failed", {{"message", e.what()}});
    err << "error: " << e.what() << "\n";
    return kInvariantFailed;
  }
  return kUsage;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace barrierkit::cli

#endif  // BARRIERKIT_CLI_HPP
