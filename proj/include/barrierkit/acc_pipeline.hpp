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

#ifndef BARRIERKIT_ACC_PIPELINE_HPP
#define BARRIERKIT_ACC_PIPELINE_HPP

// End-to-end adaptive cruise control run: closed-form tangency points, probe
// filtering, barrier arcs parameterized by the leader speed, usable parts,
// slice assembly and the verification checks, one slice per grid value.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "barrierkit/acc_model.hpp"
#include "barrierkit/assemble.hpp"
#include "barrierkit/barrier.hpp"
#include "barrierkit/config.hpp"
#include "barrierkit/errors.hpp"
#include "barrierkit/filter.hpp"
#include "barrierkit/log.hpp"
#include "barrierkit/parallel.hpp"
#include "barrierkit/saddle.hpp"
#include "barrierkit/section.hpp"
#include "barrierkit/tangency.hpp"
#include "barrierkit/verify.hpp"

namespace barrierkit::acc {

namespace detail {

inline TangencyPoint finish_point(const ControlSystem& sys, int i, double z1, Vector z) {
  TangencyPoint tp;
  tp.z = std::move(z);
  tp.active_index = i;
  tp.params = Vector::Constant(1, z1);
  const SaddleResult sr = saddle_lie(sys, tp.z, ActiveSet{{i}, 1.0});
  tp.u_star = sr.u_star;
  tp.d_star = sr.d_star;
  tp.res_g = sys.constraint(i).value(tp.z);
  tp.res_lie = sr.value;
  return tp;
}

inline void check_z1(const AccParameters& p, double z1, const char* who) {
  const double xh = acc_speed_bound(p);
  if (!(z1 >= 0.0 && z1 <= xh)) {
    throw std::out_of_range(std::string(who) + ": z1 = " + std::to_string(z1) + " outside [0, " +
                            std::to_string(xh) + "]");
  }
}

}  // namespace detail

/// Both headway tangency candidates at leader speed z1, smaller root first.
inline std::vector<TangencyPoint> acc_tangency_g1(const AccParameters& p, double z1) {
  const HeadwayRoots r = acc_tangency_g1_roots(p, z1);
  const ControlSystem sys = acc_system(p);
  std::vector<TangencyPoint> out;
  for (std::size_t k = 0; k < r.z2.size(); ++k) {
    Vector z(3);
    z << z1, r.z2[k], r.z3(k);
    out.push_back(detail::finish_point(sys, 0, z1, std::move(z)));
  }
  return out;
}

/// Maximum-distance tangency point (z1, z1, d_max).
inline TangencyPoint acc_tangency_g2(const AccParameters& p, double z1) {
  detail::check_z1(p, z1, "acc_tangency_g2");
  Vector z(3);
  z << z1, z1, p.d_max;
  return detail::finish_point(acc_system(p), 1, z1, std::move(z));
}

/// Default grid: n values spread evenly over [0, x_hat].
inline std::vector<double> default_grid(const AccParameters& p, int n = 48) {
  const double xh = acc_speed_bound(p);
  std::vector<double> g;
  for (int k = 0; k < n; ++k) g.push_back(n == 1 ? 0.0 : xh * k / (n - 1));
  return g;
}

struct PipelineOptions {
  AccParameters params;
  std::vector<double> grid;  // empty grid: nothing to do
  BarrierSettings barrier = [] {
    BarrierSettings b;
    b.horizon = 1000.0;
    return b;
  }();
  SliceSettings slice = [] {
    SliceSettings s;
    s.fixed_coords = {0};
    return s;
  }();
  TangencySettings tangency;  // generic cross-check; the search box is set from the parameters
  double probe_length = 0.0;  // <= 0: 1% of the domain diameter
  int matched_points = 50;    // time versus reparameterized comparison
  double dual_tol = 1e-6;
  double tangency_tol = 1e-8;
  double junction_tol = 1e-3;
  bool permeability = true;
  verify::PermeabilitySettings perm;
  bool sections = false;  // cross-sections at x1 = z1 plus the Monte-Carlo oracle
  SectionSettings section;
  int oracle_samples = 500;
  verify::OracleSettings oracle;
  std::uint64_t seed = 1;
};

/// Tangency search box: wide enough in x2 and x3 that far roots are found
/// and then discarded by the filter rather than silently missed.
inline Box tangency_search_box(const AccParameters& p) {
  const double xh = acc_speed_bound(p);
  return Box::from({{0.0, xh}, {0.0, 100.0 * xh}, {0.0, 200.0 * xh}});
}

struct SliceResult {
  double z1 = 0.0;
  std::string status = "ok";  // ok, empty or failed
  std::string error;
  std::vector<TangencyPoint> candidates;
  std::vector<std::string> verdicts;  // empty string: accepted
  std::vector<BarrierTrajectory> arcs;       // as used in the slice
  std::vector<BarrierTrajectory> time_arcs;  // time-parameterized twins
  std::vector<UsableSegment> usable;
  std::optional<AdmissibleSetSlice> slice;
  std::optional<AdmissibleSetSlice> section;
  double area = 0.0;
  nlohmann::json checks = nlohmann::json::object();
  std::vector<std::string> diagnostics;
};

struct PipelineResult {
  std::vector<SliceResult> slices;
  nlohmann::json manifest;
};

namespace detail {

// Expected constant inputs and lambda_3 along each branch.
struct BranchSigns {
  double u, d1, d2, lambda3;
};

inline BranchSigns expected_signs(const AccParameters& p, int branch) {
  if (branch == 0) return {p.u_min, p.d1_min, p.d2_max, -1.0};
  return {p.u_max, p.d1_max, p.d2_min, 1.0};
}

inline nlohmann::json sign_trace(const AccParameters& p, const BarrierTrajectory& tr) {
  const BranchSigns e = expected_signs(p, tr.origin.active_index);
  std::size_t bad_inputs = 0, checked = 0;
  double lam3_dev = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    lam3_dev = std::max(lam3_dev, std::abs(tr.lambda[k][2] - e.lambda3));
    if (!(tr.t[k] < 0.0)) continue;  // inputs at the tangency point itself are not constrained
    ++checked;
    if (tr.u[k][0] != e.u || tr.d[k][0] != e.d1 || tr.d[k][1] != e.d2) ++bad_inputs;
  }
  return {{"samples_checked", checked},
          {"input_mismatches", bad_inputs},
          {"lambda3_deviation", lam3_dev},
          {"switches", tr.switching_times.size()},
          {"pass", bad_inputs == 0 && lam3_dev <= 1e-12}};
}

// max |(x2, x3)_time - (x2, x3)_reparam| at matched x1 values
inline double dual_deviation(const BarrierTrajectory& rep, const BarrierTrajectory& tim, int matched) {
  if (rep.size() < 2 || tim.size() < 2) return 0.0;
  auto range = [](const BarrierTrajectory& tr) {
    double lo = tr.x.front()[0], hi = lo;
    for (const Vector& x : tr.x) lo = std::min(lo, x[0]), hi = std::max(hi, x[0]);
    return std::pair{lo, hi};
  };
  const auto [a0, a1] = range(rep);
  const auto [b0, b1] = range(tim);
  const double lo = std::max(a0, b0), hi = std::min(a1, b1);
  if (!(hi > lo)) return 0.0;
  double dev = 0.0;
  for (int k = 0; k < matched; ++k) {
    const double v = lo + (hi - lo) * (k + 0.5) / matched;
    const auto ya = rep.locate(0, v), yb = tim.locate(0, v);
    if (!ya || !yb) continue;
    dev = std::max({dev, std::abs((*ya)[1] - (*yb)[1]), std::abs((*ya)[2] - (*yb)[2])});
  }
  return dev;
}

inline nlohmann::json oracle_agreement(const ControlSystem& sys, const AdmissibleSetSlice& sec, int samples,
                                       const verify::OracleSettings& os, std::uint64_t seed) {
  const auto poly = sec.polygon();
  Point2 lo = poly.front(), hi = poly.front();
  for (const auto& q : poly) lo = lo.cwiseMin(q), hi = hi.cwiseMax(q);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
  std::vector<Vector> pts;
  long tries = 0;
  while (static_cast<int>(pts.size()) < samples && tries < 10000L * samples) {
    ++tries;
    const Point2 q(ux(rng), uy(rng));
    if (contains(sec, q).where != Containment::Inside) continue;
    Vector x(3);
    x << sec.parameter(), q.x(), q.y();
    pts.push_back(x);
  }
  const auto ok = parallel_map(pts, [&](const Vector& x) { return verify::admissible_under_feedback(sys, x, os) ? 1 : 0; });
  long agree = 0;
  for (int v : ok) agree += v;
  const double frac = pts.empty() ? 0.0 : static_cast<double>(agree) / pts.size();
  return {{"samples", pts.size()}, {"admissible", agree}, {"agreement", frac}};
}

inline SliceResult run_slice(const AccParameters& p, const ControlSystem& sys, double z1, std::size_t index,
                             const PipelineOptions& o) {
  SliceResult r;
  r.z1 = z1;
  const double probe = o.probe_length > 0.0 ? o.probe_length : default_probe_length(sys);
  try {
    // tangency candidates from the closed forms
    try {
      auto g1 = acc_tangency_g1(p, z1);
      r.candidates.insert(r.candidates.end(), g1.begin(), g1.end());
    } catch (const NoRoot& e) {
      r.diagnostics.push_back(std::string("g1: ") + e.what());
    }
    r.candidates.push_back(acc_tangency_g2(p, z1));
    const FilterResult fr = filter_candidates(sys, r.candidates, probe, o.barrier);
    for (const auto& c : r.candidates) {
      std::string why;
      for (const auto& d : fr.discarded) {
        if ((d.point.z - c.z).norm() == 0.0 && d.point.active_index == c.active_index) why = d.reason;
      }
      r.verdicts.push_back(why);
    }

    // generic search as an independent cross-check of the closed forms
    double cross = 0.0;
    for (const auto& c : fr.accepted) {
      double best = std::numeric_limits<double>::infinity();
      try {
        for (const auto& g : find_tangency_points_at(sys, c.active_index, Vector::Constant(1, z1), o.tangency)) {
          best = std::min(best, (g.z - c.z).lpNorm<Eigen::Infinity>() / std::max(1.0, c.z.lpNorm<Eigen::Infinity>()));
        }
      } catch (const Error& e) {
        r.diagnostics.push_back(std::string("generic tangency search: ") + e.what());
      }
      cross = std::max(cross, best);
    }
    double res = 0.0;
    for (const auto& c : fr.accepted) res = std::max({res, std::abs(c.res_g), std::abs(c.res_lie)});
    r.checks["tangency"] = {{"max_residual", res},
                            {"generic_agreement", fr.accepted.empty() ? nlohmann::json(nullptr) : config::detail::num(cross)},
                            {"pass", res <= o.tangency_tol && (fr.accepted.empty() || cross <= o.tangency_tol)}};

    if (fr.accepted.empty()) {
      r.status = "empty";
      r.diagnostics.push_back("no tangency point survives filtering: the slice is empty");
      return r;
    }

    // barrier arcs, reparameterized in x1 when the denominator allows it
    for (const auto& tp : fr.accepted) {
      BarrierTrajectory tim = trace_barrier(sys, tp, o.barrier);
      try {
        r.arcs.push_back(trace_barrier_reparam(sys, tp, o.barrier, 0));
      } catch (const DenominatorSingular& e) {
        r.diagnostics.push_back(std::string("reparameterization fell back to time: ") + e.what());
        r.arcs.push_back(tim);
      }
      r.time_arcs.push_back(std::move(tim));
    }

    for (int i = 0; i < sys.p(); ++i) {
      auto part = usable_part(sys, i, Vector::Constant(1, z1), o.slice);
      r.usable.insert(r.usable.end(), part.begin(), part.end());
    }
    r.slice = build_slice(sys, Vector::Constant(1, z1), r.arcs, r.usable, o.slice);
    r.area = slice_area(*r.slice);
    r.diagnostics.insert(r.diagnostics.end(), r.slice->diagnostics.begin(), r.slice->diagnostics.end());

    // checks
    double ham = 0.0, dual = 0.0;
    nlohmann::json signs = nlohmann::json::array();
    bool signs_ok = true;
    for (std::size_t k = 0; k < r.arcs.size(); ++k) {
      ham = std::max({ham, verify::hamiltonian_residual(sys, r.arcs[k]).max_residual,
                      verify::hamiltonian_residual(sys, r.time_arcs[k]).max_residual});
      if (r.arcs[k].coord == 0) dual = std::max(dual, dual_deviation(r.arcs[k], r.time_arcs[k], o.matched_points));
      auto st = sign_trace(p, r.arcs[k]);
      signs_ok &= st["pass"].get<bool>();
      signs.push_back(std::move(st));
    }
    r.checks["hamiltonian"] = {{"max_residual", ham}, {"pass", ham <= o.barrier.hamiltonian_tol}};
    r.checks["dual_parameterization"] = {{"max_deviation", dual}, {"matched_points", o.matched_points},
                                         {"pass", dual <= o.dual_tol}};
    r.checks["signs"] = {{"arcs", signs}, {"pass", signs_ok}};
    double jmax = 0.0;
    for (const auto& j : r.slice->junctions) jmax = std::max(jmax, j.angle);
    r.checks["junctions"] = {{"count", r.slice->junctions.size()}, {"max_angle", jmax}, {"pass", jmax <= o.junction_tol}};

    if (o.permeability) {
      nlohmann::json reps = nlohmann::json::array();
      double worst = 1.0, dev = 0.0;
      for (std::size_t k = 0; k < r.time_arcs.size(); ++k) {
        verify::PermeabilitySettings ps = o.perm;
        ps.seed = o.seed * 1000003ULL + index * 16ULL + k;
        const auto rep = verify::check_semipermeability(sys, r.time_arcs[k], ps, o.barrier);
        if (rep.probes > 0) worst = std::min(worst, rep.exit_fraction);  // one-sample arcs carry no probes
        dev = std::max(dev, rep.replay_deviation);
        reps.push_back(verify::to_json(rep));
      }
      r.checks["permeability"] = {{"reports", reps}, {"min_exit_fraction", worst}, {"max_replay_deviation", dev},
                                  {"pass", worst >= 0.95 && dev <= o.perm.tube_tol}};
    }
  } catch (const std::exception& e) {
    r.status = "failed";
    r.error = e.what();
    log::warn("slice_failed", {{"z1", z1}, {"error", r.error}});
    return r;
  }

  if (o.sections) {
    try {
      SectionSettings ss = o.section;
      ss.tangency = o.tangency;
      ss.barrier = o.barrier;
      ss.barrier.reject_drift = false;
      if (!(ss.probe_length > 0.0)) ss.probe_length = probe;
      r.section = build_section(sys, z1, ss, o.slice);
      auto ag = oracle_agreement(sys, *r.section, o.oracle_samples, o.oracle, o.seed * 7919ULL + index);
      ag["area"] = slice_area(*r.section);
      ag["pass"] = ag["agreement"].get<double>() >= 0.95;
      r.checks["section"] = std::move(ag);
    } catch (const Error& e) {
      r.checks["section"] = {{"error", e.what()}};
    }
  }
  return r;
}

inline nlohmann::json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline nlohmann::json slice_summary(const SliceResult& r) {
  nlohmann::json cands = nlohmann::json::array();
  for (std::size_t k = 0; k < r.candidates.size(); ++k) {
    const auto& c = r.candidates[k];
    cands.push_back({{"z", vec_json(c.z)},
                     {"constraint", c.active_index + 1},
                     {"u_star", vec_json(c.u_star)},
                     {"d_star", vec_json(c.d_star)},
                     {"res_g", c.res_g},
                     {"res_lie", c.res_lie},
                     {"accepted", r.verdicts[k].empty()},
                     {"reason", r.verdicts[k]}});
  }
  nlohmann::json arcs = nlohmann::json::array();
  for (const auto& a : r.arcs) {
    arcs.push_back({{"constraint", a.origin.active_index + 1},
                    {"origin", vec_json(a.origin.z)},
                    {"parameterization", a.coord < 0 ? "time" : "x" + std::to_string(a.coord + 1)},
                    {"samples", a.size()},
                    {"termination", to_string(a.termination)},
                    {"end_reason", a.end_reason},
                    {"x_end", vec_json(a.x_end())},
                    {"t_end", a.t.back()},
                    {"max_H_residual", a.max_hamiltonian()}});
  }
  nlohmann::json out = {{"z1", r.z1},       {"status", r.status},   {"candidates", cands},
                        {"arcs", arcs},     {"area", r.area},       {"checks", r.checks},
                        {"diagnostics", r.diagnostics}};
  if (!r.error.empty()) out["error"] = r.error;
  if (r.slice) {
    nlohmann::json js = nlohmann::json::array();
    for (const auto& j : r.slice->junctions) {
      js.push_back({{"point", {j.point.x(), j.point.y()}}, {"constraint", j.constraint + 1}, {"angle", j.angle}});
    }
    out["junctions"] = js;
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : r.slice->segments) segs.push_back({{"tag", to_string(s.tag)}, {"label", s.label}, {"points", s.points.size()}});
    out["segments"] = segs;
  }
  return out;
}

}  // namespace detail

inline nlohmann::json options_json(const PipelineOptions& o) {
  return {{"params", config::to_json(o.params)},
          {"grid", o.grid},
          {"barrier", config::to_json(o.barrier)},
          {"slice", config::to_json(o.slice)},
          {"tangency", config::to_json(o.tangency)},
          {"probe_length", o.probe_length},
          {"matched_points", o.matched_points},
          {"dual_tol", o.dual_tol},
          {"tangency_tol", o.tangency_tol},
          {"junction_tol", o.junction_tol},
          {"permeability", o.permeability},
          {"perm", config::to_json(o.perm)},
          {"sections", o.sections},
          {"section", config::to_json(o.section)},
          {"oracle_samples", o.oracle_samples},
          {"oracle", config::to_json(o.oracle)},
          {"seed", o.seed}};
}

/// Runs every grid value; a failing slice is recorded and the run goes on.
inline PipelineResult acc_pipeline(PipelineOptions o) {
  const AccParameters& p = o.params;
  const ControlSystem sys = acc_system(p);
  const double xh = acc_speed_bound(p);
  for (double z : o.grid) {
    if (!(z >= 0.0 && z <= xh)) throw ConfigError("acc_pipeline: grid value " + std::to_string(z) + " outside [0, x_hat]");
  }
  if (o.tangency.fixed_coords.empty()) o.tangency.fixed_coords = {0};
  if (!o.tangency.search_box) o.tangency.search_box = tangency_search_box(p);
  if (o.probe_length <= 0.0) o.probe_length = default_probe_length(sys);

  std::vector<std::size_t> idx(o.grid.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  PipelineResult out;
  out.slices = parallel_map(idx, [&](std::size_t k) { return detail::run_slice(p, sys, o.grid[k], k, o); });

  nlohmann::json slices = nlohmann::json::array();
  std::size_t ok = 0, empty = 0, failed = 0, check_failures = 0;
  for (const auto& s : out.slices) {
    slices.push_back(detail::slice_summary(s));
    ok += s.status == "ok", empty += s.status == "empty", failed += s.status == "failed";
    for (auto it = s.checks.begin(); it != s.checks.end(); ++it) {
      if (it->contains("pass") && !(*it)["pass"].get<bool>()) ++check_failures;
    }
  }
  // areas in grid order, for the monotonicity observation
  bool monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& s : out.slices) {
    if (s.status == "failed") continue;
    if (s.area > prev) monotone = false;
    prev = s.area;
  }
  out.manifest = {{"tool", "barrierkit"},
                  {"system", "acc"},
                  {"x_hat", xh},
                  {"config", options_json(o)},
                  {"assumptions",
                   {{"usable_part_exact", true},
                    {"note", "the usable-part condition min_u max_d Lf g <= 0 is treated as exact although it only "
                             "contains the usable part; (A2)/(A3) are not certified"}}},
                  {"slices", slices},
                  {"summary",
                   {{"slices", out.slices.size()},
                    {"ok", ok},
                    {"empty", empty},
                    {"failed", failed},
                    {"check_failures", check_failures},
                    {"area_non_increasing", monotone}}}};
  return out;
}

}  // namespace barrierkit::acc

#endif  // BARRIERKIT_ACC_PIPELINE_HPP
