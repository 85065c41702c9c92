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

#ifndef BARRIERKIT_FILTER_HPP
#define BARRIERKIT_FILTER_HPP

// Discards tangency candidates whose backward barrier immediately enters the
// complement of the constraint set. Such points solve the tangency equations
// but approach the boundary from outside.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "barrierkit/barrier.hpp"
#include "barrierkit/parallel.hpp"
#include "barrierkit/sysmodel.hpp"
#include "barrierkit/tangency.hpp"

namespace barrierkit {

struct DiscardedCandidate {
  TangencyPoint point;
  std::string reason;
};

struct FilterResult {
  std::vector<TangencyPoint> accepted;
  std::vector<DiscardedCandidate> discarded;
};

/// Default probe length: 1% of the state domain diameter.
inline double default_probe_length(const ControlSystem& sys) {
  const Box& b = sys.domain();
  if (!b.is_finite()) throw ConfigError("default_probe_length: unbounded state domain");
  return 0.01 * (b.upper() - b.lower()).norm();
}

inline FilterResult filter_candidates(const ControlSystem& sys,
                                      const std::vector<TangencyPoint>& candidates,
                                      double probe_len, const BarrierSettings& settings,
                                      double boundary_tol = 1e-8) {
  if (!(probe_len > 0.0)) throw std::invalid_argument("filter_candidates: probe_len must be positive");
  BarrierSettings probe = settings;
  probe.max_arclength = probe_len;
  probe.stop_at_domain = false;
  // stopping at a crossing from inside keeps legitimate arcs that reach
  // another constraint within the probe; spurious ones leave through g_i*
  // right at the start, where no crossing from below is registered
  probe.stop_at_constraints = true;
  probe.reject_drift = false;
  const double g_tol = settings.g_tol;

  auto verdict = [&](const TangencyPoint& tp) -> std::string {
    const double gi = sys.constraint(tp.active_index).value(tp.z);
    if (std::abs(gi) > boundary_tol) return "not_on_boundary";
    std::vector<std::string> why;
    if (!sys.domain().contains(tp.z, 1e-9 * std::max(1.0, tp.z.lpNorm<Eigen::Infinity>()))) {
      why.push_back("outside_domain");
    }
    if (max_constraint(sys, tp.z) > g_tol) why.push_back("violates_constraint");
    try {
      const BarrierTrajectory tr = trace_barrier(sys, tp, probe);
      double worst = -std::numeric_limits<double>::infinity();
      for (const Vector& xk : tr.x) worst = std::max(worst, max_constraint(sys, xk));
      if (worst > g_tol) why.push_back("probe_enters_complement");
    } catch (const Error& e) {
      why.push_back(std::string("probe_failed: ") + e.what());
    }
    std::string out;
    for (const auto& w : why) out += (out.empty() ? "" : ",") + w;
    return out;
  };

  const auto verdicts = parallel_map(candidates, verdict);
  FilterResult r;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (verdicts[k].empty()) {
      r.accepted.push_back(candidates[k]);
    } else {
      r.discarded.push_back({candidates[k], verdicts[k]});
    }
  }
  return r;
}

}  // namespace barrierkit

#endif  // BARRIERKIT_FILTER_HPP
