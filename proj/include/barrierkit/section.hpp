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

#ifndef BARRIERKIT_SECTION_HPP
#define BARRIERKIT_SECTION_HPP

// Cross-sections of the admissible set boundary at x_c = v.
//
// A projection slice shows the arcs that start at x_c = v, wherever they
// go. The cross-section keeps the points where the whole family meets the
// plane x_c = v: for each tangency branch the family parameter is walked
// away from v and every arc is located at the plane. The walk ends where
// arcs stop reaching the plane; the end point is refined by bisection, so
// it lies where an arc lands on a constraint or a face exactly at x_c = v.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "barrierkit/assemble.hpp"
#include "barrierkit/barrier.hpp"
#include "barrierkit/errors.hpp"
#include "barrierkit/filter.hpp"
#include "barrierkit/log.hpp"
#include "barrierkit/tangency.hpp"

namespace barrierkit {

struct SectionSettings {
  TangencySettings tangency;  // exactly one fixed coordinate
  BarrierSettings barrier;
  double probe_length = 0.0;  // <= 0: default_probe_length
  int steps = 400;            // parameter steps across the domain range of x_c
  int bisections = 48;
  double jump_tol = 0.05;     // branch continuity, as a fraction of the domain diameter
};

struct SectionCurves {
  std::vector<BoundaryCurve> curves;
  std::vector<std::string> diagnostics;
};

namespace detail {

inline std::optional<TangencyPoint> branch_member(const ControlSystem& sys, int i, double zp,
                                                  const Vector& near, double jump,
                                                  const SectionSettings& ss, double probe) {
  std::vector<TangencyPoint> cands;
  try {
    cands = find_tangency_points_at(sys, i, Vector::Constant(1, zp), ss.tangency);
  } catch (const NoRoot&) {
    return std::nullopt;
  } catch (const Degenerate&) {
    return std::nullopt;
  }
  std::vector<TangencyPoint> close;
  for (auto& c : cands) {
    if ((c.z - near).norm() <= jump) close.push_back(c);
  }
  if (close.empty()) return std::nullopt;
  const FilterResult fr = filter_candidates(sys, close, probe, ss.barrier);
  std::optional<TangencyPoint> best;
  for (const auto& c : fr.accepted) {
    if (!best || (c.z - near).norm() < (best->z - near).norm()) best = c;
  }
  return best;
}

}  // namespace detail

/// Section curves through every accepted tangency point at x_c = value.
inline SectionCurves section_curves(const ControlSystem& sys, double value, const SectionSettings& ss) {
  if (ss.tangency.fixed_coords.size() != 1) {
    throw std::invalid_argument("section_curves: exactly one fixed coordinate");
  }
  if (!(ss.steps > 1)) throw std::invalid_argument("section_curves: steps must exceed 1");
  const int c = ss.tangency.fixed_coords.front();
  const Box& dom = sys.domain();
  if (!dom.is_finite()) throw ConfigError("section_curves: unbounded state domain");
  const double probe = ss.probe_length > 0.0 ? ss.probe_length : default_probe_length(sys);
  const double jump = ss.jump_tol * (dom.upper() - dom.lower()).norm();
  const double h = (dom.upper(c) - dom.lower(c)) / ss.steps;

  SectionCurves out;
  for (int i = 0; i < sys.p(); ++i) {
    std::vector<TangencyPoint> origins;
    try {
      origins = filter_candidates(sys, find_tangency_points_at(sys, i, Vector::Constant(1, value), ss.tangency),
                                  probe, ss.barrier).accepted;
    } catch (const NoRoot&) {
      continue;
    } catch (const Degenerate& e) {
      out.diagnostics.push_back(std::string("g") + std::to_string(i + 1) + ": " + e.what());
      continue;
    }
    for (const TangencyPoint& o : origins) {
      // the plane point of the arc born at parameter zp, continuing from tp
      auto hit = [&](double zp, const Vector& near) -> std::optional<std::pair<TangencyPoint, Vector>> {
        if (zp < dom.lower(c) || zp > dom.upper(c)) return std::nullopt;
        auto tp = detail::branch_member(sys, i, zp, near, jump, ss, probe);
        if (!tp) return std::nullopt;
        try {
          const BarrierTrajectory tr = trace_barrier(sys, *tp, ss.barrier);
          auto y = tr.locate(c, value);
          if (!y) return std::nullopt;
          return std::make_pair(*tp, Vector(*y));
        } catch (const Error&) {
          return std::nullopt;
        }
      };
      BoundaryCurve curve{o, {o.z}};
      for (double dir : {1.0, -1.0}) {
        Vector near = o.z;
        double good = value;
        bool walked = false;
        // geometric first steps resolve the curve near the tangency point
        std::vector<double> offsets{h / 256, h / 64, h / 16, h / 4};
        for (int k = 1; k <= ss.steps; ++k) offsets.push_back(k * h);
        for (std::size_t k = 0; k < offsets.size(); ++k) {
          const double zp = value + dir * offsets[k];
          auto r = hit(zp, near);
          if (r) {
            curve.states.push_back(r->second);
            near = r->first.z;
            good = zp;
            walked = true;
            continue;
          }
          if (!walked) break;  // wrong side: arcs born here never reach the plane
          // refine the last arc that still reaches the plane
          double lo = good, hi = zp;
          std::optional<Vector> last;
          Vector near_b = near;
          for (int it = 0; it < ss.bisections; ++it) {
            const double mid = 0.5 * (lo + hi);
            auto rm = hit(mid, near_b);
            if (rm) {
              lo = mid;
              last = rm->second;
              near_b = rm->first.z;
            } else {
              hi = mid;
            }
          }
          if (last) curve.states.push_back(*last), walked = true;
          break;
        }
        if (walked) break;  // arcs reach the plane from one side only
      }
      if (curve.states.size() < 2) {
        out.diagnostics.push_back("g" + std::to_string(i + 1) + ": no arc of the family reaches the plane");
      }
      out.curves.push_back(std::move(curve));
    }
  }
  log::debug("section_curves", {{"value", value}, {"curves", out.curves.size()}});
  return out;
}

/// Cross-section slice at x_c = value.
inline AdmissibleSetSlice build_section(const ControlSystem& sys, double value, const SectionSettings& ss,
                                        const SliceSettings& sl) {
  const Vector params = Vector::Constant(1, value);
  SectionCurves sc = section_curves(sys, value, ss);
  std::vector<UsableSegment> usable;
  for (int i = 0; i < sys.p(); ++i) {
    auto part = usable_part(sys, i, params, sl);
    usable.insert(usable.end(), part.begin(), part.end());
  }
  AdmissibleSetSlice slice = build_slice(sys, params, std::move(sc.curves), usable, sl);
  slice.diagnostics.insert(slice.diagnostics.end(), sc.diagnostics.begin(), sc.diagnostics.end());
  return slice;
}

}  // namespace barrierkit

#endif  // BARRIERKIT_SECTION_HPP
