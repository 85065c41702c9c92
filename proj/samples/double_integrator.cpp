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

// Admissible set of x'' = u + d with |x| <= 1. The two barriers are the
// parabolas x1 = +-(1 - x2^2), which meet the constraints tangentially at
// (+-1, 0) and bound a region of area 8 sqrt(2) / 3.

#include <cmath>
#include <cstdio>

#include "barrierkit.hpp"

using namespace barrierkit;

int main() {
  const ControlSystem sys = registry::double_integrator({});
  TangencySettings ts;
  BarrierSettings bs;
  bs.horizon = 100.0;
  bs.ode.max_step = 0.01;
  SliceSettings sl;
  const Vector none(0);

  std::vector<BarrierTrajectory> arcs;
  std::vector<UsableSegment> usable;
  for (int i = 0; i < sys.p(); ++i) {
    const auto pts = find_tangency_points_at(sys, i, none, ts);
    const auto fr = filter_candidates(sys, pts, default_probe_length(sys), bs);
    for (const auto& tp : fr.accepted) {
      std::printf("tangency on %s at (%g, %g)\n", sys.constraint(i).name.c_str(), tp.z[0], tp.z[1]);
      arcs.push_back(trace_barrier(sys, tp, bs));
    }
    const auto u = usable_part(sys, i, none, sl);
    usable.insert(usable.end(), u.begin(), u.end());
  }
  const AdmissibleSetSlice s = build_slice(sys, none, arcs, usable, sl);
  std::printf("area %.6f (closed form %.6f)\n", slice_area(s), 8.0 * std::sqrt(2.0) / 3.0);
  io::write_file("double_integrator.svg", io::slice_svg(s));
  std::printf("wrote double_integrator.svg\n");
}
