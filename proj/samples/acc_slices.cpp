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

// The ACC case study at three leader speeds: tangency points, barrier arcs
// and slice areas, plus SVG files for each slice.

#include <cstdio>

#include "barrierkit.hpp"

using namespace barrierkit;

int main() {
  acc::PipelineOptions o;
  o.grid = {10.0, 20.0, 45.0};
  o.permeability = false;
  const acc::PipelineResult r = acc::acc_pipeline(o);
  for (const auto& s : r.slices) {
    std::printf("z1 = %g: %s, area %.2f\n", s.z1, s.status.c_str(), s.area);
    for (std::size_t k = 0; k < s.candidates.size(); ++k) {
      const auto& c = s.candidates[k];
      std::printf("  g%d candidate (%.4f, %.4f, %.4f) %s\n", c.active_index + 1, c.z[0], c.z[1], c.z[2],
                  s.verdicts[k].empty() ? "accepted" : s.verdicts[k].c_str());
    }
    if (s.slice) {
      char name[64];
      std::snprintf(name, sizeof name, "acc_z1_%02d.svg", static_cast<int>(s.z1));
      io::write_file(name, io::slice_svg(*s.slice));
    }
  }
  std::printf("%s\n", r.manifest.at("summary").dump().c_str());
}
