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

#include <gtest/gtest.h>

#include "barrierkit/acc_pipeline.hpp"

using namespace barrierkit;

namespace {

const acc::PipelineResult& reference_run() {
  static const acc::PipelineResult r = [] {
    acc::PipelineOptions o;
    o.grid = {10.0, 20.0, 45.0};
    o.sections = true;
    return acc::acc_pipeline(o);
  }();
  return r;
}

const acc::PipelineResult& default_grid_run() {
  static const acc::PipelineResult r = [] {
    acc::PipelineOptions o;
    o.grid = acc::default_grid(o.params);
    o.permeability = false;
    return acc::acc_pipeline(o);
  }();
  return r;
}

}  // namespace

TEST(AccPipeline, ReferenceSlicesClose) {
  const auto& r = reference_run();
  ASSERT_EQ(r.slices.size(), 3u);
  for (const auto& s : r.slices) {
    ASSERT_EQ(s.status, "ok") << s.z1 << ": " << s.error;
    ASSERT_TRUE(s.slice.has_value());
    EXPECT_EQ(s.slice->junctions.size(), 2u) << s.z1;
    for (const auto& j : s.slice->junctions) EXPECT_LE(j.angle, 1e-3) << s.z1;
  }
}

TEST(AccPipeline, AreaDecreasesAcrossReferenceSlices) {
  const auto& r = reference_run();
  ASSERT_EQ(r.slices.size(), 3u);
  EXPECT_GT(r.slices[0].area, r.slices[1].area);
  EXPECT_GT(r.slices[1].area, r.slices[2].area);
  EXPECT_GT(r.slices[2].area, 0.0);
}

TEST(AccPipeline, EveryCheckPassesOnReferenceSlices) {
  for (const auto& s : reference_run().slices) {
    for (const char* c : {"tangency", "hamiltonian", "dual_parameterization", "signs", "junctions", "permeability"}) {
      ASSERT_TRUE(s.checks.contains(c)) << s.z1 << " " << c;
      EXPECT_TRUE(s.checks[c]["pass"].get<bool>()) << s.z1 << " " << c << ": " << s.checks[c].dump();
    }
    EXPECT_LE(s.checks["tangency"]["max_residual"].get<double>(), 1e-8);
    EXPECT_LE(s.checks["tangency"]["generic_agreement"].get<double>(), 1e-8);
    EXPECT_LE(s.checks["dual_parameterization"]["max_deviation"].get<double>(), 1e-6);
    EXPECT_GE(s.checks["permeability"]["min_exit_fraction"].get<double>(), 0.95);
  }
}

TEST(AccPipeline, FarHeadwayRootDiscarded) {
  const auto& s = reference_run().slices[0];
  ASSERT_EQ(s.candidates.size(), 3u);
  EXPECT_TRUE(s.verdicts[0].empty());
  EXPECT_FALSE(s.verdicts[1].empty());
  EXPECT_TRUE(s.verdicts[2].empty());
}

TEST(AccPipeline, SectionsAgreeWithTheAdmissibilityOracle) {
  for (const auto& s : reference_run().slices) {
    ASSERT_TRUE(s.checks.contains("section")) << s.z1;
    const auto& c = s.checks["section"];
    ASSERT_FALSE(c.contains("error")) << s.z1 << ": " << c.dump();
    EXPECT_EQ(c["samples"].get<int>(), 500) << s.z1;
    EXPECT_GE(c["agreement"].get<double>(), 0.95) << s.z1;
  }
}

TEST(AccPipeline, AreaNonIncreasingOverDefaultGrid) {
  const auto& r = default_grid_run();
  ASSERT_EQ(r.slices.size(), 48u);
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& s : r.slices) {
    ASSERT_NE(s.status, "failed") << s.z1 << ": " << s.error;
    EXPECT_LE(s.area, prev) << "z1 = " << s.z1;
    prev = s.area;
  }
  EXPECT_TRUE(r.manifest["summary"]["area_non_increasing"].get<bool>());
}

TEST(AccPipeline, DefaultGridHasNoFailures) {
  const auto& r = default_grid_run();
  EXPECT_EQ(r.manifest["summary"]["failed"].get<int>(), 0);
  EXPECT_EQ(r.manifest["summary"]["check_failures"].get<int>(), 0);
  for (const auto& s : r.slices) {
    if (s.status != "ok") continue;
    EXPECT_LE(s.checks["hamiltonian"]["max_residual"].get<double>(), 1e-6) << s.z1;
    EXPECT_LE(s.checks["dual_parameterization"]["max_deviation"].get<double>(), 1e-6) << s.z1;
  }
}

TEST(AccPipeline, HighSpeedSlicesAreEmpty) {
  acc::PipelineOptions o;
  o.grid = {57.0};
  o.permeability = false;
  const auto r = acc::acc_pipeline(o);
  ASSERT_EQ(r.slices.size(), 1u);
  EXPECT_EQ(r.slices[0].status, "empty");
  EXPECT_EQ(r.slices[0].area, 0.0);
}

TEST(AccPipeline, EmptyGridGivesEmptyManifest) {
  const auto r = acc::acc_pipeline(acc::PipelineOptions{});
  EXPECT_TRUE(r.slices.empty());
  EXPECT_TRUE(r.manifest["slices"].empty());
  EXPECT_EQ(r.manifest["summary"]["slices"].get<int>(), 0);
}

TEST(AccPipeline, GridOutsideTheSpeedDomain) {
  acc::PipelineOptions o;
  o.grid = {60.0};
  EXPECT_THROW(acc::acc_pipeline(o), ConfigError);
}

TEST(AccPipeline, ManifestIsDeterministic) {
  acc::PipelineOptions o;
  o.grid = {10.0, 30.0};
  o.seed = 4;
  EXPECT_EQ(acc::acc_pipeline(o).manifest.dump(), acc::acc_pipeline(o).manifest.dump());
}

TEST(AccPipeline, DefaultGridSpacing) {
  const acc::AccParameters p;
  const auto g = acc::default_grid(p);
  ASSERT_EQ(g.size(), 48u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), acc::acc_speed_bound(p));
}
