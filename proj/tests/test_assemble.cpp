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

#include <cmath>
#include <map>

#include "barrierkit/acc_pipeline.hpp"
#include "barrierkit/assemble.hpp"
#include "barrierkit/registry.hpp"
#include "barrierkit/verify.hpp"

using namespace barrierkit;

namespace {

const acc::AccParameters P;

const ControlSystem& acc_sys() {
  static const ControlSystem s = acc::acc_system(P);
  return s;
}

SliceSettings acc_slice_settings() {
  SliceSettings s;
  s.fixed_coords = {0};
  return s;
}

const acc::SliceResult& slice_at(double z1) {
  static std::map<double, acc::SliceResult> cache;
  auto it = cache.find(z1);
  if (it == cache.end()) {
    acc::PipelineOptions o;
    o.grid = {z1};
    o.permeability = false;
    it = cache.emplace(z1, acc::acc_pipeline(o).slices.at(0)).first;
  }
  return it->second;
}

AdmissibleSetSlice square() {
  AdmissibleSetSlice s;
  s.params = Vector(0);
  s.plane = {0, 1};
  s.segments = {{SegmentTag::ConstraintEdge, 0, "bottom", {{0, 0}, {1, 0}}},
                {SegmentTag::ConstraintEdge, 1, "right", {{1, 0}, {1, 1}}},
                {SegmentTag::ConstraintEdge, 2, "top", {{1, 1}, {0, 1}}},
                {SegmentTag::ConstraintEdge, 3, "left", {{0, 1}, {0, 0}}}};
  return s;
}

}  // namespace

// usable parts

TEST(UsablePart, HeadwayBelowTheTangencyRoot) {
  const auto parts = usable_part(acc_sys(), 0, Vector::Constant(1, 10.0), acc_slice_settings());
  ASSERT_EQ(parts.size(), 1u);
  const double root = acc::acc_tangency_g1(P, 10.0)[0].z[1];
  for (const Vector& x : parts[0].states) {
    EXPECT_EQ(x[0], 10.0);
    EXPECT_NEAR(x[2], P.tau * x[1], 1e-9);
    EXPECT_LE(x[1], root + 1e-9);
  }
  // clipped at the tangency point
  const Vector& end = parts[0].ends_at_tangency ? parts[0].states.back() : parts[0].states.front();
  EXPECT_TRUE(parts[0].ends_at_tangency || parts[0].starts_at_tangency);
  EXPECT_NEAR(end[1], root, 1e-8);
}

TEST(UsablePart, DistanceAboveTheLeaderSpeed) {
  const auto parts = usable_part(acc_sys(), 1, Vector::Constant(1, 10.0), acc_slice_settings());
  ASSERT_EQ(parts.size(), 1u);
  for (const Vector& x : parts[0].states) {
    EXPECT_EQ(x[2], 100.0);
    EXPECT_GE(x[1], 10.0 - 1e-9);
  }
}

TEST(UsablePart, EmptyWhenEveryInputLeaves) {
  ControlSystem::Definition def;
  def.name = "drift";
  def.n = 2, def.m = 1, def.w = 1;
  def.dynamics = [](const Vector&, const Vector& u, const Vector&) -> Vector { return Vector{{1.0, u[0]}}; };
  def.control_box = Box::from({{-1, 1}});
  def.disturbance_box = Box::from({{0, 0}});
  def.constraints = {Constraint{"c", [](const Vector& x) { return x[0] - 1.0; },
                                [](const Vector&) { return RowVector{{1.0, 0.0}}; }}};
  def.domain = Box::from({{-2, 2}, {-2, 2}});
  EXPECT_TRUE(usable_part(ControlSystem(def), 0, Vector(0), SliceSettings{}).empty());
}

// slice assembly

TEST(BuildSlice, AccSlicesCloseWithTwoTangentJunctions) {
  for (double z1 : {10.0, 20.0, 45.0}) {
    const auto& r = slice_at(z1);
    ASSERT_EQ(r.status, "ok") << r.error;
    const AdmissibleSetSlice& s = *r.slice;
    ASSERT_FALSE(s.segments.empty());
    for (std::size_t k = 0; k < s.segments.size(); ++k) {
      const auto& a = s.segments[k];
      const auto& b = s.segments[(k + 1) % s.segments.size()];
      EXPECT_LE((a.points.back() - b.points.front()).norm(), s.stitch_tol) << z1;
    }
    ASSERT_EQ(s.junctions.size(), 2u) << z1;
    for (const auto& j : s.junctions) EXPECT_LE(j.angle, 1e-3) << z1;
    // junctions sit on accepted tangency points
    for (const auto& j : s.junctions) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < r.candidates.size(); ++c) {
        if (!r.verdicts[c].empty()) continue;
        best = std::min(best, (Point2(r.candidates[c].z[1], r.candidates[c].z[2]) - j.point).norm());
      }
      EXPECT_LE(best, s.stitch_tol);
    }
    EXPECT_GT(slice_area(s), 0.0);
  }
}

TEST(BuildSlice, SegmentsAreTaggedAndLabelled) {
  const AdmissibleSetSlice& s = *slice_at(10.0).slice;
  int arcs = 0, usable = 0;
  for (const auto& sg : s.segments) {
    EXPECT_FALSE(sg.label.empty());
    EXPECT_GE(sg.points.size(), 2u);
    arcs += sg.tag == SegmentTag::BarrierArc;
    usable += sg.tag == SegmentTag::UsablePart;
  }
  EXPECT_EQ(arcs, 2);
  EXPECT_GE(usable, 2);
}

TEST(BuildSlice, ContainsExamples) {
  const AdmissibleSetSlice& s = *slice_at(10.0).slice;
  EXPECT_EQ(contains(s, Point2(10.0, 50.0)).where, Containment::Inside);
  EXPECT_EQ(contains(s, Point2(20.0, 100.0)).where, Containment::Boundary);
  EXPECT_EQ(contains(s, Point2(30.0, 10.0)).where, Containment::Outside);  // g1 > 0
  Vector x(3);
  x << 10.0, 10.0, 50.0;
  EXPECT_TRUE(verify::admissible_under_feedback(acc_sys(), x));
}

TEST(BuildSlice, CounterClockwise) {
  for (double z1 : {10.0, 20.0, 45.0}) {
    const auto poly = slice_at(z1).slice->polygon();
    double a = 0.0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Point2& p = poly[k];
      const Point2& q = poly[(k + 1) % poly.size()];
      a += p.x() * q.y() - q.x() * p.y();
    }
    EXPECT_GT(a, 0.0);
  }
}

TEST(BuildSlice, MismatchedEndpointsAreAnOpenBoundary) {
  const ControlSystem sys = registry::double_integrator({});
  BarrierSettings bs;
  bs.horizon = 100.0;
  SliceSettings sl;
  const auto tp = find_tangency_points_at(sys, 0, Vector(0), TangencySettings{});
  std::vector<BarrierTrajectory> arcs{trace_barrier(sys, tp.at(0), bs)};
  UsableSegment seg;
  seg.constraint = 0;
  for (int k = 0; k <= 10; ++k) seg.states.push_back(Vector{{1.0, 10.0 * sl.stitch_tol + 0.1 * k}});
  EXPECT_THROW(build_slice(sys, Vector(0), arcs, {seg}, sl), OpenBoundary);
}

TEST(BuildSlice, OffPlaneSegmentRejected) {
  UsableSegment seg;
  seg.constraint = 1;
  seg.states = {Vector{{10.5, 20.0, 100.0}}, Vector{{10.5, 30.0, 100.0}}};
  EXPECT_THROW(build_slice(acc_sys(), Vector::Constant(1, 10.0), std::vector<BarrierTrajectory>{}, {seg},
                           acc_slice_settings()),
               std::invalid_argument);
}

// geometry

TEST(SliceGeometry, UnitSquare) {
  const AdmissibleSetSlice s = square();
  EXPECT_DOUBLE_EQ(slice_area(s), 1.0);
  EXPECT_EQ(contains(s, Point2(0.5, 0.5)).where, Containment::Inside);
  EXPECT_EQ(contains(s, Point2(1.0, 0.5)).where, Containment::Boundary);
  EXPECT_EQ(contains(s, Point2(0.5, 1.0 + 0.5 * s.stitch_tol)).where, Containment::Boundary);
  EXPECT_EQ(contains(s, Point2(1.5, 0.5)).where, Containment::Outside);
  EXPECT_NEAR(contains(s, Point2(0.5, 0.25)).distance, 0.25, 1e-15);
}

TEST(SliceGeometry, ZeroAreaSlice) {
  AdmissibleSetSlice s;
  s.params = Vector(0);
  s.plane = {0, 1};
  s.segments = {{SegmentTag::BarrierArc, 0, "arc1", {{0, 0}, {1, 1}}},
                {SegmentTag::UsablePart, 0, "g1", {{1, 1}, {0, 0}}}};
  EXPECT_EQ(slice_area(s), 0.0);
  EXPECT_EQ(contains(s, Point2(0.5, 0.5)).where, Containment::Boundary);
  EXPECT_EQ(contains(s, Point2(0.2, 0.8)).where, Containment::Outside);
}
