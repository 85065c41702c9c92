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

#include "barrierkit/acc_model.hpp"
#include "barrierkit/acc_pipeline.hpp"
#include "barrierkit/filter.hpp"
#include "barrierkit/registry.hpp"
#include "barrierkit/tangency.hpp"
#include "oracles.hpp"

using namespace barrierkit;

namespace {

const acc::AccParameters P;

const ControlSystem& acc_sys() {
  static const ControlSystem s = acc::acc_system(P);
  return s;
}

TangencySettings acc_settings() {
  TangencySettings ts;
  ts.fixed_coords = {0};
  ts.search_box = acc::tangency_search_box(P);
  return ts;
}

BarrierSettings acc_barrier() {
  BarrierSettings b;
  b.horizon = 1000.0;
  return b;
}

}  // namespace

TEST(AccClosedForm, HeadwayRootMatchesHighPrecision) {
  const auto pts = acc::acc_tangency_g1(P, 10.0);
  ASSERT_EQ(pts.size(), 2u);
  const double ref = static_cast<double>(oracle::headway_root_minus(oracle::defaults(), oracle::hp(10)));
  EXPECT_LE(std::abs(pts[0].z[1] - ref) / ref, 1e-8);
  EXPECT_NEAR(pts[0].z[1], 11.869, 1e-3);
  EXPECT_NEAR(pts[0].z[2], 21.364, 1e-3);
  EXPECT_EQ(pts[0].z[2], P.tau * pts[0].z[1]);
  EXPECT_NEAR(pts[1].z[1], 3634.8, 0.1);
  EXPECT_EQ(pts[0].u_star[0], P.u_min);
  EXPECT_EQ(pts[0].d_star[1], P.d2_max);
}

TEST(AccClosedForm, HeadwayRootOverAGrid) {
  for (double z1 : {0.0, 5.0, 20.0, 45.0, 57.0}) {
    const double ref = static_cast<double>(oracle::headway_root_minus(oracle::defaults(), oracle::hp(z1)));
    const auto r = acc::acc_tangency_g1_roots(P, z1);
    EXPECT_LE(std::abs(r.z2[0] - ref) / ref, 1e-10) << z1;
  }
}

TEST(AccClosedForm, SpeedBoundMatchesHighPrecision) {
  const double ref = static_cast<double>(oracle::speed_bound(oracle::defaults()));
  const double xh = acc::acc_speed_bound(P);
  EXPECT_LE(std::abs(xh - ref) / ref, 1e-10);
  EXPECT_NEAR(xh, 57.78, 1e-2);
}

TEST(AccClosedForm, DerivedCoefficients) {
  EXPECT_NEAR(P.a0(), 6.0606e-5, 1e-9);
  EXPECT_NEAR(P.a1(), 3.0303e-3, 1e-7);
  EXPECT_NEAR(P.a2(), 1.51515e-4, 1e-9);
}

TEST(AccClosedForm, VietaZeroRoot) {
  const double z1 = -P.tau * (P.a0() - P.grav * P.u_min - P.grav * P.d2_max);
  const auto r = acc::acc_tangency_g1_roots(P, z1);
  ASSERT_EQ(r.z2.size(), 2u);
  EXPECT_LE(std::abs(r.z2[0]), 1e-12);
  EXPECT_GT(r.z2[1], 1.0);
}

TEST(AccClosedForm, NegativeDiscriminantIsNoRoot) {
  EXPECT_THROW(acc::acc_tangency_g1_roots(P, 1000.0), NoRoot);
}

TEST(AccClosedForm, SpeedBoundDoubleRootAtOrigin) {
  acc::AccParameters p;
  p.u_min = p.u_max = 0.0;
  p.d2_min = p.d2_max = 0.0;
  p.d1_max = 0.0;
  p.d1_min = 0.0;
  p.a = -p.a0();
  EXPECT_EQ(acc::acc_speed_bound(p), 0.0);
}

TEST(AccClosedForm, SpeedBoundNoBound) {
  acc::AccParameters p;
  p.d1_max = 10.0;
  EXPECT_THROW(acc::acc_speed_bound(p), NoBound);
}

TEST(AccClosedForm, DistanceTangencyExactOnDefaultGrid) {
  for (double z1 : acc::default_grid(P)) {
    const TangencyPoint tp = acc::acc_tangency_g2(P, z1);
    EXPECT_EQ(tp.z[0], z1);
    EXPECT_EQ(tp.z[1], z1);
    EXPECT_EQ(tp.z[2], 100.0);
    EXPECT_EQ(tp.active_index, 1);
  }
  EXPECT_THROW(acc::acc_tangency_g2(P, -1.0), std::out_of_range);
  EXPECT_THROW(acc::acc_tangency_g2(P, 60.0), std::out_of_range);
}

TEST(AccClosedForm, DistanceTangencyExamples) {
  for (double z1 : {0.0, 20.0, 45.0}) {
    const TangencyPoint tp = acc::acc_tangency_g2(P, z1);
    EXPECT_EQ(tp.z, (Vector{{z1, z1, 100.0}}));
  }
}

// generic search against the closed forms

TEST(GenericTangency, AgreesWithClosedFormHeadway) {
  const TangencySettings ts = acc_settings();
  for (double z1 : {10.0, 20.0, 45.0}) {
    const auto closed = acc::acc_tangency_g1(P, z1);
    const auto found = find_tangency_points_at(acc_sys(), 0, Vector::Constant(1, z1), ts);
    ASSERT_EQ(found.size(), closed.size()) << z1;
    for (std::size_t k = 0; k < found.size(); ++k) {
      const double rel = (found[k].z - closed[k].z).lpNorm<Eigen::Infinity>() /
                         closed[k].z.lpNorm<Eigen::Infinity>();
      EXPECT_LE(rel, 1e-8) << z1 << " root " << k;
    }
  }
}

TEST(GenericTangency, AgreesWithClosedFormDistance) {
  const TangencySettings ts = acc_settings();
  for (double z1 : {10.0, 20.0, 45.0}) {
    const auto found = find_tangency_points_at(acc_sys(), 1, Vector::Constant(1, z1), ts);
    ASSERT_EQ(found.size(), 1u);
    EXPECT_LE((found[0].z - acc::acc_tangency_g2(P, z1).z).lpNorm<Eigen::Infinity>(), 1e-8 * 100);
  }
}

TEST(GenericTangency, DoubleIntegratorPoints) {
  const ControlSystem sys = registry::double_integrator({});
  const TangencySettings ts;
  const auto up = find_tangency_points_at(sys, 0, Vector(0), ts);
  const auto lo = find_tangency_points_at(sys, 1, Vector(0), ts);
  ASSERT_EQ(up.size(), 1u);
  ASSERT_EQ(lo.size(), 1u);
  EXPECT_NEAR(up[0].z[0], 1.0, 1e-12);
  EXPECT_NEAR(up[0].z[1], 0.0, 1e-10);
  EXPECT_NEAR(lo[0].z[0], -1.0, 1e-12);
  EXPECT_NEAR(lo[0].z[1], 0.0, 1e-10);
}

TEST(GenericTangency, NoRootIsReportedPerValue) {
  // the distance constraint has no tangency once x2 = z1 leaves the box
  TangencySettings ts = acc_settings();
  ts.search_box = Box::from({{0.0, 60.0}, {0.0, 30.0}, {0.0, 200.0}});
  const TangencySearch r = find_tangency_points(acc_sys(), 1, std::vector<double>{10.0, 40.0, 20.0}, ts);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_EQ(r.points[0].params[0], 10.0);
  EXPECT_EQ(r.points[1].params[0], 20.0);
  ASSERT_EQ(r.issues.size(), 1u);
  EXPECT_EQ(r.issues[0].kind, "NoRoot");
  EXPECT_EQ(r.issues[0].params[0], 40.0);
}

TEST(GenericTangency, DegenerateWhenTheRootIsNotIsolated) {
  // Lie value x1 - 1 vanishes on the whole line x1 = 1
  ControlSystem::Definition def;
  def.name = "flat";
  def.n = 2, def.m = 1, def.w = 1;
  def.dynamics = [](const Vector& x, const Vector&, const Vector&) -> Vector { return Vector{{x[0] - 1.0, 0.0}}; };
  def.control_box = Box::from({{-1, 1}});
  def.disturbance_box = Box::from({{0, 0}});
  def.constraints = {Constraint{"c", [](const Vector& x) { return x[0] - 1.0; },
                                [](const Vector&) { return RowVector{{1.0, 0.0}}; }}};
  def.domain = Box::from({{-2, 2}, {-2, 2}});
  const ControlSystem sys(def);
  EXPECT_THROW(find_tangency_points_at(sys, 0, Vector(0), TangencySettings{}), Degenerate);
}

TEST(GenericTangency, BadArguments) {
  const TangencySettings ts = acc_settings();
  EXPECT_THROW(find_tangency_points(acc_sys(), 0, std::vector<double>{}, ts), std::invalid_argument);
  EXPECT_THROW(find_tangency_points_at(acc_sys(), 5, Vector::Constant(1, 10.0), ts), std::out_of_range);
  EXPECT_THROW(find_tangency_points_at(acc_sys(), 0, Vector(0), ts), std::invalid_argument);
}

// invariants

TEST(TangencyInvariants, ResidualsOnDefaultGrid) {
  const TangencySearch r = find_tangency_points(acc_sys(), 0, acc::default_grid(P), acc_settings());
  EXPECT_TRUE(r.issues.empty());
  for (const auto& tp : r.points) {
    EXPECT_LE(std::abs(tp.res_g), 1e-8);
    EXPECT_LE(std::abs(tp.res_lie), 1e-8);
    // stored saddle pair reproduces the zero Lie value
    const double lie = acc_sys().constraint(0).gradient(tp.z) * eval_dynamics(acc_sys(), tp.z, tp.u_star, tp.d_star);
    EXPECT_LE(std::abs(lie), 1e-8 * std::max(1.0, tp.z.norm()));
  }
}

TEST(TangencyInvariants, AcceptedPointsVaryContinuously) {
  // a headway point is kept exactly when it also respects the distance limit, tau z2 <= 100
  const std::vector<double> grid = acc::default_grid(P);
  std::vector<double> kept;
  std::vector<Vector> z;
  for (double z1 : grid) {
    const auto fr = filter_candidates(acc_sys(), acc::acc_tangency_g1(P, z1), default_probe_length(acc_sys()),
                                      acc_barrier());
    const double z2 = static_cast<double>(oracle::headway_root_minus(oracle::defaults(), oracle::hp(z1)));
    const bool feasible = P.tau * z2 <= 100.0;
    ASSERT_EQ(fr.accepted.size(), feasible ? 1u : 0u) << z1;
    if (!feasible) {
      ASSERT_FALSE(fr.discarded.empty());
      EXPECT_NE(fr.discarded[0].reason.find("violates_constraint"), std::string::npos) << z1;
      continue;
    }
    kept.push_back(z1);
    z.push_back(fr.accepted[0].z);
  }
  // the feasible values form a prefix of the grid
  ASSERT_GE(kept.size(), 40u);
  for (std::size_t k = 0; k < kept.size(); ++k) EXPECT_EQ(kept[k], grid[k]);
  // Lipschitz estimate from the grid: every step ratio within a factor 2 of the smallest
  std::vector<double> ratio;
  for (std::size_t k = 1; k < z.size(); ++k) ratio.push_back((z[k] - z[k - 1]).norm() / (kept[k] - kept[k - 1]));
  const double lo = *std::min_element(ratio.begin(), ratio.end());
  const double hi = *std::max_element(ratio.begin(), ratio.end());
  EXPECT_GT(lo, 0.0);
  EXPECT_LE(hi, 2.0 * lo);
}

// filtering

TEST(Filter, FarHeadwayRootIsDiscarded) {
  const auto fr = filter_candidates(acc_sys(), acc::acc_tangency_g1(P, 10.0), default_probe_length(acc_sys()),
                                    acc_barrier());
  ASSERT_EQ(fr.accepted.size(), 1u);
  EXPECT_NEAR(fr.accepted[0].z[1], 11.869, 1e-3);
  ASSERT_EQ(fr.discarded.size(), 1u);
  EXPECT_NEAR(fr.discarded[0].point.z[1], 3634.8, 0.1);
  EXPECT_NE(fr.discarded[0].reason.find("outside_domain"), std::string::npos);
}

TEST(Filter, OffBoundaryCandidateRejectedBeforeProbing) {
  TangencyPoint tp = acc::acc_tangency_g1(P, 10.0)[0];
  tp.z[2] += 0.1;  // g1 = -0.1
  const auto fr = filter_candidates(acc_sys(), {tp}, 1.0, acc_barrier());
  ASSERT_EQ(fr.discarded.size(), 1u);
  EXPECT_EQ(fr.discarded[0].reason, "not_on_boundary");
}

TEST(Filter, DistanceCandidatesAcceptedOnDefaultGrid) {
  // (z1, z1, 100) respects the headway limit only while tau z1 <= 100
  std::vector<TangencyPoint> c;
  for (double z1 : acc::default_grid(P)) c.push_back(acc::acc_tangency_g2(P, z1));
  const auto fr = filter_candidates(acc_sys(), c, default_probe_length(acc_sys()), acc_barrier());
  std::size_t feasible = 0;
  for (const auto& tp : c) feasible += P.tau * tp.z[1] <= 100.0;
  EXPECT_EQ(fr.accepted.size(), feasible);
  EXPECT_EQ(feasible, 46u);
  for (const auto& tp : fr.accepted) EXPECT_LE(P.tau * tp.z[1], 100.0);
  for (const auto& d : fr.discarded) {
    EXPECT_GT(P.tau * d.point.z[1], 100.0) << d.point.z.transpose() << ": " << d.reason;
    EXPECT_NE(d.reason.find("violates_constraint"), std::string::npos);
  }
}

TEST(Filter, ProbeLengthMustBePositive) {
  EXPECT_THROW(filter_candidates(acc_sys(), {}, 0.0, acc_barrier()), std::invalid_argument);
  EXPECT_NEAR(default_probe_length(acc_sys()),
              0.01 * std::sqrt(std::pow(57.780528, 2) * 5 + 200.0 * 200.0), 1e-4);
}
