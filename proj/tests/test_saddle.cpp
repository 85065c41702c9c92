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

#include <random>

#include "barrierkit/acc_model.hpp"
#include "barrierkit/acc_pipeline.hpp"
#include "barrierkit/saddle.hpp"

using namespace barrierkit;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Vector sample(const Box& b, std::mt19937_64& rng) {
  Vector v(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) v[i] = std::uniform_real_distribution<double>(b.lower(i), b.upper(i))(rng);
  return v;
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int k = 0; k < n; ++k) g.push_back(lo + (hi - lo) * k / (n - 1));
  return g;
}

const acc::AccParameters P;
const ControlSystem& acc_sys() {
  static const ControlSystem s = acc::acc_system(P);
  return s;
}

// two-state system with a scalar non-affine Hamiltonian term h(u, d) in x2'
ControlSystem nonaffine(std::function<double(double, double)> h) {
  ControlSystem::Definition def;
  def.name = "nonaffine";
  def.n = 2, def.m = 1, def.w = 1;
  def.dynamics = [h](const Vector& x, const Vector& u, const Vector& d) -> Vector { return vec({x[1], h(u[0], d[0])}); };
  def.control_box = Box::from({{-1, 1}});
  def.disturbance_box = Box::from({{-1, 1}});
  def.constraints = {Constraint{"c", [](const Vector& x) { return x[0] - 1; },
                                [](const Vector&) { return RowVector{{1.0, 0.0}}; }}};
  def.domain = Box::from({{-2, 2}, {-2, 2}});
  return ControlSystem(def);
}

}  // namespace

TEST(SaddleHamiltonian, AccBarrierLaw) {
  const auto r = saddle_hamiltonian(acc_sys(), vec({10, 12, 21}), vec({0, P.tau, -1}));
  EXPECT_EQ(r.u_star[0], P.u_min);
  EXPECT_EQ(r.d_star[1], P.d2_max);
  EXPECT_EQ(r.d_star[0], 0.0);  // lambda_1 = 0: zero by convention
  EXPECT_EQ(r.gap, 0.0);
  EXPECT_EQ(r.method, SaddleMethod::AffineClosedForm);
}

TEST(SaddleHamiltonian, VanishingSwitchingUsesZero) {
  const auto r = saddle_hamiltonian(acc_sys(), vec({10, 12, 21}), vec({0, 0, 1}));
  EXPECT_EQ(r.u_star[0], 0.0);
  EXPECT_EQ(r.d_star[0], 0.0);
  EXPECT_EQ(r.d_star[1], 0.0);
}

TEST(SaddleHamiltonian, RejectsZeroCostate) {
  EXPECT_THROW(saddle_hamiltonian(acc_sys(), vec({1, 1, 1}), Vector::Zero(3)), std::invalid_argument);
}

TEST(SaddleHamiltonian, ClosedFormMatchesDenseGrid) {
  // 17 points per input axis: min over u of max over the d grid
  std::mt19937_64 rng(21);
  const auto ug = grid(P.u_min, P.u_max, 17), d1g = grid(P.d1_min, P.d1_max, 17), d2g = grid(P.d2_min, P.d2_max, 17);
  for (int k = 0; k < 100; ++k) {
    const Vector x = sample(acc_sys().domain(), rng);
    Vector lam(3);
    for (int i = 0; i < 3; ++i) lam[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
    const auto r = saddle_hamiltonian(acc_sys(), x, lam);
    double minmax = std::numeric_limits<double>::infinity();
    for (double u : ug) {
      double worst = -std::numeric_limits<double>::infinity();
      for (double d1 : d1g)
        for (double d2 : d2g) worst = std::max(worst, lam.dot(eval_dynamics(acc_sys(), x, vec({u}), vec({d1, d2}))));
      minmax = std::min(minmax, worst);
    }
    EXPECT_NEAR(r.value, minmax, 1e-10);
  }
}

TEST(SaddleHamiltonian, SaddleInequalityOnRandomInputs) {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 20; ++k) {
    const Vector x = sample(acc_sys().domain(), rng);
    Vector lam(3);
    for (int i = 0; i < 3; ++i) lam[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
    const auto r = saddle_hamiltonian(acc_sys(), x, lam);
    const double v = lam.dot(eval_dynamics(acc_sys(), x, r.u_star, r.d_star));
    for (int j = 0; j < 100; ++j) {
      const Vector u = sample(acc_sys().control_box(), rng), d = sample(acc_sys().disturbance_box(), rng);
      EXPECT_LE(lam.dot(eval_dynamics(acc_sys(), x, r.u_star, d)), v + 1e-10);
      EXPECT_GE(lam.dot(eval_dynamics(acc_sys(), x, u, r.d_star)), v - 1e-10);
    }
  }
}

TEST(SaddleHamiltonian, PositiveScalingInvariance) {
  std::mt19937_64 rng(29);
  for (int k = 0; k < 50; ++k) {
    const Vector x = sample(acc_sys().domain(), rng);
    Vector lam(3);
    for (int i = 0; i < 3; ++i) lam[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
    const double c = std::uniform_real_distribution<double>(0.1, 10)(rng);
    const auto a = saddle_hamiltonian(acc_sys(), x, lam), b = saddle_hamiltonian(acc_sys(), x, c * lam);
    EXPECT_EQ(a.u_star, b.u_star);
    EXPECT_EQ(a.d_star, b.d_star);
    EXPECT_NEAR(b.value, c * a.value, 1e-12 * std::max(1.0, std::abs(b.value)));
  }
}

TEST(SaddleHamiltonian, BestResponseFindsConvexConcaveSaddle) {
  // u^2 - d^2 + u d / 2: convex in u, concave in d, saddle at the origin
  const auto sys = nonaffine([](double u, double d) { return u * u - d * d + 0.5 * u * d; });
  const auto r = saddle_hamiltonian(sys, vec({0, 0}), vec({0, 1}));
  EXPECT_EQ(r.method, SaddleMethod::BestResponse);
  EXPECT_NEAR(r.u_star[0], 0.0, 1e-6);
  EXPECT_NEAR(r.d_star[0], 0.0, 1e-6);
  EXPECT_LE(r.gap, 1e-9);
}

TEST(SaddleHamiltonian, NoSaddleIsReported) {
  // (u - d)^2: min-max is 1, max-min is 0
  const auto sys = nonaffine([](double u, double d) { return (u - d) * (u - d); });
  try {
    saddle_hamiltonian(sys, vec({0, 0}), vec({0, 1}));
    FAIL() << "expected SaddleNotFound";
  } catch (const SaddleNotFound& e) {
    EXPECT_GT(e.gap(), 0.5);
  }
}

TEST(SaddleLie, HeadwayTangencyValueVanishes) {
  const auto r = acc::acc_tangency_g1_roots(P, 10.0);
  const Vector z = vec({10, r.z2[0], r.z3(0)});
  const auto s = saddle_lie(acc_sys(), z, ActiveSet{{0}, 1e-8});
  EXPECT_NEAR(s.value, 0.0, 1e-8);
  EXPECT_EQ(s.u_star[0], P.u_min);
  EXPECT_EQ(s.d_star[1], P.d2_max);
}

TEST(SaddleLie, DistanceConstraintIsInputIndependent) {
  for (double z1 : {0.0, 20.0, 45.0}) {
    const auto s = saddle_lie(acc_sys(), vec({z1, z1, 100}), ActiveSet{{1}, 1e-8});
    EXPECT_EQ(s.value, 0.0);
    EXPECT_EQ(s.gap, 0.0);
  }
}

TEST(SaddleLie, DegenerateCoefficientsGiveZeroGap) {
  // Dg = (1, 0): x1' = x2 carries no inputs
  const auto sys = nonaffine([](double u, double d) { return u * u - d * d; });
  const auto s = saddle_lie(sys, vec({1, 0.3}), ActiveSet{{0}, 1e-8});
  EXPECT_NEAR(s.value, 0.3, 1e-15);
  EXPECT_LE(s.gap, 1e-9);
}

TEST(SaddleLie, TwoActivePiecesMatchDenseGrid) {
  // corner of the headway and distance constraints
  std::mt19937_64 rng(31);
  for (int k = 0; k < 20; ++k) {
    const double z1 = std::uniform_real_distribution<double>(0, acc::acc_speed_bound(P))(rng);
    const Vector x = vec({z1, P.d_max / P.tau, P.d_max});
    const auto s = saddle_lie(acc_sys(), x, ActiveSet{{0, 1}, 1e-8});
    EXPECT_EQ(s.method, SaddleMethod::Enumeration);
    double grid_value = std::numeric_limits<double>::infinity();
    const auto D = acc_sys().disturbance_box().vertices();
    for (double u : grid(P.u_min, P.u_max, 4001)) {
      double worst = -std::numeric_limits<double>::infinity();
      for (const Vector& d : D) {
        for (int i = 0; i < 2; ++i) worst = std::max(worst, lie_derivative(acc_sys(), i, x, vec({u}), d));
      }
      grid_value = std::min(grid_value, worst);
    }
    EXPECT_GE(grid_value, s.value - 1e-12);
    EXPECT_LE(grid_value, s.value + 1e-2);
  }
}

TEST(SaddleLie, RejectsEmptyActiveSet) {
  EXPECT_THROW(saddle_lie(acc_sys(), vec({1, 1, 1}), ActiveSet{}), std::invalid_argument);
}
