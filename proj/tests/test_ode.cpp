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
#include <random>

#include "barrierkit/acc_model.hpp"
#include "barrierkit/ode.hpp"
#include "barrierkit/registry.hpp"

using namespace barrierkit;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// exp(M) by scaling and squaring of a long Taylor series in long double
Matrix expm_oracle(const Matrix& M) {
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  MatL A = M.cast<long double>();
  int s = 0;
  const long double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm / std::ldexp(1.0L, s) > 0.125L) ++s;
  A /= std::ldexp(1.0L, s);
  MatL E = MatL::Identity(A.rows(), A.cols()), term = E;
  for (int k = 1; k <= 30; ++k) {
    term = term * A / static_cast<long double>(k);
    E += term;
  }
  for (int k = 0; k < s; ++k) E = E * E;
  return E.cast<double>();
}

ControlSystem linear(const Matrix& A) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < A.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < A.cols(); ++c) row.push_back(A(r, c));
    rows.push_back(row);
  }
  nlohmann::json B = nlohmann::json::array(), C = nlohmann::json::array(), dom = nlohmann::json::array();
  for (int r = 0; r < A.rows(); ++r) {
    B.push_back({r == A.rows() - 1 ? 1.0 : 0.0});
    dom.push_back({-1e3, 1e3});
  }
  nlohmann::json c0 = nlohmann::json::array();
  for (int c = 0; c < A.cols(); ++c) c0.push_back(c == 0 ? 1.0 : 0.0);
  C.push_back(c0);
  return registry::select(nlohmann::json{
                              {"system", "linear"},
                              {"params", {{"A", rows}, {"B", B}, {"C", C}, {"b", {1.0}}, {"domain", dom}}}})
      .system;
}

}  // namespace

TEST(Integrate, ExponentialDecay) {
  ode::Settings s;
  const auto tr = ode::integrate([](double, const Vector& x) -> Vector { return -x; }, vec({1.0}), 0.0, 1.0, s);
  EXPECT_EQ(tr.termination, ode::Termination::SpanEnd);
  EXPECT_NEAR(tr.x_back()[0], std::exp(-1.0), 1e-9);
  // dense output between samples
  for (double t : {0.1, 0.33, 0.5, 0.77, 0.95}) EXPECT_NEAR(tr.eval(t)[0], std::exp(-t), 1e-8);
}

TEST(Integrate, ZeroFieldGivesConstantTrajectory) {
  ode::Settings s;
  const auto tr = ode::integrate([](double, const Vector& x) -> Vector { return Vector::Zero(x.size()); },
                                 vec({2.0, -3.0}), 5.0, -7.0, s);
  EXPECT_GE(tr.size(), 2u);
  for (const auto& x : tr.x) EXPECT_EQ(x, vec({2.0, -3.0}));
}

TEST(Integrate, BackwardAndFixedStepRK4) {
  ode::Settings s;
  s.method = ode::Method::RK4;
  s.fixed_step = 1e-3;
  const auto tr = ode::integrate([](double, const Vector& x) -> Vector { return -x; }, vec({1.0}), 1.0, 0.0, s);
  EXPECT_NEAR(tr.x_back()[0], std::exp(1.0), 1e-10);
  EXPECT_FALSE(tr.increasing());
}

TEST(Integrate, MonotoneTimeAndMaxStep) {
  ode::Settings s;
  s.max_step = 0.05;
  const auto tr = ode::integrate([](double t, const Vector&) -> Vector { return vec({std::cos(t)}); }, vec({0.0}),
                                 0.0, 3.0, s);
  for (std::size_t k = 1; k < tr.size(); ++k) {
    EXPECT_GT(tr.t[k], tr.t[k - 1]);
    EXPECT_LE(tr.t[k] - tr.t[k - 1], 0.05 * (1 + 1e-12));
  }
  EXPECT_NEAR(tr.x_back()[0], std::sin(3.0), 1e-8);
}

TEST(Integrate, RejectsBadSettings) {
  ode::Settings s;
  auto f = [](double, const Vector& x) -> Vector { return x; };
  EXPECT_THROW(ode::integrate(f, vec({1.0}), 0.0, 0.0, s), std::invalid_argument);
  s.atol = 0;
  EXPECT_THROW(ode::integrate(f, vec({1.0}), 0.0, 1.0, s), std::invalid_argument);
}

TEST(Integrate, StepFailureOnBlowUp) {
  ode::Settings s;
  s.min_step = 1e-6;
  // x' = x^2 from 1 blows up at t = 1
  const auto tr = ode::integrate([](double, const Vector& x) -> Vector { return x.cwiseProduct(x); }, vec({1.0}), 0.0,
                                 2.0, s);
  EXPECT_EQ(tr.termination, ode::Termination::StepFailure);
  EXPECT_LT(tr.t_back(), 1.0);
}

TEST(Integrate, SelfConvergence) {
  // halving the tolerances moves the end state by less than the coarse tolerance
  auto f = [](double, const Vector& x) -> Vector { return vec({x[1], -std::sin(x[0])}); };
  ode::Settings a;
  a.atol = 1e-8;
  a.rtol = 1e-8;
  ode::Settings b = a;
  b.atol /= 2;
  b.rtol /= 2;
  const Vector xa = ode::integrate(f, vec({1.0, 0.0}), 0, 10, a).x_back();
  const Vector xb = ode::integrate(f, vec({1.0, 0.0}), 0, 10, b).x_back();
  EXPECT_LE((xa - xb).lpNorm<Eigen::Infinity>(), a.atol + a.rtol * xa.norm() + 1e-7);
}

TEST(Events, TerminalEventLocatedWithDirection) {
  ode::Settings s;
  ode::EventSpec e{"cross", [](double, const Vector& x) { return x[0] - 0.5; }, ode::Direction::Falling, true};
  const auto tr = ode::integrate([](double, const Vector& x) -> Vector { return -x; }, vec({1.0}), 0.0, 5.0, s, {e});
  ASSERT_EQ(tr.termination, ode::Termination::Event);
  ASSERT_TRUE(tr.terminal_event);
  EXPECT_LE(std::abs(tr.terminal_event->value), s.event_tol);
  EXPECT_NEAR(tr.terminal_event->t, std::log(2.0), 1e-9);
  // a rising event on the same function never fires
  ode::EventSpec r{"rise", e.fn, ode::Direction::Rising, true};
  EXPECT_EQ(ode::integrate([](double, const Vector& x) -> Vector { return -x; }, vec({1.0}), 0.0, 5.0, s, {r})
                .termination,
            ode::Termination::SpanEnd);
}

TEST(Events, NonTerminalEventsRecordedInOrder) {
  ode::Settings s;
  ode::EventSpec e{"zero", [](double, const Vector& x) { return x[0]; }, ode::Direction::Any, false};
  const auto tr = ode::integrate([](double, const Vector& x) -> Vector { return vec({x[1], -x[0]}); },
                                 vec({1.0, 0.0}), 0.0, 10.0, s, {e});
  ASSERT_EQ(tr.events.size(), 3u);  // cos t vanishes at pi/2, 3pi/2, 5pi/2
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(tr.events[k].t, M_PI / 2 + k * M_PI, 1e-8);
    EXPECT_LE(std::abs(tr.events[k].value), s.event_tol);
  }
}

TEST(AccSimulation, HeadwayDecreasesBackwardFromTangency) {
  const acc::AccParameters p;
  const auto sys = acc::acc_system(p);
  const auto r = acc::acc_tangency_g1_roots(p, 10.0);
  const Vector z = vec({10.0, r.z2[0], r.z3(0)});
  ode::Settings s;
  const auto in = ode::InputSchedule::constant(vec({p.u_min}), vec({p.d1_min, p.d2_max}), -5.0);
  const auto tr = ode::simulate(sys, z, in, 0.0, -5.0, s);
  ASSERT_EQ(tr.termination, ode::Termination::SpanEnd);
  double prev = sys.constraint(0).value(tr.x.front());
  EXPECT_NEAR(prev, 0.0, 1e-12);
  for (std::size_t k = 1; k < tr.size(); ++k) {
    const double g = sys.constraint(0).value(tr.x[k]);
    EXPECT_LT(g, prev);
    prev = g;
  }
}

TEST(FundamentalMatrix, LinearMatchesMatrixExponential) {
  Matrix A(3, 3);
  A << -0.3, 1.0, 0.2, -1.0, -0.1, 0.5, 0.0, 0.4, -0.7;
  const auto sys = linear(A);
  ode::Settings s;
  s.atol = 1e-12;
  s.rtol = 1e-12;
  const auto in = ode::InputSchedule::constant(vec({0.3}), vec({0.0}), 0.0);
  const auto base = ode::simulate(sys, vec({0.1, 0.2, -0.3}), in, 0.0, 4.0, s);
  const auto phi = ode::propagate_variational(sys, base, in, s);
  for (auto [t, r] : std::vector<std::pair<double, double>>{{4.0, 0.0}, {3.0, 1.0}, {2.5, 2.4}}) {
    EXPECT_LE((phi.at(t, r) - expm_oracle(A * (t - r))).cwiseAbs().maxCoeff(), 1e-8);
  }
  EXPECT_EQ(phi.at(1.5, 1.5), Matrix::Identity(3, 3));
}

TEST(FundamentalMatrix, CocycleAndLiouvilleOnAcc) {
  const acc::AccParameters p;
  const auto sys = acc::acc_system(p);
  ode::Settings s;
  s.atol = 1e-12;
  s.rtol = 1e-12;
  ode::InputSchedule in;
  in.times = {0.0, 2.0, 5.0};
  in.u = {vec({0.5}), vec({-0.5}), vec({0.1})};
  in.d = {vec({0.3, -0.4}), vec({-0.3, 0.4}), vec({0.0, 0.0})};
  const auto base = ode::simulate(sys, vec({20.0, 25.0, 60.0}), in, 0.0, 8.0, s);
  const auto phi = ode::propagate_variational(sys, base, in, s);
  const Matrix direct = phi.at(8.0, 0.0);
  const Matrix composed = phi.at(8.0, 3.5) * phi.at(3.5, 0.0);
  EXPECT_LE((direct - composed).cwiseAbs().maxCoeff(), 1e-6);

  // Liouville: det Phi = exp(int tr A), trace integrated by composite Simpson
  const int N = 2000;
  const double T = 8.0, h = T / N;
  auto trace = [&](double t) {
    const auto [u, d] = in.at(t);
    return eval_state_jacobian(sys, base.eval(t), u, d).trace();
  };
  double sum = trace(0) + trace(T);
  for (int k = 1; k < N; ++k) sum += (k % 2 ? 4.0 : 2.0) * trace(k * h);
  const double integral = sum * h / 3.0;
  EXPECT_NEAR(direct.determinant(), std::exp(integral), 1e-6);
}
