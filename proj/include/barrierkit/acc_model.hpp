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

#ifndef BARRIERKIT_ACC_MODEL_HPP
#define BARRIERKIT_ACC_MODEL_HPP

// Adaptive cruise control: leader speed x1, follower speed x2, gap x3.
//
//   x1' = a + d1
//   x2' = -(a0 + a1 x2 + a2 x2^2) + grav (d2 + u)
//   x3' = x1 - x2
//
//   g1 = tau x2 - x3 <= 0   (time headway)
//   g2 = x3 - d_max  <= 0   (maximum distance)

#include <cmath>
#include <string>
#include <vector>

#include "barrierkit/errors.hpp"
#include "barrierkit/sysmodel.hpp"

namespace barrierkit::acc {

struct AccParameters {
  double tau = 1.8;
  double d_max = 100.0;
  double mass = 1650.0;
  double f0 = 0.1;
  double f1 = 5.0;
  double f2 = 0.25;
  double a = 0.0;  // nominal leader acceleration
  double grav = 9.81;
  double u_min = -0.5;  // -c_d
  double u_max = 0.5;   //  c_a
  double d1_min = -0.3, d1_max = 0.3;
  double d2_min = -0.4, d2_max = 0.4;

  double a0() const { return f0 / mass; }
  double a1() const { return f1 / mass; }
  double a2() const { return f2 / mass; }

  void validate() const {
    if (!(mass > 0) || !(f2 > 0) || !(tau > 0) || !(d_max > 0) || !(grav > 0)) {
      throw ConfigError("AccParameters: mass, f2, tau, d_max and grav must be positive");
    }
    if (!(u_min <= u_max) || !(d1_min <= d1_max) || !(d2_min <= d2_max)) {
      throw ConfigError("AccParameters: empty input box");
    }
    for (double v : {f0, f1, a}) {
      if (!std::isfinite(v)) throw ConfigError("AccParameters: non-finite parameter");
    }
  }
};

/// Largest admissible leader speed: positive root of
/// a2 x^2 + a1 x + a0 + a + d1_max - grav (d2_min + u_max) = 0.
inline double acc_speed_bound(const AccParameters& p) {
  p.validate();
  const double c = p.grav * p.d2_min + p.grav * p.u_max - p.a0() - p.a - p.d1_max;
  const double disc = p.a1() * p.a1() + 4.0 * p.a2() * c;
  if (disc < 0.0) throw NoBound("acc_speed_bound: negative discriminant");
  // numerically stable form of (-a1 + sqrt(disc)) / (2 a2)
  const double sq = std::sqrt(disc);
  if (p.a1() >= 0.0) return (2.0 * c) / (p.a1() + sq);
  return (-p.a1() + sq) / (2.0 * p.a2());
}

/// State domain used for root bracketing and barrier termination.
inline Box acc_domain(const AccParameters& p) {
  const double xh = acc_speed_bound(p);
  return Box::from({{0.0, xh}, {0.0, 2.0 * xh}, {0.0, 2.0 * p.d_max}});
}

inline ControlSystem acc_system(const AccParameters& p) {
  p.validate();
  const double a0 = p.a0(), a1 = p.a1(), a2 = p.a2();
  const double a = p.a, grav = p.grav, tau = p.tau, d_max = p.d_max;

  ControlSystem::Definition def;
  def.name = "acc";
  def.n = 3;
  def.m = 1;
  def.w = 2;
  def.dynamics = [=](const Vector& x, const Vector& u, const Vector& d) {
    Vector f(3);
    f[0] = a + d[0];
    f[1] = -(a0 + a1 * x[1] + a2 * x[1] * x[1]) + grav * d[1] + grav * u[0];
    f[2] = x[0] - x[1];
    return f;
  };
  def.jacobian = [=](const Vector& x, const Vector&, const Vector&) {
    Matrix J = Matrix::Zero(3, 3);
    J(1, 1) = -2.0 * a2 * x[1] - a1;
    J(2, 0) = 1.0;
    J(2, 1) = -1.0;
    return J;
  };
  def.control_box = Box::from({{p.u_min, p.u_max}});
  def.disturbance_box = Box::from({{p.d1_min, p.d1_max}, {p.d2_min, p.d2_max}});
  def.constraints = {
      Constraint{"headway", [=](const Vector& x) { return tau * x[1] - x[2]; },
                 [=](const Vector&) {
                   RowVector g(3);
                   g << 0.0, tau, -1.0;
                   return g;
                 }},
      Constraint{"max_distance", [=](const Vector& x) { return x[2] - d_max; },
                 [](const Vector&) {
                   RowVector g(3);
                   g << 0.0, 0.0, 1.0;
                   return g;
                 }},
  };
  def.affine = AffineStructure{
      [=](const Vector& x) {
        Vector f0(3);
        f0 << a, -(a0 + a1 * x[1] + a2 * x[1] * x[1]), x[0] - x[1];
        return f0;
      },
      [=](const Vector&) {
        Matrix B = Matrix::Zero(3, 1);
        B(1, 0) = grav;
        return B;
      },
      [=](const Vector&) {
        Matrix D = Matrix::Zero(3, 2);
        D(0, 0) = 1.0;
        D(1, 1) = grav;
        return D;
      }};
  def.domain = acc_domain(p);
  return ControlSystem(std::move(def));
}

/// Closed-form headway tangency: roots z2 of
/// -tau a2 z2^2 + (1 - tau a1) z2 - z1 - tau (a0 - grav u_min - grav d2_max) = 0,
/// smaller root first, with z3 = tau z2.
struct HeadwayRoots {
  double z1;
  std::vector<double> z2;  // ascending
  double z3(std::size_t k) const { return tau * z2.at(k); }
  double tau;
};

inline HeadwayRoots acc_tangency_g1_roots(const AccParameters& p, double z1) {
  p.validate();
  const double A = p.tau * p.a2();
  const double B = 1.0 - p.tau * p.a1();
  const double C = z1 + p.tau * (p.a0() - p.grav * p.u_min - p.grav * p.d2_max);
  // A z^2 - B z + C = 0
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) throw NoRoot("acc_tangency_g1: negative discriminant at z1 = " +
                               std::to_string(z1));
  const double sq = std::sqrt(disc);
  // cancellation-free pair: q = (B + sign(B) sq) / 2, roots C/q and q/A
  const double q = 0.5 * (B + std::copysign(sq, B));
  double r_small = q != 0.0 ? C / q : 0.0;
  double r_large = q / A;
  if (r_small > r_large) std::swap(r_small, r_large);
  return HeadwayRoots{z1, {r_small, r_large}, p.tau};
}

}  // namespace barrierkit::acc

#endif  // BARRIERKIT_ACC_MODEL_HPP
