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

#ifndef BARRIERKIT_SADDLE_HPP
#define BARRIERKIT_SADDLE_HPP

// Pointwise saddle problems over the input boxes:
//
//   min_u max_d  lambda^T f(x, u, d)                 (Hamiltonian)
//   min_u max_d  max_{i in I} L_f g_i(x, u, d)       (tangency condition)

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "barrierkit/errors.hpp"
#include "barrierkit/sysmodel.hpp"

namespace barrierkit {

enum class SaddleMethod { AffineClosedForm, Enumeration, BestResponse };

inline const char* to_string(SaddleMethod m) {
  switch (m) {
    case SaddleMethod::AffineClosedForm: return "AffineClosedForm";
    case SaddleMethod::Enumeration: return "Enumeration";
    case SaddleMethod::BestResponse: return "BestResponse";
  }
  return "unknown";
}

struct SaddleResult {
  Vector u_star;
  Vector d_star;
  double value = 0.0;
  double gap = 0.0;
  SaddleMethod method = SaddleMethod::AffineClosedForm;
};

struct SaddleSettings {
  double switch_tol = 1e-12;
  double saddle_tol = 1e-9;
  int max_iterations = 200;
};

namespace detail {

/// Input value used when a switching function vanishes: zero if the box
/// allows it, otherwise the box point nearest to zero.
inline double zero_convention(double lo, double hi) { return std::clamp(0.0, lo, hi); }

/// argmin over [lo, hi] of c * v, with the zero convention inside the band.
inline double bang_min(double c, double lo, double hi, double tol) {
  if (std::abs(c) <= tol) return zero_convention(lo, hi);
  return c > 0.0 ? lo : hi;
}

inline double bang_max(double c, double lo, double hi, double tol) {
  return bang_min(-c, lo, hi, tol);
}

/// Golden-section minimization of a function of one variable on [lo, hi];
/// the endpoints are compared explicitly so boundary optima are exact.
template <class F>
double golden_min(F&& fn, double lo, double hi) {
  if (lo == hi) return lo;
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int it = 0; it < 120 && (b - a) > 1e-13 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (fc <= fd) {
      b = d, d = c, fd = fc;
      c = b - r * (b - a), fc = fn(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + r * (b - a), fd = fn(d);
    }
  }
  double best = 0.5 * (a + b), fbest = fn(best);
  // ties resolve toward the smaller argument
  for (double cand : {hi, lo}) {
    const double fv = fn(cand);
    if (fv <= fbest) best = cand, fbest = fv;
  }
  return best;
}

/// Box-constrained coordinate descent, minimizing fn(v).
template <class F>
Vector coordinate_min(F&& fn, Vector v, const Box& box, int sweeps = 8) {
  for (int s = 0; s < sweeps; ++s) {
    const Vector before = v;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      auto line = [&](double t) {
        Vector w = v;
        w[j] = t;
        return fn(w);
      };
      v[j] = golden_min(line, box.lower(j), box.upper(j));
    }
    if ((v - before).lpNorm<Eigen::Infinity>() == 0.0) break;
  }
  return v;
}

}  // namespace detail

/// Saddle of lambda^T f over the input boxes.
inline SaddleResult saddle_hamiltonian(const ControlSystem& sys, const Vector& x,
                                       const Vector& lambda, const SaddleSettings& s = {}) {
  if (lambda.size() != sys.n()) throw std::invalid_argument("saddle_hamiltonian: lambda size");
  if (lambda.lpNorm<Eigen::Infinity>() == 0.0) {
    throw std::invalid_argument("saddle_hamiltonian: lambda must be nonzero");
  }
  const Box& U = sys.control_box();
  const Box& D = sys.disturbance_box();
  SaddleResult r;
  if (sys.is_affine()) {
    const auto& a = *sys.affine();
    const RowVector cu = lambda.transpose() * a.control_matrix(x);
    const RowVector cd = lambda.transpose() * a.disturbance_matrix(x);
    r.u_star.resize(sys.m());
    r.d_star.resize(sys.w());
    for (int j = 0; j < sys.m(); ++j) r.u_star[j] = detail::bang_min(cu[j], U.lower(j), U.upper(j), s.switch_tol);
    for (int k = 0; k < sys.w(); ++k) r.d_star[k] = detail::bang_max(cd[k], D.lower(k), D.upper(k), s.switch_tol);
    r.value = lambda.dot(eval_dynamics(sys, x, r.u_star, r.d_star));
    r.gap = 0.0;
    r.method = SaddleMethod::AffineClosedForm;
    return r;
  }

  // alternating best response
  auto H = [&](const Vector& u, const Vector& d) { return lambda.dot(sys.raw_dynamics(x, u, d)); };
  Vector u = U.midpoint(), d = D.midpoint();
  double gap = std::numeric_limits<double>::infinity();
  for (int it = 0; it < s.max_iterations; ++it) {
    d = detail::coordinate_min([&](const Vector& dd) { return -H(u, dd); }, d, D);
    u = detail::coordinate_min([&](const Vector& uu) { return H(uu, d); }, u, U);
    const Vector d_up = detail::coordinate_min([&](const Vector& dd) { return -H(u, dd); }, d, D);
    const Vector u_lo = detail::coordinate_min([&](const Vector& uu) { return H(uu, d); }, u, U);
    gap = H(u, d_up) - H(u_lo, d);
    if (gap <= s.saddle_tol) break;
  }
  if (!(gap <= s.saddle_tol)) {
    throw SaddleNotFound("saddle_hamiltonian: best response did not converge", gap);
  }
  r.u_star = u;
  r.d_star = d;
  r.value = H(u, d);
  r.gap = std::max(0.0, gap);
  r.method = SaddleMethod::BestResponse;
  return r;
}

namespace detail {

// Affine pieces phi_i(u, d) = c_i + a_i^T u + b_i^T d of L_f g_i.
struct LiePiece {
  double c;
  RowVector a, b;
};

inline LiePiece lie_piece(const ControlSystem& sys, int i, const Vector& x) {
  const auto& af = *sys.affine();
  const RowVector dg = sys.constraint(i).gradient(x);
  return LiePiece{dg.dot(af.drift(x)), dg * af.control_matrix(x), dg * af.disturbance_matrix(x)};
}

/// Candidate minimizers of max(phi_1, phi_2) over a box (phi affine in v):
/// all vertices plus the points on box edges where the pieces are equal.
inline std::vector<Vector> edge_candidates(const Box& box, const std::vector<double>& c,
                                           const std::vector<RowVector>& a) {
  std::vector<Vector> out = box.vertices();
  if (c.size() < 2) return out;
  const RowVector diff = a[0] - a[1];
  const double c_diff = c[0] - c[1];
  const auto n = box.size();
  for (const Vector& v : box.vertices()) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (v[j] != box.lower(j)) continue;  // each edge once, from its lower end
      if (std::abs(diff[j]) < 1e-300) continue;
      Vector w = v;
      w[j] = 0.0;
      const double t = -(c_diff + diff.dot(w)) / diff[j];
      if (t > box.lower(j) && t < box.upper(j)) {
        w[j] = t;
        out.push_back(w);
      }
    }
  }
  return out;
}

}  // namespace detail

/// Saddle of max_{i in I} L_f g_i. Supports up to two active constraints.
inline SaddleResult saddle_lie(const ControlSystem& sys, const Vector& x, const ActiveSet& I,
                               const SaddleSettings& s = {}) {
  if (I.empty()) throw std::invalid_argument("saddle_lie: empty active set");
  for (int i : I.indices) {
    if (i < 0 || i >= sys.p()) throw std::out_of_range("saddle_lie: constraint index");
  }
  if (I.size() == 1) {
    const RowVector dg = sys.constraint(I.indices.front()).gradient(x);
    if (dg.lpNorm<Eigen::Infinity>() == 0.0) {
      throw Degenerate("saddle_lie: vanishing constraint gradient");
    }
    return saddle_hamiltonian(sys, x, dg.transpose(), s);
  }
  if (I.size() > 2) throw Degenerate("saddle_lie: more than two active constraints");
  if (!sys.is_affine()) {
    throw Degenerate("saddle_lie: multiple active constraints need an affine system");
  }

  const Box& U = sys.control_box();
  const Box& D = sys.disturbance_box();
  std::vector<detail::LiePiece> pcs;
  for (int i : I.indices) pcs.push_back(detail::lie_piece(sys, i, x));

  // For fixed u the inner max over d decouples per piece.
  auto worst_d = [&](const detail::LiePiece& pc) {
    Vector d(sys.w());
    for (int k = 0; k < sys.w(); ++k) d[k] = detail::bang_max(pc.b[k], D.lower(k), D.upper(k), s.switch_tol);
    return d;
  };
  std::vector<double> cu;
  std::vector<RowVector> au;
  for (const auto& pc : pcs) {
    cu.push_back(pc.c + pc.b.dot(worst_d(pc)));
    au.push_back(pc.a);
  }
  auto upper_env = [&](const Vector& u) {
    return std::max(cu[0] + au[0].dot(u), cu[1] + au[1].dot(u));
  };
  Vector best_u;
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& u : detail::edge_candidates(U, cu, au)) {
    const double v = upper_env(u);
    if (best_u.size() == 0 || v < best - 1e-15 * std::max(1.0, std::abs(best))) {
      best = v;
      best_u = u;
    }
  }
  const std::size_t arg = (cu[0] + au[0].dot(best_u) >= cu[1] + au[1].dot(best_u)) ? 0 : 1;

  // max_d min_u over the d-vertices: a lower bound used for the reported gap
  double lower = -std::numeric_limits<double>::infinity();
  for (const Vector& d : D.vertices()) {
    std::vector<double> c2;
    for (const auto& pc : pcs) c2.push_back(pc.c + pc.b.dot(d));
    double inner = std::numeric_limits<double>::infinity();
    for (const Vector& u : detail::edge_candidates(U, c2, au)) {
      inner = std::min(inner, std::max(c2[0] + au[0].dot(u), c2[1] + au[1].dot(u)));
    }
    lower = std::max(lower, inner);
  }

  SaddleResult r;
  r.u_star = best_u;
  r.d_star = worst_d(pcs[arg]);
  r.value = best;
  r.gap = std::max(0.0, best - lower);
  r.method = SaddleMethod::Enumeration;
  return r;
}

}  // namespace barrierkit

#endif  // BARRIERKIT_SADDLE_HPP
