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

#ifndef BARRIERKIT_SYSMODEL_HPP
#define BARRIERKIT_SYSMODEL_HPP

// Constrained, disturbed control systems
//
//   dx/dt = f(x, u, d),   u in U (box),  d in D (box),
//   g_i(x) <= 0,          i = 0 .. p-1.
//
// Constraint indices are zero-based in the library API; user-facing
// output (CSV, CLI flags) numbers them from 1.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "barrierkit/errors.hpp"
#include "barrierkit/log.hpp"

namespace barrierkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

/// Axis-aligned box [lower, upper]. Bounds may be infinite for state domains.
class Box {
 public:
  Box() = default;
  Box(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() < 1 || lower_.size() != upper_.size()) {
      throw ConfigError("Box: bounds must be nonempty and of equal length");
    }
    for (Eigen::Index i = 0; i < lower_.size(); ++i) {
      if (std::isnan(lower_[i]) || std::isnan(upper_[i]) || lower_[i] > upper_[i]) {
        throw ConfigError("Box: lower[" + std::to_string(i) + "] > upper[" +
                          std::to_string(i) + "]");
      }
    }
  }

  static Box from(std::initializer_list<std::pair<double, double>> bounds) {
    return from(std::vector<std::pair<double, double>>(bounds));
  }
  static Box from(const std::vector<std::pair<double, double>>& bounds) {
    Vector lo(static_cast<Eigen::Index>(bounds.size()));
    Vector hi(lo.size());
    Eigen::Index k = 0;
    for (const auto& [a, b] : bounds) {
      lo[k] = a;
      hi[k] = b;
      ++k;
    }
    return Box(lo, hi);
  }

  Eigen::Index size() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  double lower(Eigen::Index i) const { return lower_[i]; }
  double upper(Eigen::Index i) const { return upper_[i]; }

  bool contains(const Vector& v, double tol = 0.0) const {
    for (Eigen::Index i = 0; i < size(); ++i) {
      if (v[i] < lower_[i] - tol || v[i] > upper_[i] + tol) return false;
    }
    return true;
  }

  Vector clamp(const Vector& v) const { return v.cwiseMax(lower_).cwiseMin(upper_); }

  Vector midpoint() const { return 0.5 * (lower_ + upper_); }

  /// Point of the box closest to the origin; the origin itself when inside.
  Vector nearest_to_zero() const { return clamp(Vector::Zero(size())); }

  /// All 2^k vertices, in lexicographic order of (lower < upper) per coordinate.
  std::vector<Vector> vertices() const {
    const auto k = static_cast<int>(size());
    std::vector<Vector> out;
    out.reserve(std::size_t{1} << k);
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
      Vector v(k);
      for (int i = 0; i < k; ++i) {
        // most significant coordinate first, so the list is lexicographic
        const bool up = (mask >> (k - 1 - i)) & 1u;
        v[i] = up ? upper_[i] : lower_[i];
      }
      out.push_back(v);
    }
    return out;
  }

  bool is_finite() const { return lower_.allFinite() && upper_.allFinite(); }

 private:
  Vector lower_;
  Vector upper_;
};

/// Scalar state constraint g(x) <= 0 with its gradient Dg(x).
struct Constraint {
  std::string name;
  std::function<double(const Vector&)> value;
  std::function<RowVector(const Vector&)> gradient;
};

/// f(x,u,d) = drift(x) + control_matrix(x) u + disturbance_matrix(x) d.
struct AffineStructure {
  std::function<Vector(const Vector&)> drift;
  std::function<Matrix(const Vector&)> control_matrix;
  std::function<Matrix(const Vector&)> disturbance_matrix;
};

enum class JacobianKind { Analytic, FiniteDifference };

using Dynamics = std::function<Vector(const Vector&, const Vector&, const Vector&)>;
using StateJacobian = std::function<Matrix(const Vector&, const Vector&, const Vector&)>;

/// Immutable description of a constrained control system.
class ControlSystem {
 public:
  struct Definition {
    std::string name;
    int n = 0;
    int m = 0;
    int w = 0;
    Dynamics dynamics;
    StateJacobian jacobian;  // empty: central differences
    Box control_box;
    Box disturbance_box;
    std::vector<Constraint> constraints;
    std::optional<AffineStructure> affine;
    Box domain;  // declared physical state domain (may be unbounded)
  };

  explicit ControlSystem(Definition def) : def_(std::move(def)) { validate(); }

  const std::string& name() const { return def_.name; }
  int n() const { return def_.n; }
  int m() const { return def_.m; }
  int w() const { return def_.w; }
  int p() const { return static_cast<int>(def_.constraints.size()); }
  const Box& control_box() const { return def_.control_box; }
  const Box& disturbance_box() const { return def_.disturbance_box; }
  const Box& domain() const { return def_.domain; }
  const std::vector<Constraint>& constraints() const { return def_.constraints; }
  const Constraint& constraint(int i) const { return def_.constraints.at(static_cast<std::size_t>(i)); }
  const std::optional<AffineStructure>& affine() const { return def_.affine; }
  bool is_affine() const { return def_.affine.has_value(); }
  JacobianKind jacobian_kind() const {
    return def_.jacobian ? JacobianKind::Analytic : JacobianKind::FiniteDifference;
  }
  const Definition& definition() const { return def_; }

  /// Raw vector field without clamping or finiteness checks.
  Vector raw_dynamics(const Vector& x, const Vector& u, const Vector& d) const {
    return def_.dynamics(x, u, d);
  }
  const StateJacobian& raw_jacobian() const { return def_.jacobian; }

 private:
  void validate() const {
    if (def_.n < 2) throw ConfigError("ControlSystem '" + def_.name + "': n must be >= 2");
    if (def_.m < 1 || def_.w < 1) {
      throw ConfigError("ControlSystem '" + def_.name + "': m and w must be >= 1");
    }
    if (def_.constraints.empty()) {
      throw ConfigError("ControlSystem '" + def_.name + "': at least one constraint required");
    }
    if (def_.control_box.size() != def_.m) {
      throw ConfigError("ControlSystem '" + def_.name + "': control box has wrong length");
    }
    if (def_.disturbance_box.size() != def_.w) {
      throw ConfigError("ControlSystem '" + def_.name + "': disturbance box has wrong length");
    }
    if (def_.domain.size() != def_.n) {
      throw ConfigError("ControlSystem '" + def_.name + "': state domain has wrong length");
    }
    if (!def_.dynamics) throw ConfigError("ControlSystem '" + def_.name + "': no dynamics");
    for (const auto& c : def_.constraints) {
      if (!c.value || !c.gradient) {
        throw ConfigError("ControlSystem '" + def_.name + "': constraint '" + c.name +
                          "' lacks value or gradient");
      }
    }
    if (def_.affine) check_affine_consistency();
  }

  void check_affine_consistency() const {
    const auto& a = *def_.affine;
    if (!a.drift || !a.control_matrix || !a.disturbance_matrix) {
      throw ConfigError("ControlSystem '" + def_.name + "': incomplete affine structure");
    }
    std::mt19937_64 rng(0x5eed);
    auto sample = [&rng](const Box& b, double fallback) {
      Vector v(b.size());
      for (Eigen::Index i = 0; i < b.size(); ++i) {
        double lo = std::isfinite(b.lower(i)) ? b.lower(i) : -fallback;
        double hi = std::isfinite(b.upper(i)) ? b.upper(i) : fallback;
        if (lo > hi) std::swap(lo, hi);
        v[i] = std::uniform_real_distribution<double>(lo, hi)(rng);
      }
      return v;
    };
    for (int k = 0; k < 16; ++k) {
      const Vector x = sample(def_.domain, 10.0);
      const Vector u = sample(def_.control_box, 1.0);
      const Vector d = sample(def_.disturbance_box, 1.0);
      const Vector f = def_.dynamics(x, u, d);
      const Vector g = a.drift(x) + a.control_matrix(x) * u + a.disturbance_matrix(x) * d;
      const double err = (f - g).lpNorm<Eigen::Infinity>();
      if (!(err <= 1e-10 * std::max(1.0, f.lpNorm<Eigen::Infinity>()))) {
        throw ConfigError("ControlSystem '" + def_.name +
                          "': affine decomposition disagrees with dynamics (" +
                          std::to_string(err) + ")");
      }
    }
  }

  Definition def_;
};

namespace detail {

inline void check_finite(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw NumericalError(what, static_cast<int>(i));
  }
}

inline Vector clamp_logged(const Box& box, const Vector& v, const char* which) {
  const double tol = 1e-9 * std::max(1.0, v.lpNorm<Eigen::Infinity>());
  if (box.contains(v, tol)) return box.clamp(v);
  log::warn("input_clamped", {{"input", which}, {"norm_excess",
                                 (v - box.clamp(v)).lpNorm<Eigen::Infinity>()}});
  return box.clamp(v);
}

}  // namespace detail

/// f(x,u,d); inputs outside their boxes are clamped with a warning.
inline Vector eval_dynamics(const ControlSystem& sys, const Vector& x, const Vector& u,
                            const Vector& d) {
  const Vector uc = detail::clamp_logged(sys.control_box(), u, "u");
  const Vector dc = detail::clamp_logged(sys.disturbance_box(), d, "d");
  Vector f = sys.raw_dynamics(x, uc, dc);
  detail::check_finite(f, "eval_dynamics: non-finite vector field");
  return f;
}

/// Per-coordinate central-difference step used for Jacobians.
inline double fd_step(double xj) { return std::max(1e-6, 1e-6 * std::abs(xj)); }

/// Central-difference state Jacobian, independent of any analytic Jacobian.
/// One Richardson step on h and 2h makes it fourth order, so a fairly large
/// h keeps the rounding error small.
inline Matrix finite_difference_jacobian(const ControlSystem& sys, const Vector& x,
                                         const Vector& u, const Vector& d) {
  const int n = sys.n();
  Matrix J(n, n);
  Vector xp = x;
  Vector xm = x;
  auto central = [&](int j, double h) -> Vector {
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    const double hh = 0.5 * (xp[j] - xm[j]);  // the step actually taken
    Vector c = (sys.raw_dynamics(xp, u, d) - sys.raw_dynamics(xm, u, d)) / (2.0 * hh);
    xp[j] = x[j];
    xm[j] = x[j];
    return c;
  };
  for (int j = 0; j < n; ++j) {
    const double h = 1e-3 * std::max(1.0, std::abs(x[j]));
    J.col(j) = (4.0 * central(j, h) - central(j, 2.0 * h)) / 3.0;
  }
  return J;
}

/// df/dx: analytic when the system supplies one, central differences otherwise.
inline Matrix eval_state_jacobian(const ControlSystem& sys, const Vector& x, const Vector& u,
                                  const Vector& d) {
  const Vector uc = detail::clamp_logged(sys.control_box(), u, "u");
  const Vector dc = detail::clamp_logged(sys.disturbance_box(), d, "d");
  Matrix J = sys.raw_jacobian() ? sys.raw_jacobian()(x, uc, dc)
                                : finite_difference_jacobian(sys, x, uc, dc);
  for (Eigen::Index k = 0; k < J.size(); ++k) {
    if (!std::isfinite(J.data()[k])) {
      throw NumericalError("eval_state_jacobian: non-finite entry", static_cast<int>(k));
    }
  }
  return J;
}

inline Vector constraint_values(const ControlSystem& sys, const Vector& x) {
  Vector g(sys.p());
  for (int i = 0; i < sys.p(); ++i) g[i] = sys.constraint(i).value(x);
  return g;
}

inline double max_constraint(const ControlSystem& sys, const Vector& x) {
  return constraint_values(sys, x).maxCoeff();
}

inline constexpr double kDefaultActivationTol = 1e-8;

/// Indices of active constraints: |g_i(x)| <= tolerance.
struct ActiveSet {
  std::vector<int> indices;
  double tolerance = kDefaultActivationTol;

  bool empty() const { return indices.empty(); }
  std::size_t size() const { return indices.size(); }
  bool contains(int i) const {
    return std::find(indices.begin(), indices.end(), i) != indices.end();
  }
};

inline ActiveSet active_set(const ControlSystem& sys, const Vector& x,
                            double tol = kDefaultActivationTol) {
  if (!(tol > 0.0)) throw std::invalid_argument("active_set: tolerance must be positive");
  ActiveSet out;
  out.tolerance = tol;
  for (int i = 0; i < sys.p(); ++i) {
    const double g = sys.constraint(i).value(x);
    if (std::abs(g) <= tol && g >= -tol) out.indices.push_back(i);
  }
  return out;
}

/// L_f g_i(x,u,d) = Dg_i(x) f(x,u,d).
inline double lie_derivative(const ControlSystem& sys, int i, const Vector& x, const Vector& u,
                             const Vector& d) {
  if (i < 0 || i >= sys.p()) throw std::out_of_range("lie_derivative: constraint index");
  return sys.constraint(i).gradient(x).dot(eval_dynamics(sys, x, u, d));
}

}  // namespace barrierkit

#endif  // BARRIERKIT_SYSMODEL_HPP
