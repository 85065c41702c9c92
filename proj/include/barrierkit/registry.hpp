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

#ifndef BARRIERKIT_REGISTRY_HPP
#define BARRIERKIT_REGISTRY_HPP

// Compiled-in systems selected by name. A system file looks like
//   {"system": "acc", "params": {...}, "control_box": [[lo, hi]], "disturbance_box": [[lo, hi], ...]}
// and unknown keys are rejected at every level.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "barrierkit/acc_model.hpp"
#include "barrierkit/config.hpp"
#include "barrierkit/errors.hpp"
#include "barrierkit/sysmodel.hpp"

namespace barrierkit::registry {

using nlohmann::json;

inline std::vector<std::string> system_names() { return {"acc", "double_integrator", "linear"}; }

/// Per-system defaults used by the command line.
struct Defaults {
  std::vector<int> fixed_coords;    // slice parameters
  std::optional<Box> search_box;    // tangency bracketing
  double horizon = 100.0;           // barrier horizon in time units
  std::vector<double> grid;         // parameter values for slices
};

// double integrator ----------------------------------------------------------
//   x1' = x2, x2' = u + d,  |x1| <= x1_max
// barrier x1 = x1_max - x2^2 / (2 (u_max - d_max)) from the tangency (x1_max, 0)

struct DoubleIntegratorParameters {
  double u_max = 1.0;
  double d_max = 0.5;
  double x1_max = 1.0;
  double x2_bound = 3.0;  // state domain |x2| <= x2_bound
};

inline ControlSystem double_integrator(const DoubleIntegratorParameters& p) {
  if (!(p.u_max > p.d_max && p.d_max >= 0.0 && p.x1_max > 0.0 && p.x2_bound > 0.0)) {
    throw ConfigError("double_integrator: need u_max > d_max >= 0 and positive bounds");
  }
  ControlSystem::Definition def;
  def.name = "double_integrator";
  def.n = 2;
  def.m = 1;
  def.w = 1;
  def.dynamics = [](const Vector& x, const Vector& u, const Vector& d) {
    Vector f(2);
    f << x[1], u[0] + d[0];
    return f;
  };
  def.jacobian = [](const Vector&, const Vector&, const Vector&) {
    Matrix J = Matrix::Zero(2, 2);
    J(0, 1) = 1.0;
    return J;
  };
  def.control_box = Box::from({{-p.u_max, p.u_max}});
  def.disturbance_box = Box::from({{-p.d_max, p.d_max}});
  const double c = p.x1_max;
  def.constraints = {
      Constraint{"upper", [c](const Vector& x) { return x[0] - c; },
                 [](const Vector&) { return RowVector{{1.0, 0.0}}; }},
      Constraint{"lower", [c](const Vector& x) { return -x[0] - c; },
                 [](const Vector&) { return RowVector{{-1.0, 0.0}}; }},
  };
  def.affine = AffineStructure{[](const Vector& x) { return Vector{{x[1], 0.0}}; },
                               [](const Vector&) { return Matrix{{0.0}, {1.0}}; },
                               [](const Vector&) { return Matrix{{0.0}, {1.0}}; }};
  def.domain = Box::from({{-c, c}, {-p.x2_bound, p.x2_bound}});
  return ControlSystem(std::move(def));
}

// linear ------------------------------------------------------------------------
//   x' = A x + B u + D d,  C x - b <= 0 row by row

struct LinearParameters {
  Matrix A, B, D, C;
  Vector b;
  Box control_box = Box::from({{-1.0, 1.0}});
  Box disturbance_box = Box::from({{0.0, 0.0}});
  Box domain;
};

inline ControlSystem linear_system(const LinearParameters& p) {
  const auto n = p.A.rows();
  if (p.A.cols() != n || p.B.rows() != n || p.D.rows() != n || p.C.cols() != n || p.C.rows() != p.b.size()) {
    throw ConfigError("linear: inconsistent matrix sizes");
  }
  if (p.B.cols() != p.control_box.size() || p.D.cols() != p.disturbance_box.size() || p.domain.size() != n) {
    throw ConfigError("linear: box sizes do not match B, D or the state dimension");
  }
  ControlSystem::Definition def;
  def.name = "linear";
  def.n = static_cast<int>(n);
  def.m = static_cast<int>(p.B.cols());
  def.w = static_cast<int>(p.D.cols());
  const Matrix A = p.A, B = p.B, D = p.D;
  def.dynamics = [A, B, D](const Vector& x, const Vector& u, const Vector& d) -> Vector { return A * x + B * u + D * d; };
  def.jacobian = [A](const Vector&, const Vector&, const Vector&) -> Matrix { return A; };
  def.control_box = p.control_box;
  def.disturbance_box = p.disturbance_box;
  for (Eigen::Index r = 0; r < p.C.rows(); ++r) {
    const RowVector c = p.C.row(r);
    const double br = p.b[r];
    def.constraints.push_back(Constraint{"row" + std::to_string(r + 1),
                                         [c, br](const Vector& x) { return c.dot(x) - br; },
                                         [c](const Vector&) { return c; }});
  }
  def.affine = AffineStructure{[A](const Vector& x) -> Vector { return A * x; },
                               [B](const Vector&) -> Matrix { return B; },
                               [D](const Vector&) -> Matrix { return D; }};
  def.domain = p.domain;
  return ControlSystem(std::move(def));
}

namespace detail {

inline Matrix matrix_from_json(const json& j, const std::string& w) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError(w + ": expected a list of rows");
  const auto rows = static_cast<Eigen::Index>(j.size()), cols = static_cast<Eigen::Index>(j[0].size());
  Matrix M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) throw ConfigError(w + ": ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = config::detail::read_num(j[r][c], w);
  }
  return M;
}

}  // namespace detail

/// System file to ControlSystem. Box overrides replace the preset input boxes.
struct Selection {
  std::string name;
  ControlSystem system;
  Defaults defaults;
  acc::AccParameters acc;  // meaningful for "acc" only
};

inline Selection select(const json& cfg) {
  config::detail::reject_unknown(cfg, {"system", "params", "control_box", "disturbance_box"}, "system file");
  if (!cfg.contains("system") || !cfg.at("system").is_string()) throw ConfigError("system file: missing 'system'");
  const std::string name = cfg.at("system").get<std::string>();
  const json params = cfg.value("params", json::object());
  std::optional<Box> ub, db;
  if (cfg.contains("control_box")) ub = config::box_from_json(cfg.at("control_box"), "control_box");
  if (cfg.contains("disturbance_box")) db = config::box_from_json(cfg.at("disturbance_box"), "disturbance_box");

  if (name == "acc") {
    acc::AccParameters p;
    config::apply(p, params);
    if (ub) {
      if (ub->size() != 1) throw ConfigError("acc: control_box must have one interval");
      p.u_min = ub->lower(0), p.u_max = ub->upper(0);
    }
    if (db) {
      if (db->size() != 2) throw ConfigError("acc: disturbance_box must have two intervals");
      p.d1_min = db->lower(0), p.d1_max = db->upper(0), p.d2_min = db->lower(1), p.d2_max = db->upper(1);
    }
    p.validate();
    const double xh = acc::acc_speed_bound(p);
    Defaults d;
    d.fixed_coords = {0};
    d.search_box = Box::from({{0.0, xh}, {0.0, 100.0 * xh}, {0.0, 200.0 * xh}});
    d.horizon = 1000.0;
    for (int k = 0; k < 48; ++k) d.grid.push_back(xh * k / 47);
    return {name, acc::acc_system(p), d, p};
  }
  if (name == "double_integrator") {
    config::detail::reject_unknown(params, {"u_max", "d_max", "x1_max", "x2_bound"}, "params");
    DoubleIntegratorParameters p;
    config::detail::get(params, "u_max", p.u_max, "params");
    config::detail::get(params, "d_max", p.d_max, "params");
    config::detail::get(params, "x1_max", p.x1_max, "params");
    config::detail::get(params, "x2_bound", p.x2_bound, "params");
    if (ub || db) {
      if ((ub && (ub->size() != 1 || ub->lower(0) != -ub->upper(0))) ||
          (db && (db->size() != 1 || db->lower(0) != -db->upper(0)))) {
        throw ConfigError("double_integrator: boxes must be symmetric single intervals");
      }
      if (ub) p.u_max = ub->upper(0);
      if (db) p.d_max = db->upper(0);
    }
    Defaults d;
    d.horizon = 100.0;
    d.grid = {};
    return {name, double_integrator(p), d, {}};
  }
  if (name == "linear") {
    config::detail::reject_unknown(params, {"A", "B", "D", "C", "b", "domain"}, "params");
    for (const char* k : {"A", "B", "C", "b", "domain"}) {
      if (!params.contains(k)) throw ConfigError(std::string("linear: params.") + k + " is required");
    }
    LinearParameters p;
    p.A = detail::matrix_from_json(params.at("A"), "params.A");
    p.B = detail::matrix_from_json(params.at("B"), "params.B");
    p.C = detail::matrix_from_json(params.at("C"), "params.C");
    p.D = params.contains("D") ? detail::matrix_from_json(params.at("D"), "params.D") : Matrix::Zero(p.A.rows(), 1);
    const auto bv = params.at("b").get<std::vector<double>>();
    p.b = Eigen::Map<const Vector>(bv.data(), static_cast<Eigen::Index>(bv.size()));
    p.domain = config::box_from_json(params.at("domain"), "params.domain");
    if (ub) p.control_box = *ub;
    else p.control_box = Box(Vector::Constant(p.B.cols(), -1.0), Vector::Constant(p.B.cols(), 1.0));
    if (db) p.disturbance_box = *db;
    else p.disturbance_box = Box(Vector::Zero(p.D.cols()), Vector::Zero(p.D.cols()));
    Defaults d;
    for (int k = 0; k + 2 < p.A.rows(); ++k) d.fixed_coords.push_back(k);
    d.horizon = 100.0;
    return {name, linear_system(p), d, {}};
  }
  throw ConfigError("unknown system '" + name + "'");
}

inline Selection select(const std::string& name) { return select(json{{"system", name}}); }
inline Selection select(const char* name) { return select(std::string(name)); }

}  // namespace barrierkit::registry

#endif  // BARRIERKIT_REGISTRY_HPP
