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

#ifndef BARRIERKIT_BARRIER_HPP
#define BARRIERKIT_BARRIER_HPP

// Barrier trajectories: backward integration of
//
//   x' = f(x, u*, d*),   lambda' = -(df/dx)^T lambda,
//   (u*, d*) = saddle of lambda^T f,
//
// from a tangency point z with lambda(0) = Dg_{i*}(z)^T. Times are offsets
// from the tangency time, so every sample has t <= 0.
//
// For affine systems the inputs are bang-bang: they are held constant on
// segments and the integration restarts wherever a switching function
// (lambda^T F_u)_j or (lambda^T F_d)_k changes sign.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "barrierkit/errors.hpp"
#include "barrierkit/log.hpp"
#include "barrierkit/ode.hpp"
#include "barrierkit/saddle.hpp"
#include "barrierkit/sysmodel.hpp"
#include "barrierkit/tangency.hpp"

namespace barrierkit {

enum class BarrierTermination { DomainEnd, ConstraintExit, SwitchLimit, StepFailure };

inline const char* to_string(BarrierTermination t) {
  switch (t) {
    case BarrierTermination::DomainEnd: return "DomainEnd";
    case BarrierTermination::ConstraintExit: return "ConstraintExit";
    case BarrierTermination::SwitchLimit: return "SwitchLimit";
    case BarrierTermination::StepFailure: return "StepFailure";
  }
  return "unknown";
}

struct BarrierSettings {
  ode::Settings ode = [] {
    ode::Settings s;
    s.atol = 1e-12;
    s.rtol = 1e-10;
    s.initial_step = 1e-4;
    s.max_step = 0.25;
    return s;
  }();
  double horizon = std::numeric_limits<double>::quiet_NaN();  // required, in time units
  int max_switches = 64;
  double hamiltonian_tol = 1e-6;
  double g_tol = 1e-8;
  double denom_tol = 1e-3;
  double lookahead = 1e-6;     // step used to resolve vanishing switching functions
  double switch_band = 1e-9;   // |switching function| below which the look-ahead decides
  bool reject_drift = true;    // throw HamiltonianDrift instead of returning
  bool stop_at_domain = true;
  bool stop_at_constraints = true;
  double max_arclength = std::numeric_limits<double>::infinity();
  SaddleSettings saddle;
};

/// Backward trajectory of the coupled state/adjoint system.
struct BarrierTrajectory {
  TangencyPoint origin;
  int coord = -1;  // integration variable: -1 for time, else a state index

  std::vector<double> s;  // integration variable per sample
  std::vector<double> t;  // time offset from tangency (<= 0)
  std::vector<Vector> x;
  std::vector<Vector> lambda;
  std::vector<Vector> u;
  std::vector<Vector> d;
  std::vector<double> hamiltonian;  // |lambda^T f| per sample
  std::vector<double> arclength;

  BarrierTermination termination = BarrierTermination::DomainEnd;
  int exit_constraint = -1;  // set for ConstraintExit
  std::string end_reason;    // event name or "horizon"
  std::vector<double> switching_times;
  std::vector<std::string> diagnostics;

  // One entry per constant-input segment (affine systems).
  struct Piece {
    ode::Trajectory traj;  // y = [x, lambda, t, arclength] versus s
    Vector u, d;
  };
  std::vector<Piece> pieces;

  std::size_t size() const { return t.size(); }
  double max_hamiltonian() const {
    return hamiltonian.empty() ? 0.0 : *std::max_element(hamiltonian.begin(), hamiltonian.end());
  }
  const Vector& x_end() const { return x.back(); }

  /// Inputs as a schedule in increasing time, for forward replay.
  ode::InputSchedule schedule() const {
    ode::InputSchedule out;
    for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
      const ode::Trajectory& tr = it->traj;
      const int n = static_cast<int>(origin.z.size());
      const double t_lo = std::min(tr.x.front()[2 * n], tr.x.back()[2 * n]);
      out.times.push_back(t_lo);
      out.u.push_back(it->u);
      out.d.push_back(it->d);
    }
    return out;
  }

  /// Dense [x, lambda, t, arclength] where component c first equals value,
  /// searching from the origin outward.
  std::optional<Vector> locate(int c, double value) const {
    for (const Piece& pc : pieces) {
      const ode::Trajectory& tr = pc.traj;
      for (std::size_t k = 1; k < tr.size(); ++k) {
        const double a = tr.x[k - 1][c] - value, b = tr.x[k][c] - value;
        if (a == 0.0) return tr.x[k - 1];
        if ((a < 0.0) == (b < 0.0) && b != 0.0) continue;
        double lo = tr.t[k - 1], hi = tr.t[k], flo = a;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = tr.eval(mid)[c] - value;
          if (fm == 0.0) return tr.eval(mid);
          if ((fm < 0.0) == (flo < 0.0)) lo = mid, flo = fm; else hi = mid;
          if (std::abs(hi - lo) <= 1e-15 * std::max(1.0, std::abs(lo))) break;
        }
        return tr.eval(0.5 * (lo + hi));
      }
    }
    return std::nullopt;
  }
};

namespace detail {

/// Switching coefficients (lambda^T F_u, lambda^T F_d) for affine systems.
inline std::pair<RowVector, RowVector> switching(const ControlSystem& sys, const Vector& x,
                                                 const Vector& lambda) {
  const auto& a = *sys.affine();
  return {lambda.transpose() * a.control_matrix(x), lambda.transpose() * a.disturbance_matrix(x)};
}

/// Saddle inputs for the backward flow starting at (x, lambda). Switching
/// functions inside the band are decided by their value a short step ahead
/// in backward time; the zero convention applies if that is also flat.
inline std::pair<Vector, Vector> select_inputs(const ControlSystem& sys, const Vector& x,
                                               const Vector& lambda, const BarrierSettings& s) {
  SaddleResult sr = saddle_hamiltonian(sys, x, lambda, s.saddle);
  auto [cu, cd] = switching(sys, x, lambda);
  bool ambiguous = false;
  for (Eigen::Index j = 0; j < cu.size(); ++j) ambiguous |= std::abs(cu[j]) <= s.switch_band;
  for (Eigen::Index k = 0; k < cd.size(); ++k) ambiguous |= std::abs(cd[k]) <= s.switch_band;
  if (!ambiguous) return {sr.u_star, sr.d_star};

  const double h = s.lookahead;
  const Vector f = eval_dynamics(sys, x, sr.u_star, sr.d_star);
  const Matrix A = eval_state_jacobian(sys, x, sr.u_star, sr.d_star);
  const Vector xa = x - h * f;
  const Vector la = lambda + h * (A.transpose() * lambda);
  const auto [cua, cda] = switching(sys, xa, la);
  const Box& U = sys.control_box();
  const Box& D = sys.disturbance_box();
  const double tol = s.saddle.switch_tol;
  for (Eigen::Index j = 0; j < cu.size(); ++j) {
    if (std::abs(cu[j]) <= s.switch_band) sr.u_star[j] = bang_min(cua[j], U.lower(j), U.upper(j), tol);
  }
  for (Eigen::Index k = 0; k < cd.size(); ++k) {
    if (std::abs(cd[k]) <= s.switch_band) sr.d_star[k] = bang_max(cda[k], D.lower(k), D.upper(k), tol);
  }
  return {sr.u_star, sr.d_star};
}

/// Sign a switching function takes under the chosen input, or 0 if flat.
inline double input_side(double v, double lo, double hi, bool minimizing) {
  if (lo == hi) return 0.0;
  if (v == lo) return minimizing ? 1.0 : -1.0;
  if (v == hi) return minimizing ? -1.0 : 1.0;
  return 0.0;
}

}  // namespace detail

namespace detail {

inline BarrierTrajectory trace_impl(const ControlSystem& sys, const TangencyPoint& tp,
                                    const BarrierSettings& s, int coord) {
  const int n = sys.n();
  if (!(s.horizon > 0.0) || !std::isfinite(s.horizon)) throw ConfigError("trace_barrier: a finite positive horizon is required");
  if (tp.z.size() != n) throw std::invalid_argument("trace_barrier: origin has wrong dimension");
  if (coord >= n) throw std::out_of_range("trace_barrier_reparam: coordinate index");
  const RowVector dg = sys.constraint(tp.active_index).gradient(tp.z);
  if (dg.lpNorm<Eigen::Infinity>() == 0.0) {
    throw std::invalid_argument("trace_barrier: zero final adjoint");
  }

  BarrierTrajectory out;
  out.origin = tp;
  out.coord = coord;

  Vector y(2 * n + 2);
  y.head(n) = tp.z;
  y.segment(n, n) = dg.transpose();
  y[2 * n] = 0.0;      // time offset
  y[2 * n + 1] = 0.0;  // arclength

  const bool affine = sys.is_affine();
  const Box& dom = sys.domain();
  const double horizon = s.horizon;

  auto push_samples = [&](const ode::Trajectory& tr, const Vector& u, const Vector& d, bool first) {
    for (std::size_t k = first ? 0 : 1; k < tr.size(); ++k) {
      const Vector& yy = tr.x[k];
      const Vector xk = yy.head(n), lk = yy.segment(n, n);
      Vector uk = u, dk = d;
      if (!affine) {
        const SaddleResult sr = saddle_hamiltonian(sys, xk, lk, s.saddle);
        uk = sr.u_star, dk = sr.d_star;
      }
      out.s.push_back(coord < 0 ? yy[2 * n] : yy[coord]);
      out.t.push_back(yy[2 * n]);
      out.x.push_back(xk);
      out.lambda.push_back(lk);
      out.u.push_back(uk);
      out.d.push_back(dk);
      out.hamiltonian.push_back(std::abs(lk.dot(sys.raw_dynamics(xk, uk, dk))));
      out.arclength.push_back(yy[2 * n + 1]);
    }
  };

  int switches = 0;
  bool first = true;
  std::vector<double> side_u, side_d;  // sign each switching function keeps in a segment
  for (;;) {
    const Vector xs = y.head(n), ls = y.segment(n, n);
    Vector u, d;
    if (affine) {
      std::tie(u, d) = select_inputs(sys, xs, ls, s);
    } else {
      const SaddleResult sr = saddle_hamiltonian(sys, xs, ls, s.saddle);
      u = sr.u_star, d = sr.d_star;
    }

    // time derivative of y under the segment inputs (or pointwise saddle)
    auto ydot = [&sys, n, affine, u, d, &s](const Vector& yy) {
      const Vector xx = yy.head(n), ll = yy.segment(n, n);
      Vector uu = u, dd = d;
      if (!affine) {
        const SaddleResult sr = saddle_hamiltonian(sys, xx, ll, s.saddle);
        uu = sr.u_star, dd = sr.d_star;
      }
      const Vector f = eval_dynamics(sys, xx, uu, dd);
      const Matrix A = eval_state_jacobian(sys, xx, uu, dd);
      Vector dy(2 * n + 2);
      dy.head(n) = f;
      dy.segment(n, n) = -(A.transpose() * ll);
      dy[2 * n] = 1.0;
      dy[2 * n + 1] = -f.norm();  // grows as time runs backward
      return dy;
    };

    std::vector<ode::EventSpec> ev;
    std::vector<std::string> kinds;  // "switch", "domain", "constraint:j", "horizon", "arc", "denom"
    if (affine) {
      const auto [cu, cd] = switching(sys, xs, ls);
      const Box& U = sys.control_box();
      const Box& D = sys.disturbance_box();
      for (Eigen::Index j = 0; j < cu.size(); ++j) {
        const double side = input_side(u[j], U.lower(j), U.upper(j), true);
        if (side == 0.0 && U.lower(j) == U.upper(j)) continue;
        ev.push_back({"switch_u" + std::to_string(j + 1),
                      [&sys, n, j](double, const Vector& yy) {
                        return switching(sys, yy.head(n), yy.segment(n, n)).first[j];
                      },
                      side > 0 ? ode::Direction::Falling
                               : (side < 0 ? ode::Direction::Rising : ode::Direction::Any),
                      true});
        kinds.push_back("switch");
      }
      for (Eigen::Index k = 0; k < cd.size(); ++k) {
        const double side = input_side(d[k], D.lower(k), D.upper(k), false);
        if (side == 0.0 && D.lower(k) == D.upper(k)) continue;
        ev.push_back({"switch_d" + std::to_string(k + 1),
                      [&sys, n, k](double, const Vector& yy) {
                        return switching(sys, yy.head(n), yy.segment(n, n)).second[k];
                      },
                      side > 0 ? ode::Direction::Falling
                               : (side < 0 ? ode::Direction::Rising : ode::Direction::Any),
                      true});
        kinds.push_back("switch");
      }
    }
    if (s.stop_at_domain) {
      for (int j = 0; j < n; ++j) {
        if (j == coord) continue;  // the span itself ends at the domain bound
        const double pad = 1e-12 * std::max(1.0, std::abs(dom.lower(j)) + std::abs(dom.upper(j)));
        if (std::isfinite(dom.lower(j))) {
          const double lo = dom.lower(j);
          ev.push_back({"domain_x" + std::to_string(j + 1) + "_min",
                        [j, lo, pad](double, const Vector& yy) { return yy[j] - lo + pad; },
                        ode::Direction::Falling, true});
          kinds.push_back("domain");
        }
        if (std::isfinite(dom.upper(j))) {
          const double hi = dom.upper(j);
          ev.push_back({"domain_x" + std::to_string(j + 1) + "_max",
                        [j, hi, pad](double, const Vector& yy) { return hi - yy[j] + pad; },
                        ode::Direction::Falling, true});
          kinds.push_back("domain");
        }
      }
    }
    if (s.stop_at_constraints) {
      for (int j = 0; j < sys.p(); ++j) {
        ev.push_back({"g" + std::to_string(j + 1),
                      [&sys, n, j](double, const Vector& yy) {
                        return sys.constraint(j).value(yy.head(n));
                      },
                      ode::Direction::Rising, true});
        kinds.push_back("constraint:" + std::to_string(j));
      }
    }
    if (std::isfinite(s.max_arclength)) {
      const double L = s.max_arclength;
      ev.push_back({"arclength", [n, L](double, const Vector& yy) { return yy[2 * n + 1] - L; },
                    ode::Direction::Rising, true});
      kinds.push_back("arc");
    }

    ode::Trajectory tr;
    if (coord < 0) {
      const double t_start = y[2 * n];
      const double t_end = -horizon;
      if (!(t_start > t_end)) {
        out.end_reason = "horizon";
        out.termination = BarrierTermination::DomainEnd;
        break;
      }
      ode::Field field = [&ydot](double, const Vector& yy) { return ydot(yy); };
      tr = ode::integrate(field, y, t_start, t_end, s.ode, ev);
    } else {
      const Vector f0 = eval_dynamics(sys, xs, u, d);
      const double fk = f0[coord];
      if (!(std::abs(fk) >= s.denom_tol)) {
        throw DenominatorSingular("trace_barrier_reparam: |dx" + std::to_string(coord + 1) +
                                  "/dt| = " + std::to_string(std::abs(fk)) +
                                  " below denominator tolerance");
      }
      // backward in time moves x_k against the sign of f_k
      const double s_start = y[coord];
      const double s_end = fk > 0 ? dom.lower(coord) : dom.upper(coord);
      if (!std::isfinite(s_end)) {
        throw ConfigError("trace_barrier_reparam: coordinate domain must be bounded");
      }
      if (s_start == s_end) {
        out.end_reason = "domain_x" + std::to_string(coord + 1);
        out.termination = BarrierTermination::DomainEnd;
        if (first) {
          ode::Trajectory single;
          single.t = {s_start};
          single.x = {y};
          push_samples(single, u, d, true);
          out.pieces.push_back({single, u, d});
        }
        break;
      }
      const double sign = fk > 0 ? 1.0 : -1.0;
      const double dt = s.denom_tol;
      ev.push_back({"denominator",
                    [&sys, n, coord, u, d, sign, dt](double, const Vector& yy) {
                      return sign * sys.raw_dynamics(yy.head(n), u, d)[coord] - dt;
                    },
                    ode::Direction::Falling, true});
      kinds.push_back("denom");
      const double t_lim = -horizon;
      ev.push_back({"horizon", [n, t_lim](double, const Vector& yy) { return yy[2 * n] - t_lim; },
                    ode::Direction::Falling, true});
      kinds.push_back("horizon");
      ode::Field field = [&ydot, coord](double, const Vector& yy) {
        const Vector dy = ydot(yy);
        return Vector(dy / dy[coord]);
      };
      tr = ode::integrate(field, y, s_start, s_end, s.ode, ev);
    }

    push_samples(tr, u, d, first);
    first = false;
    out.pieces.push_back({tr, u, d});
    y = tr.x_back();

    if (tr.termination == ode::Termination::StepFailure) {
      out.termination = BarrierTermination::StepFailure;
      out.end_reason = "step_failure";
      out.diagnostics.push_back("integrator step failure at t = " + std::to_string(y[2 * n]));
      break;
    }
    if (tr.termination == ode::Termination::SpanEnd) {
      out.termination = BarrierTermination::DomainEnd;
      out.end_reason = coord < 0 ? "horizon" : "domain_x" + std::to_string(coord + 1);
      break;
    }
    const ode::EventHit& hit = *tr.terminal_event;
    const std::string& kind = kinds[hit.index];
    if (kind == "switch") {
      out.switching_times.push_back(y[2 * n]);
      if (++switches > s.max_switches) {
        out.termination = BarrierTermination::SwitchLimit;
        out.end_reason = hit.name;
        break;
      }
      continue;
    }
    out.end_reason = hit.name;
    if (kind == "denom") {
      throw DenominatorSingular("trace_barrier_reparam: denominator fell below tolerance at t = " +
                                std::to_string(y[2 * n]));
    }
    if (kind.rfind("constraint:", 0) == 0) {
      out.termination = BarrierTermination::ConstraintExit;
      out.exit_constraint = std::stoi(kind.substr(11));
    } else {
      out.termination = BarrierTermination::DomainEnd;
      // a domain face that coincides with a constraint surface: the constraint wins the tie
      if (kind == "domain" && s.stop_at_constraints) {
        int best = -1;
        double gb = -s.g_tol;
        for (int j = 0; j < sys.p(); ++j) {
          const double gj = sys.constraint(j).value(y.head(n));
          if (gj >= gb) best = j, gb = gj;
        }
        if (best >= 0) {
          out.termination = BarrierTermination::ConstraintExit;
          out.exit_constraint = best;
          out.end_reason = "g" + std::to_string(best + 1);
        }
      }
    }
    break;
  }

  if (s.reject_drift && out.max_hamiltonian() > s.hamiltonian_tol) {
    throw HamiltonianDrift("trace_barrier: Hamiltonian residual above tolerance",
                           out.max_hamiltonian());
  }
  return out;
}

}  // namespace detail

/// Barrier trajectory integrated backward in time from a tangency point.
inline BarrierTrajectory trace_barrier(const ControlSystem& sys, const TangencyPoint& tp,
                                       const BarrierSettings& s) {
  return detail::trace_impl(sys, tp, s, -1);
}

/// Barrier trajectory with state coordinate k as the independent variable:
/// dy/dx_k = (dy/dt) / f_k. Throws DenominatorSingular when |f_k| is below
/// denom_tol.
inline BarrierTrajectory trace_barrier_reparam(const ControlSystem& sys, const TangencyPoint& tp,
                                               const BarrierSettings& s, int coord) {
  if (coord < 0 || coord >= sys.n()) throw std::out_of_range("trace_barrier_reparam: coordinate");
  return detail::trace_impl(sys, tp, s, coord);
}

}  // namespace barrierkit

#endif  // BARRIERKIT_BARRIER_HPP
