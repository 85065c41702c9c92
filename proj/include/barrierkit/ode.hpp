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

#ifndef BARRIERKIT_ODE_HPP
#define BARRIERKIT_ODE_HPP

// Explicit Runge-Kutta integration with dense output and event location.
//
// Integration runs from t0 to t1 in either direction. Internally the
// independent variable is sigma = sign(t1 - t0) * (t - t0), so backward
// integration is ordinary forward integration in sigma. Event directions
// (Rising / Falling) are taken along the direction of integration.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "barrierkit/errors.hpp"
#include "barrierkit/sysmodel.hpp"

namespace barrierkit::ode {

enum class Method { RK45, RK4 };

struct Settings {
  Method method = Method::RK45;
  double atol = 1e-10;
  double rtol = 1e-8;
  double max_step = std::numeric_limits<double>::infinity();
  double min_step = 1e-14;
  double initial_step = 0.0;  // 0 selects automatically
  double fixed_step = 1e-2;   // RK4 only
  long max_steps = 2'000'000;
  double event_tol = 1e-10;
};

enum class Direction { Rising, Falling, Any };

struct EventSpec {
  std::string name;
  std::function<double(double, const Vector&)> fn;
  Direction direction = Direction::Any;
  bool terminal = true;
};

struct EventHit {
  std::size_t index = 0;
  std::string name;
  double t = 0.0;
  Vector x;
  double value = 0.0;
};

enum class Termination { SpanEnd, Event, StepFailure };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::SpanEnd: return "SpanEnd";
    case Termination::Event: return "Event";
    case Termination::StepFailure: return "StepFailure";
  }
  return "unknown";
}

using Field = std::function<Vector(double, const Vector&)>;

/// Samples plus a continuous extension between consecutive samples.
class Trajectory {
 public:
  std::vector<double> t;
  std::vector<Vector> x;
  Termination termination = Termination::SpanEnd;
  std::optional<EventHit> terminal_event;
  std::vector<EventHit> events;  // non-terminal hits, in order

  std::size_t size() const { return t.size(); }
  bool empty() const { return t.empty(); }
  double t_front() const { return t.front(); }
  double t_back() const { return t.back(); }
  const Vector& x_back() const { return x.back(); }
  bool increasing() const { return t.size() < 2 || t.back() >= t.front(); }

  /// Dense-output state at time tq (clamped to the sampled span).
  Vector eval(double tq) const {
    if (t.empty()) throw std::logic_error("Trajectory::eval on empty trajectory");
    if (t.size() == 1) return x.front();
    const bool inc = increasing();
    auto key = [inc](double v) { return inc ? v : -v; };
    const double kq = std::clamp(key(tq), key(t.front()), key(t.back()));
    // index of the segment [k, k+1] containing kq
    std::size_t lo = 0;
    std::size_t hi = t.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (key(t[mid]) <= kq) lo = mid; else hi = mid;
    }
    const Segment& seg = segments_[lo];
    const double theta = (kq - seg.t0) / seg.h;  // seg.t0 is stored as a key
    return seg.eval(theta);
  }

  /// Appends a trajectory that starts where this one ends.
  void append(const Trajectory& next) {
    if (next.empty()) return;
    if (empty()) {
      *this = next;
      return;
    }
    for (std::size_t k = 1; k < next.t.size(); ++k) {
      t.push_back(next.t[k]);
      x.push_back(next.x[k]);
    }
    segments_.insert(segments_.end(), next.segments_.begin(), next.segments_.end());
    termination = next.termination;
    terminal_event = next.terminal_event;
    events.insert(events.end(), next.events.begin(), next.events.end());
  }

  struct Segment {
    double t0 = 0.0;  // key-space start (time times direction sign)
    double h = 0.0;   // key-space step length (> 0)
    bool hermite = false;
    std::array<Vector, 5> c;

    Vector eval(double theta) const {
      if (hermite) {
        // c = {y0, y1, h*f0, h*f1}
        const double t2 = theta * theta;
        const double t3 = t2 * theta;
        return (2 * t3 - 3 * t2 + 1) * c[0] + (t3 - 2 * t2 + theta) * c[2] +
               (-2 * t3 + 3 * t2) * c[1] + (t3 - t2) * c[3];
      }
      const double s = 1.0 - theta;
      return c[0] + theta * (c[1] + s * (c[2] + theta * (c[3] + s * c[4])));
    }
  };

  std::vector<Segment> segments_;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct DP {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  // continuous extension
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

inline double error_norm(const Vector& err, const Vector& y0, const Vector& y1, double atol,
                         double rtol) {
  double e = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = std::abs(err[i]) / sc;
    if (!std::isfinite(r) || !std::isfinite(y1[i])) return std::numeric_limits<double>::infinity();  // std::max drops NaN
    e = std::max(e, r);
  }
  return e;
}

inline bool crossed(Direction dir, double prev, double cur) {
  switch (dir) {
    case Direction::Rising: return prev < 0.0 && cur >= 0.0;
    case Direction::Falling: return prev > 0.0 && cur <= 0.0;
    case Direction::Any: return (prev < 0.0 && cur >= 0.0) || (prev > 0.0 && cur <= 0.0);
  }
  return false;
}

}  // namespace detail

/// Integrates dx/dt = field(t, x) from t0 to t1.
inline Trajectory integrate(const Field& field, const Vector& x0, double t0, double t1,
                            const Settings& s, const std::vector<EventSpec>& events = {}) {
  if (!(s.atol > 0.0) || !(s.rtol > 0.0) || !(s.event_tol > 0.0)) {
    throw std::invalid_argument("ode::integrate: tolerances must be positive");
  }
  if (!(t1 != t0) || !std::isfinite(t0) || !std::isfinite(t1)) {
    throw std::invalid_argument("ode::integrate: degenerate time span");
  }
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  auto time_of = [&](double sigma) { return t0 + dir * sigma; };
  auto f = [&](double sigma, const Vector& y) -> Vector { return dir * field(time_of(sigma), y); };

  Trajectory out;
  out.t.push_back(t0);
  out.x.push_back(x0);

  std::vector<double> ev_prev(events.size());
  for (std::size_t k = 0; k < events.size(); ++k) ev_prev[k] = events[k].fn(t0, x0);

  double sigma = 0.0;
  Vector y = x0;
  Vector k1 = f(0.0, y);
  const double min_step = std::max(s.min_step, 1e-14 * std::max(1.0, std::abs(t0)));

  double h = 0.0;
  if (s.method == Method::RK4) {
    h = std::min({s.fixed_step, s.max_step, span});
  } else if (s.initial_step > 0.0) {
    h = std::min({s.initial_step, s.max_step, span});
  } else {
    // Hairer's starting step heuristic
    const Vector sc = (s.atol + s.rtol * y.array().abs()).matrix();
    const double d0 = (y.array() / sc.array()).matrix().lpNorm<Eigen::Infinity>();
    const double d1 = (k1.array() / sc.array()).matrix().lpNorm<Eigen::Infinity>();
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    const Vector k2 = f(h0, y + h0 * k1);
    const double d2 = ((k2 - k1).array() / sc.array()).matrix().lpNorm<Eigen::Infinity>() / h0;
    const double h1 = (std::max(d1, d2) <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                  : std::pow(0.01 / std::max(d1, d2), 0.2);
    h = std::min({100 * h0, h1, s.max_step, span});
  }

  // Accepts the step [sigma, sigma + h] described by seg; returns true when
  // a terminal event ended the integration.
  auto accept = [&](Trajectory::Segment seg, const Vector& y_new, double sigma_new) {
    struct Hit {
      double theta;
      EventHit hit;
    };
    std::vector<Hit> hits;
    std::vector<double> ev_new(events.size());
    for (std::size_t k = 0; k < events.size(); ++k) {
      ev_new[k] = events[k].fn(time_of(sigma_new), y_new);
      if (!detail::crossed(events[k].direction, ev_prev[k], ev_new[k])) continue;
      // bisection on the continuous extension
      double lo = 0.0, hi = 1.0, flo = ev_prev[k];
      double theta = 1.0, fval = ev_new[k];
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = events[k].fn(time_of(sigma + mid * seg.h), seg.eval(mid));
        if (std::abs(fm) <= s.event_tol) {
          theta = mid;
          fval = fm;
          break;
        }
        if ((flo < 0.0) == (fm < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
          theta = hi;
          fval = fm;
        }
        if ((hi - lo) * seg.h <= 4e-16 * std::max(1.0, sigma)) break;
      }
      hits.push_back({theta, EventHit{k, events[k].name, time_of(sigma + theta * seg.h),
                                      seg.eval(theta), fval}});
    }
    std::sort(hits.begin(), hits.end(),
              [](const Hit& a, const Hit& b) { return a.theta < b.theta; });
    seg.t0 = dir * t0 + sigma;
    for (auto& hh : hits) {
      if (!events[hh.hit.index].terminal) {
        out.events.push_back(hh.hit);
        continue;
      }
      if (hh.theta > 0.0) {
        out.segments_.push_back(seg);
        out.t.push_back(hh.hit.t);
        out.x.push_back(hh.hit.x);
      }
      out.termination = Termination::Event;
      out.terminal_event = hh.hit;
      return true;
    }
    ev_prev = std::move(ev_new);
    out.segments_.push_back(seg);
    out.t.push_back(time_of(sigma_new));
    out.x.push_back(y_new);
    return false;
  };

  long steps = 0;
  using DP = detail::DP;
  while (sigma < span) {
    if (++steps > s.max_steps) {
      out.termination = Termination::StepFailure;
      return out;
    }
    bool last = false;
    if (sigma + h >= span) {
      h = span - sigma;
      last = true;
    }
    Trajectory::Segment seg;
    seg.h = h;
    Vector y_new;
    Vector k7;
    double h_next = h;
    if (!last && h < min_step) {
      out.termination = Termination::StepFailure;
      return out;
    }
    if (s.method == Method::RK4) {
      const Vector b = f(sigma + 0.5 * h, y + 0.5 * h * k1);
      const Vector c = f(sigma + 0.5 * h, y + 0.5 * h * b);
      const Vector d = f(sigma + h, y + h * c);
      y_new = y + (h / 6.0) * (k1 + 2 * b + 2 * c + d);
      k7 = f(sigma + h, y_new);
      seg.hermite = true;
      seg.c = {y, y_new, h * k1, h * k7, Vector()};
      h_next = std::min(s.fixed_step, s.max_step);
      if (!y_new.allFinite()) {
        out.termination = Termination::StepFailure;
        return out;
      }
    } else {
      const Vector k2 = f(sigma + DP::c2 * h, y + h * (DP::a21 * k1));
      const Vector k3 = f(sigma + DP::c3 * h, y + h * (DP::a31 * k1 + DP::a32 * k2));
      const Vector k4 =
          f(sigma + DP::c4 * h, y + h * (DP::a41 * k1 + DP::a42 * k2 + DP::a43 * k3));
      const Vector k5 = f(sigma + DP::c5 * h,
                          y + h * (DP::a51 * k1 + DP::a52 * k2 + DP::a53 * k3 + DP::a54 * k4));
      const Vector k6 = f(sigma + h, y + h * (DP::a61 * k1 + DP::a62 * k2 + DP::a63 * k3 +
                                              DP::a64 * k4 + DP::a65 * k5));
      y_new = y + h * (DP::a71 * k1 + DP::a73 * k3 + DP::a74 * k4 + DP::a75 * k5 + DP::a76 * k6);
      k7 = f(sigma + h, y_new);
      const Vector err = h * (DP::e1 * k1 + DP::e3 * k3 + DP::e4 * k4 + DP::e5 * k5 +
                              DP::e6 * k6 + DP::e7 * k7);
      const double en = detail::error_norm(err, y, y_new, s.atol, s.rtol);
      if (!std::isfinite(en) || en > 1.0) {
        h *= std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.2;
        if (h < min_step) {
          out.termination = Termination::StepFailure;
          return out;
        }
        continue;
      }
      const Vector r2 = y_new - y;
      const Vector r3 = h * k1 - r2;
      const Vector r4 = r2 - h * k7 - r3;
      const Vector r5 = h * (DP::d1 * k1 + DP::d3 * k3 + DP::d4 * k4 + DP::d5 * k5 +
                             DP::d6 * k6 + DP::d7 * k7);
      seg.hermite = false;
      seg.c = {y, r2, r3, r4, r5};
      const double fac = en > 0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2))) : 5.0;
      h_next = std::min(h * fac, s.max_step);
    }
    const double sigma_new = last ? span : sigma + h;
    if (accept(seg, y_new, sigma_new)) return out;
    sigma = sigma_new;
    y = y_new;
    k1 = k7;
    h = h_next;
  }
  out.termination = Termination::SpanEnd;
  return out;
}

/// Piecewise-constant inputs: segment k holds on [times[k], times[k+1]).
/// The last segment extends indefinitely; times before times[0] use segment 0.
struct InputSchedule {
  std::vector<double> times;
  std::vector<Vector> u;
  std::vector<Vector> d;

  static InputSchedule constant(const Vector& u0, const Vector& d0, double t0 = 0.0) {
    return InputSchedule{{t0}, {u0}, {d0}};
  }

  std::size_t size() const { return times.size(); }

  std::size_t segment(double t) const {
    std::size_t k = 0;
    while (k + 1 < times.size() && t >= times[k + 1]) ++k;
    return k;
  }

  std::pair<Vector, Vector> at(double t) const {
    const std::size_t k = segment(t);
    return {u[k], d[k]};
  }

  /// Breakpoints strictly inside (a, b), in the order travelled from a to b.
  std::vector<double> breaks_between(double a, double b) const {
    std::vector<double> out;
    const double lo = std::min(a, b), hi = std::max(a, b);
    for (std::size_t k = 1; k < times.size(); ++k) {
      if (times[k] > lo && times[k] < hi) out.push_back(times[k]);
    }
    if (b < a) std::reverse(out.begin(), out.end());
    return out;
  }
};

/// Integrates sys under a piecewise-constant input schedule, restarting at
/// every breakpoint so that no step straddles an input discontinuity.
inline Trajectory simulate(const ControlSystem& sys, const Vector& x0, const InputSchedule& in,
                           double t0, double t1, const Settings& s,
                           const std::vector<EventSpec>& events = {}) {
  std::vector<double> nodes{t0};
  for (double b : in.breaks_between(t0, t1)) nodes.push_back(b);
  nodes.push_back(t1);
  Trajectory out;
  Vector x = x0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double a = nodes[k], b = nodes[k + 1];
    if (a == b) continue;
    const auto [u, d] = in.at(0.5 * (a + b));
    Field field = [&sys, u = u, d = d](double, const Vector& xx) {
      return eval_dynamics(sys, xx, u, d);
    };
    Trajectory piece = integrate(field, x, a, b, s, events);
    out.append(piece);
    if (piece.termination != Termination::SpanEnd) return out;
    x = piece.x_back();
  }
  return out;
}

/// Fundamental matrix Phi(t, s) of the variational equation
/// dPhi/dt = (df/dx)(x(t), u(t), d(t)) Phi along a base trajectory.
class FundamentalMatrix {
 public:
  FundamentalMatrix(ControlSystem sys, Trajectory base, InputSchedule inputs, Settings s)
      : sys_(std::move(sys)), base_(std::move(base)), inputs_(std::move(inputs)), s_(s) {}

  const Trajectory& base() const { return base_; }
  const InputSchedule& inputs() const { return inputs_; }

  /// Phi(t, s); both times must lie within the base trajectory span.
  Matrix at(double t, double s) const {
    const int n = sys_.n();
    if (t == s) return Matrix::Identity(n, n);
    Vector y(n + n * n);
    y.head(n) = base_.eval(s);
    Eigen::Map<Matrix>(y.data() + n, n, n) = Matrix::Identity(n, n);
    std::vector<double> nodes{s};
    for (double b : inputs_.breaks_between(s, t)) nodes.push_back(b);
    nodes.push_back(t);
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
      const double a = nodes[k], b = nodes[k + 1];
      if (a == b) continue;
      const auto [u, d] = inputs_.at(0.5 * (a + b));
      Field field = [this, n, u = u, d = d](double, const Vector& yy) {
        Vector dy(yy.size());
        const Vector x = yy.head(n);
        dy.head(n) = eval_dynamics(sys_, x, u, d);
        const Matrix A = eval_state_jacobian(sys_, x, u, d);
        Eigen::Map<Matrix>(dy.data() + n, n, n) =
            A * Eigen::Map<const Matrix>(yy.data() + n, n, n);
        return dy;
      };
      Trajectory piece = integrate(field, y, a, b, s_);
      if (piece.termination != Termination::SpanEnd) {
        throw Error("FundamentalMatrix: variational integration failed (" +
                    std::string(to_string(piece.termination)) + ")");
      }
      y = piece.x_back();
    }
    return Eigen::Map<const Matrix>(y.data() + n, n, n);
  }

 private:
  ControlSystem sys_;
  Trajectory base_;
  InputSchedule inputs_;
  Settings s_;
};

inline FundamentalMatrix propagate_variational(const ControlSystem& sys, const Trajectory& base,
                                               const InputSchedule& inputs, const Settings& s) {
  if (base.termination == Termination::StepFailure) {
    throw Error("propagate_variational: base trajectory ended in step failure");
  }
  return FundamentalMatrix(sys, base, inputs, s);
}

}  // namespace barrierkit::ode

#endif  // BARRIERKIT_ODE_HPP
