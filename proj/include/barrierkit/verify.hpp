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

#ifndef BARRIERKIT_VERIFY_HPP
#define BARRIERKIT_VERIFY_HPP

// Numerical checks of the barrier theory on a registered system.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "barrierkit/barrier.hpp"
#include "barrierkit/ode.hpp"
#include "barrierkit/parallel.hpp"
#include "barrierkit/saddle.hpp"
#include "barrierkit/sysmodel.hpp"

namespace barrierkit::verify {

// ---------------------------------------------------------------------------
// Hamiltonian residual

struct ResidualReport {
  double max_residual = 0.0;
  double drift_slope = 0.0;  // least-squares slope of |lambda^T f| against arclength
  std::size_t samples = 0;
};

/// max |lambda^T f(x, u, d)| recomputed from the stored samples.
inline ResidualReport hamiltonian_residual(const ControlSystem& sys, const BarrierTrajectory& tr) {
  ResidualReport r;
  r.samples = tr.size();
  if (tr.size() == 0) return r;
  std::vector<double> h(tr.size());
  for (std::size_t k = 0; k < tr.size(); ++k) {
    h[k] = std::abs(tr.lambda[k].dot(sys.raw_dynamics(tr.x[k], tr.u[k], tr.d[k])));
    r.max_residual = std::max(r.max_residual, h[k]);
  }
  double sa = 0, sh = 0, saa = 0, sah = 0;
  const double N = static_cast<double>(tr.size());
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double a = tr.arclength[k];
    sa += a, sh += h[k], saa += a * a, sah += a * h[k];
  }
  const double den = N * saa - sa * sa;
  r.drift_slope = den > 0 ? (N * sah - sa * sh) / den : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Needle perturbations

struct NeedleSpec {
  Vector u_tilde, d_tilde;  // replacement input on [tau - l eps, tau)
  double tau = 0.0;
  double l = 1.0;
  Vector h;  // initial-state offset
  std::vector<double> eps;
};

struct NeedleReport {
  std::vector<double> eps;
  std::vector<double> error;  // E(eps)
  Vector w;                   // first-order variation at t_eval
  double order = 0.0;         // fitted slope of log E against log eps
  std::vector<double> ratios; // E(eps_k) / E(eps_{k+1})
  bool exact_zero = false;    // all E below the integration floor
};

/// Base inputs with the needle inserted on [tau - l eps, tau).
inline ode::InputSchedule insert_needle(const ode::InputSchedule& base, const NeedleSpec& spec,
                                        double eps) {
  const double a = spec.tau - spec.l * eps;
  const double b = spec.tau;
  if (!(a < b)) return base;
  const auto [ub, db] = base.at(b);
  struct Entry {
    double t;
    Vector u, d;
  };
  std::vector<Entry> entries;
  for (std::size_t k = 0; k < base.size(); ++k) {
    if (k > 0 && base.times[k] >= a && base.times[k] <= b) continue;
    entries.push_back({base.times[k], base.u[k], base.d[k]});
  }
  entries.push_back({a, spec.u_tilde, spec.d_tilde});
  entries.push_back({b, ub, db});
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& l, const Entry& r) { return l.t < r.t; });
  ode::InputSchedule out;
  for (auto& e : entries) {
    out.times.push_back(e.t);
    out.u.push_back(e.u);
    out.d.push_back(e.d);
  }
  return out;
}

/// w(t) = Phi(t, 0) h + l Phi(t, tau) (f(x(tau), v~) - f(x(tau), v(tau))).
inline Vector needle_variation(const ControlSystem& sys, const ode::FundamentalMatrix& phi,
                               const NeedleSpec& spec, double t_eval) {
  const Vector x_tau = phi.base().eval(spec.tau);
  // the needle occupies [tau - l eps, tau), so the displaced input is the one just before tau
  const auto [ub, db] = phi.inputs().at(std::nextafter(spec.tau, -std::numeric_limits<double>::infinity()));
  const Vector df = eval_dynamics(sys, x_tau, spec.u_tilde, spec.d_tilde) - eval_dynamics(sys, x_tau, ub, db);
  const double t0 = phi.base().t_front();
  return phi.at(t_eval, t0) * spec.h + spec.l * (phi.at(t_eval, spec.tau) * df);
}

inline NeedleReport check_needle(const ControlSystem& sys, const Vector& x0,
                                 const ode::InputSchedule& base, const NeedleSpec& spec,
                                 double t_eval, const ode::Settings& s) {
  const double t0 = base.times.front();
  if (spec.eps.empty()) throw std::invalid_argument("check_needle: empty epsilon list");
  for (double e : spec.eps) {
    if (!(e > 0.0) || spec.tau - spec.l * e < t0) {
      throw std::invalid_argument("check_needle: needle must start after the initial time");
    }
  }
  if (!(spec.tau > t0 && spec.tau < t_eval)) throw std::invalid_argument("check_needle: tau outside (t0, t_eval)");
  const ode::Trajectory xb = ode::simulate(sys, x0, base, t0, t_eval, s);
  if (xb.termination != ode::Termination::SpanEnd) throw Error("check_needle: base simulation failed");
  const ode::FundamentalMatrix phi = ode::propagate_variational(sys, xb, base, s);

  NeedleReport r;
  r.w = needle_variation(sys, phi, spec, t_eval);
  r.eps = spec.eps;
  const Vector x_end = xb.x_back();
  for (double e : spec.eps) {
    const ode::InputSchedule pert = insert_needle(base, spec, e);
    const ode::Trajectory xp = ode::simulate(sys, x0 + e * spec.h, pert, t0, t_eval, s);
    if (xp.termination != ode::Termination::SpanEnd) throw Error("check_needle: perturbed simulation failed");
    r.error.push_back((xp.x_back() - x_end - e * r.w).norm());
  }
  const double floor = 1e3 * (s.atol + s.rtol * x_end.norm());
  r.exact_zero = std::all_of(r.error.begin(), r.error.end(), [&](double v) { return v <= floor; });
  for (std::size_t k = 0; k + 1 < r.error.size(); ++k) r.ratios.push_back(r.error[k] / r.error[k + 1]);
  if (!r.exact_zero && r.eps.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double N = static_cast<double>(r.eps.size());
    for (std::size_t k = 0; k < r.eps.size(); ++k) {
      const double lx = std::log(r.eps[k]), ly = std::log(std::max(r.error[k], 1e-300));
      sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    r.order = (N * sxy - sx * sy) / (N * sxx - sx * sx);
  }
  return r;
}

/// Random needle on a random piecewise-constant base input over [0, T].
struct NeedleCase {
  Vector x0;
  ode::InputSchedule base;
  NeedleSpec spec;
  double t_eval;
};

inline NeedleCase random_needle_case(const ControlSystem& sys, const Box& x_box, double T,
                                     const std::vector<double>& eps, std::mt19937_64& rng) {
  auto uniform = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto sample_box = [&](const Box& b) {
    Vector v(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) v[i] = uniform(b.lower(i), b.upper(i));
    return v;
  };
  NeedleCase c;
  c.t_eval = T;
  c.x0 = sample_box(x_box);
  const int pieces = 4;
  for (int k = 0; k < pieces; ++k) {
    c.base.times.push_back(T * k / pieces);
    c.base.u.push_back(sample_box(sys.control_box()));
    c.base.d.push_back(sample_box(sys.disturbance_box()));
  }
  const double emax = *std::max_element(eps.begin(), eps.end());
  c.spec.eps = eps;
  c.spec.l = uniform(0.5, 2.0);
  // tau strictly inside one piece, far enough from its left breakpoint
  const int piece = std::uniform_int_distribution<int>(0, pieces - 1)(rng);
  const double lo = T * piece / pieces + c.spec.l * emax + 1e-3 * T;
  const double hi = T * (piece + 1) / pieces - 1e-3 * T;
  c.spec.tau = uniform(lo, hi);
  const auto [ub, db] = c.base.at(c.spec.tau);
  // a box vertex different from the base input
  std::vector<Vector> us = sys.control_box().vertices(), ds = sys.disturbance_box().vertices();
  do {
    c.spec.u_tilde = us[std::uniform_int_distribution<std::size_t>(0, us.size() - 1)(rng)];
    c.spec.d_tilde = ds[std::uniform_int_distribution<std::size_t>(0, ds.size() - 1)(rng)];
  } while ((c.spec.u_tilde - ub).norm() + (c.spec.d_tilde - db).norm() == 0.0);
  c.spec.h = Vector(sys.n());
  for (int i = 0; i < sys.n(); ++i) c.spec.h[i] = uniform(-1.0, 1.0);
  return c;
}

// ---------------------------------------------------------------------------
// Semi-permeability

struct PermeabilityReport {
  std::size_t probes = 0;
  std::size_t skipped_outside = 0;  // displaced point already violates a constraint
  std::size_t exited = 0;           // every candidate control left the constraint set
  double exit_fraction = 0.0;
  double replay_deviation = 0.0;
  bool replay_within_tube = false;
  double inward_exit_fraction = 0.0;  // recorded only
  std::vector<std::string> diagnostics;
};

struct PermeabilitySettings {
  double eps_geo = 1e-3;
  double horizon = 60.0;
  int n_controls = 16;
  int n_probes = 24;
  double tube_tol = 1e-5;
  std::uint64_t seed = 1;
  ode::Settings ode = [] {
    ode::Settings s;
    s.atol = 1e-12;
    s.rtol = 1e-10;
    return s;
  }();
};

namespace detail {

/// Forward integration from x0 at time t0 with the given control schedule;
/// the disturbance maximizes lambda^T F_d d for an adjoint transported along.
/// Returns true when some constraint becomes positive within the horizon.
inline bool exits_under_worst_disturbance(const ControlSystem& sys, const Vector& x0,
                                          const Vector& lambda0, const ode::InputSchedule& ctrl,
                                          double t0, double horizon, const SaddleSettings& ss,
                                          const ode::Settings& os) {
  const int n = sys.n();
  const Box& D = sys.disturbance_box();
  Vector y(2 * n);
  y.head(n) = x0;
  y.tail(n) = lambda0;
  double t = t0;
  const double t_end = t0 + horizon;
  for (int restarts = 0; restarts < 10000 && t < t_end; ++restarts) {
    const Vector u = ctrl.at(t).first;
    // disturbance from the sign of lambda^T F_d just ahead of t
    const Vector ll = y.tail(n);
    Vector d = D.midpoint();
    RowVector cd;
    if (sys.is_affine()) {
      cd = ll.transpose() * sys.affine()->disturbance_matrix(y.head(n));
      const Matrix A = eval_state_jacobian(sys, y.head(n), u, d);
      const Vector la = ll - 1e-6 * (A.transpose() * ll);
      const RowVector cda = la.transpose() * sys.affine()->disturbance_matrix(y.head(n));
      for (int k = 0; k < sys.w(); ++k) {
        const double c = std::abs(cd[k]) <= 1e-9 ? cda[k] : cd[k];
        d[k] = barrierkit::detail::bang_max(c, D.lower(k), D.upper(k), ss.switch_tol);
      }
    } else {
      // general systems: maximize lambda^T f over d for the current u
      d = barrierkit::detail::coordinate_min([&](const Vector& dd) { return -ll.dot(sys.raw_dynamics(y.head(n), u, dd)); },
                         D.midpoint(), D);
    }
    ode::Field field = [&sys, n, u, d](double, const Vector& yy) {
      Vector dy(2 * n);
      const Vector xx = yy.head(n);
      dy.head(n) = eval_dynamics(sys, xx, u, d);
      dy.tail(n) = -(eval_state_jacobian(sys, xx, u, d).transpose() * yy.tail(n));
      return dy;
    };
    std::vector<ode::EventSpec> ev;
    for (int j = 0; j < sys.p(); ++j) {
      ev.push_back({"g", [&sys, n, j](double, const Vector& yy) { return sys.constraint(j).value(yy.head(n)); },
                    ode::Direction::Rising, true});
    }
    const std::size_t n_exit = ev.size();
    if (sys.is_affine()) {
      for (int k = 0; k < sys.w(); ++k) {
        const double side = d[k] == D.upper(k) ? 1.0 : (d[k] == D.lower(k) ? -1.0 : 0.0);
        if (D.lower(k) == D.upper(k)) continue;
        ev.push_back({"switch",
                      [&sys, n, k](double, const Vector& yy) {
                        return (yy.tail(n).transpose() * sys.affine()->disturbance_matrix(yy.head(n)))[k];
                      },
                      side > 0 ? ode::Direction::Falling : (side < 0 ? ode::Direction::Rising : ode::Direction::Any),
                      true});
      }
    }
    const auto breaks = ctrl.breaks_between(t, t_end);
    const double t_stop = breaks.empty() ? t_end : breaks.front();
    const ode::Trajectory tr = ode::integrate(field, y, t, t_stop, os, ev);
    if (tr.termination == ode::Termination::StepFailure) return false;
    y = tr.x_back();
    t = tr.t_back();
    if (tr.termination == ode::Termination::Event) {
      if (tr.terminal_event->index < n_exit) return true;
    }
    if (max_constraint(sys, y.head(n)) > 0.0) return true;
  }
  return false;
}

}  // namespace detail

inline PermeabilityReport check_semipermeability(const ControlSystem& sys, const BarrierTrajectory& tr,
                                                 const PermeabilitySettings& ps,
                                                 const BarrierSettings& bs = {}) {
  PermeabilityReport rep;
  if (tr.coord >= 0) throw std::invalid_argument("check_semipermeability: needs a time-parameterized barrier");
  if (tr.size() < 3) {
    rep.diagnostics.push_back("trajectory too short");
    return rep;
  }
  const int n = sys.n();

  // (a) replay from the interior end with the stored inputs
  const ode::InputSchedule sched = tr.schedule();
  const ode::Trajectory replay = ode::simulate(sys, tr.x_end(), sched, tr.t.back(), 0.0, bs.ode);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    rep.replay_deviation = std::max(rep.replay_deviation, (replay.eval(tr.t[k]) - tr.x[k]).lpNorm<Eigen::Infinity>());
  }
  rep.replay_within_tube = rep.replay_deviation <= ps.tube_tol;

  // candidate controls: barrier schedule, box vertices, random bang-bang signals
  std::mt19937_64 rng(ps.seed);
  std::vector<ode::InputSchedule> family;
  {
    ode::InputSchedule b = sched;
    family.push_back(b);
    for (const Vector& v : sys.control_box().vertices()) {
      if (static_cast<int>(family.size()) >= ps.n_controls) break;
      family.push_back(ode::InputSchedule::constant(v, Vector::Zero(sys.w()), tr.t.back()));
    }
    const auto verts = sys.control_box().vertices();
    while (static_cast<int>(family.size()) < ps.n_controls) {
      ode::InputSchedule r;
      double t = tr.t.back();
      std::exponential_distribution<double> gap(0.5);
      while (t < ps.horizon) {
        r.times.push_back(t);
        r.u.push_back(verts[std::uniform_int_distribution<std::size_t>(0, verts.size() - 1)(rng)]);
        r.d.push_back(Vector::Zero(sys.w()));
        t += gap(rng);
      }
      family.push_back(r);
    }
  }

  // (b) outside probes at evenly spaced samples, origin excluded
  std::vector<std::size_t> idx;
  for (int k = 1; k <= ps.n_probes; ++k) {
    idx.push_back(std::min(tr.size() - 1, static_cast<std::size_t>(std::llround(
                                              static_cast<double>(k) * (tr.size() - 1) / ps.n_probes))));
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());

  struct Outcome {
    int state;  // 0 skipped, 1 exited, 2 stayed
    bool inward_exit;
  };
  const auto outcomes = parallel_map(idx, [&](std::size_t k) {
    const Vector lam = tr.lambda[k] / tr.lambda[k].norm();
    const Vector xo = tr.x[k] + ps.eps_geo * lam;
    Outcome o{0, false};
    if (max_constraint(sys, xo) > 0.0) return o;
    bool all_exit = true;
    for (const auto& ctrl : family) {
      if (!detail::exits_under_worst_disturbance(sys, xo, lam, ctrl, tr.t[k], ps.horizon, bs.saddle, ps.ode)) {
        all_exit = false;
        break;
      }
    }
    o.state = all_exit ? 1 : 2;
    const Vector xi = tr.x[k] - ps.eps_geo * lam;
    if (max_constraint(sys, xi) <= 0.0) {
      o.inward_exit = detail::exits_under_worst_disturbance(sys, xi, lam, family.front(), tr.t[k], ps.horizon,
                                                            bs.saddle, ps.ode);
    }
    return o;
  });
  std::size_t inward = 0, inward_total = 0;
  for (const auto& o : outcomes) {
    if (o.state == 0) {
      ++rep.skipped_outside;
      continue;
    }
    ++rep.probes;
    rep.exited += o.state == 1;
    ++inward_total;
    inward += o.inward_exit;
  }
  rep.exit_fraction = rep.probes ? static_cast<double>(rep.exited) / static_cast<double>(rep.probes) : 0.0;
  rep.inward_exit_fraction = inward_total ? static_cast<double>(inward) / static_cast<double>(inward_total) : 0.0;
  if (rep.skipped_outside) {
    rep.diagnostics.push_back(std::to_string(rep.skipped_outside) + " probes start outside the constraint set");
  }
  (void)n;
  return rep;
}

// ---------------------------------------------------------------------------
// Jacobian

/// Max over samples and entries of |J - J_fd| / max(1, |J|).
inline double check_jacobian(const ControlSystem& sys, int n_samples, std::uint64_t seed = 1,
                             const StateJacobian& override_jacobian = {}) {
  std::mt19937_64 rng(seed);
  auto sample = [&rng](const Box& b, double fallback) {
    Vector v(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      const double lo = std::isfinite(b.lower(i)) ? b.lower(i) : -fallback;
      const double hi = std::isfinite(b.upper(i)) ? b.upper(i) : fallback;
      v[i] = lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    return v;
  };
  double worst = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const Vector x = sample(sys.domain(), 10.0);
    const Vector u = sample(sys.control_box(), 1.0);
    const Vector d = sample(sys.disturbance_box(), 1.0);
    const Matrix J = override_jacobian ? override_jacobian(x, u, d) : eval_state_jacobian(sys, x, u, d);
    const Matrix F = finite_difference_jacobian(sys, x, u, d);
    for (Eigen::Index e = 0; e < J.size(); ++e) {
      const double a = J.data()[e], b = F.data()[e];
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Monte-Carlo admissibility oracle

struct OracleSettings {
  double horizon = 60.0;
  double dt = 0.02;  // zero-order hold and RK4 step
  // preview times, tried in order; the point is admissible if any one keeps g <= 0
  std::vector<double> previews{2.0, 4.0, 1.0, 8.0};
  int control_grid = 11;  // used when m == 1
};

namespace detail {

// Second-order preview of constraint i at the inputs (u, d):
//   g_i + T Dg_i f + T^2/2 Dg_i A f = g_i + r_i f,   r_i = Dg_i (T I + T^2/2 A)
// with A = df/dx frozen at the previous inputs. For affine systems f is
// linear in (u, d), so each candidate costs a few dot products.
struct Preview {
  std::vector<double> c;        // g_i + r_i f0 (affine) or g_i
  std::vector<RowVector> r, ru, rd;
  bool affine = false;
};

inline Preview make_preview(const ControlSystem& sys, const Vector& x, const Vector& u_prev,
                            const Vector& d_prev, double T) {
  Preview pv;
  pv.affine = sys.is_affine();
  const Matrix A = eval_state_jacobian(sys, x, u_prev, d_prev);
  const Matrix M = T * Matrix::Identity(sys.n(), sys.n()) + 0.5 * T * T * A;
  Vector f0;
  Matrix B, D;
  if (pv.affine) {
    f0 = sys.affine()->drift(x);
    B = sys.affine()->control_matrix(x);
    D = sys.affine()->disturbance_matrix(x);
  }
  for (int i = 0; i < sys.p(); ++i) {
    const RowVector ri = sys.constraint(i).gradient(x) * M;
    const double gi = sys.constraint(i).value(x);
    pv.r.push_back(ri);
    if (pv.affine) {
      pv.c.push_back(gi + ri.dot(f0));
      pv.ru.push_back(ri * B);
      pv.rd.push_back(ri * D);
    } else {
      pv.c.push_back(gi);
    }
  }
  return pv;
}

inline double preview_score(const ControlSystem& sys, const Preview& pv, const Vector& x, const Vector& u,
                            const Vector& d) {
  double worst = -std::numeric_limits<double>::infinity();
  if (pv.affine) {
    for (std::size_t i = 0; i < pv.c.size(); ++i) worst = std::max(worst, pv.c[i] + pv.ru[i].dot(u) + pv.rd[i].dot(d));
    return worst;
  }
  const Vector f = eval_dynamics(sys, x, u, d);
  for (std::size_t i = 0; i < pv.c.size(); ++i) worst = std::max(worst, pv.c[i] + pv.r[i].dot(f));
  return worst;
}

inline std::vector<Vector> control_candidates(const ControlSystem& sys, int grid) {
  const Box& U = sys.control_box();
  std::vector<Vector> out = U.vertices();
  if (sys.m() == 1 && grid > 1) {
    out.clear();
    for (int k = 0; k < grid; ++k) {
      Vector u(1);
      u[0] = U.lower(0) + (U.upper(0) - U.lower(0)) * k / (grid - 1);
      out.push_back(u);
    }
  } else {
    out.push_back(U.midpoint());
  }
  return out;
}

inline bool survives(const ControlSystem& sys, const Vector& x0, const OracleSettings& os, double T,
                     const std::vector<Vector>& us, const std::vector<Vector>& ds) {
  const int n = sys.n();
  const Box& dom = sys.domain();
  Vector x = x0;
  Vector u = sys.control_box().midpoint(), d = sys.disturbance_box().midpoint();
  const long steps = std::lround(os.horizon / os.dt);
  for (long k = 0; k < steps; ++k) {
    // u minimizes the worst preview; d then maximizes it against that u
    const Preview pv = make_preview(sys, x, u, d, T);
    double best = std::numeric_limits<double>::infinity();
    for (const Vector& uc : us) {
      double worst = -std::numeric_limits<double>::infinity();
      const Vector* dw = &ds.front();
      for (const Vector& dc : ds) {
        const double sc = preview_score(sys, pv, x, uc, dc);
        if (sc > worst) worst = sc, dw = &dc;
      }
      if (worst < best) best = worst, u = uc, d = *dw;
    }
    const double h = os.dt;
    // the state domain is an assumption on the model: its faces are not crossed
    auto f = [&](const Vector& xx) {
      Vector v = eval_dynamics(sys, xx, u, d);
      for (int j = 0; j < n; ++j) {
        if ((xx[j] >= dom.upper(j) && v[j] > 0.0) || (xx[j] <= dom.lower(j) && v[j] < 0.0)) v[j] = 0.0;
      }
      return v;
    };
    const Vector k1 = f(x), k2 = f(x + 0.5 * h * k1), k3 = f(x + 0.5 * h * k2), k4 = f(x + h * k3);
    x += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    x = dom.clamp(x);
    if (max_constraint(sys, x) > 0.0) return false;
  }
  return true;
}

}  // namespace detail

/// Forward simulation under a minimax preview feedback. The disturbance
/// answers each chosen control with the vertex that hurts most, so a
/// surviving run is evidence (not proof) of admissibility.
inline bool admissible_under_feedback(const ControlSystem& sys, const Vector& x0,
                                      const OracleSettings& os = {}) {
  if (max_constraint(sys, x0) > 0.0) return false;
  const auto us = detail::control_candidates(sys, os.control_grid);
  const auto ds = sys.disturbance_box().vertices();
  for (double T : os.previews) {
    if (detail::survives(sys, x0, os, T, us, ds)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const ResidualReport& r) {
  return {{"max_residual", r.max_residual}, {"drift_slope", r.drift_slope}, {"samples", r.samples}};
}

inline nlohmann::json to_json(const NeedleReport& r) {
  return {{"eps", r.eps}, {"error", r.error}, {"order", r.order}, {"ratios", r.ratios},
          {"exact_zero", r.exact_zero}, {"w", std::vector<double>(r.w.data(), r.w.data() + r.w.size())}};
}

inline nlohmann::json to_json(const PermeabilityReport& r) {
  return {{"probes", r.probes},
          {"skipped_outside", r.skipped_outside},
          {"exited", r.exited},
          {"exit_fraction", r.exit_fraction},
          {"replay_deviation", r.replay_deviation},
          {"replay_within_tube", r.replay_within_tube},
          {"inward_exit_fraction", r.inward_exit_fraction},
          {"diagnostics", r.diagnostics},
          {"disturbance_rule", "adjoint transported from the barrier costate; d maximizes lambda^T F_d d"}};
}

}  // namespace barrierkit::verify

#endif  // BARRIERKIT_VERIFY_HPP
