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

#ifndef BARRIERKIT_TANGENCY_HPP
#define BARRIERKIT_TANGENCY_HPP

// Ultimate tangentiality points: z with g_i(z) = 0 and
// min_u max_d L_f g_i(z, u, d) = 0.
//
// The boundary points form an (n-2)-dimensional family. Fixing n-2 chosen
// coordinates leaves two scalar equations in the two remaining ones, which
// are solved by a scan along the curve g_i = 0 followed by Newton polishing.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "barrierkit/errors.hpp"
#include "barrierkit/log.hpp"
#include "barrierkit/parallel.hpp"
#include "barrierkit/saddle.hpp"
#include "barrierkit/sysmodel.hpp"

namespace barrierkit {

struct TangencyPoint {
  Vector z;
  int active_index = 0;
  Vector u_star;
  Vector d_star;
  double res_g = 0.0;    // g_{i*}(z)
  double res_lie = 0.0;  // saddle Lie value at z
  Vector params;         // values of the fixed coordinates
  double parameter() const { return params.size() ? params[0] : 0.0; }
};

struct TangencySettings {
  std::vector<int> fixed_coords;  // n-2 coordinates that label the family
  std::optional<Box> search_box;  // defaults to the system's state domain
  int scan_points = 4000;
  double residual_tol = 1e-8;
  double dedup_tol = 1e-7;
  SaddleSettings saddle;
};

/// Root search failure for one parameter value.
struct TangencyIssue {
  Vector params;
  std::string kind;  // "NoRoot" or "Degenerate"
  std::string message;
};

struct TangencySearch {
  std::vector<TangencyPoint> points;  // ordered by parameter, then by z
  std::vector<TangencyIssue> issues;
};

namespace detail {

struct Reduced {
  const ControlSystem& sys;
  int i;
  Vector base;  // full state with fixed coordinates filled in
  int a, b;     // scan and solve coordinates
  SaddleSettings ss;

  Vector full(double ya, double yb) const {
    Vector x = base;
    x[a] = ya;
    x[b] = yb;
    return x;
  }
  double g(double ya, double yb) const { return sys.constraint(i).value(full(ya, yb)); }
  double lie(double ya, double yb) const {
    return saddle_lie(sys, full(ya, yb), ActiveSet{{i}, 1.0}, ss).value;
  }
};

/// Brent-style safeguarded secant/bisection on [lo, hi] with f(lo) f(hi) <= 0.
template <class F>
double bracketed_root(F&& f, double lo, double hi, double flo, double fhi) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  for (int it = 0; it < 200; ++it) {
    double m = hi - fhi * (hi - lo) / (fhi - flo);  // secant
    const double w = hi - lo;
    if (!(m > lo + 0.01 * w && m < hi - 0.01 * w)) m = 0.5 * (lo + hi);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = m, flo = fm;
    } else {
      hi = m, fhi = fm;
    }
    if (hi - lo <= 4e-16 * std::max(1.0, std::abs(lo) + std::abs(hi))) break;
  }
  return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

/// Solves g(ya, yb) = 0 for yb in [lo, hi], starting from a guess.
inline std::optional<double> solve_on_constraint(const Reduced& R, double ya, double lo, double hi,
                                                 std::optional<double> guess) {
  auto fb = [&](double yb) { return R.g(ya, yb); };
  if (guess) {
    double y = *guess;
    for (int it = 0; it < 8; ++it) {
      const double gy = fb(y);
      const double dg = R.sys.constraint(R.i).gradient(R.full(ya, y))[R.b];
      if (dg == 0.0) break;
      const double step = gy / dg;
      y -= step;
      if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(y))) {
        if (y >= lo && y <= hi) return y;
        break;
      }
    }
  }
  constexpr int kSamples = 64;
  double prev_y = lo, prev_f = fb(lo);
  for (int k = 1; k <= kSamples; ++k) {
    const double y = lo + (hi - lo) * k / kSamples;
    const double fy = fb(y);
    if ((prev_f <= 0.0 && fy >= 0.0) || (prev_f >= 0.0 && fy <= 0.0)) {
      return bracketed_root(fb, prev_y, y, prev_f, fy);
    }
    prev_y = y, prev_f = fy;
  }
  return std::nullopt;
}

inline std::vector<double> scan_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int k = 0; k <= n; ++k) out.push_back(lo + (hi - lo) * k / n);
  // extra resolution near the lower end, where small roots cluster
  const double span = hi - lo;
  for (int k = 0; k <= n / 4; ++k) {
    out.push_back(lo + span * std::pow(10.0, -8.0 + 8.0 * k / (n / 4)));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

/// All tangency points of constraint i for one value of the fixed coordinates.
/// Throws NoRoot when there is none and Degenerate at a singular root.
inline std::vector<TangencyPoint> find_tangency_points_at(const ControlSystem& sys, int i,
                                                          const Vector& params,
                                                          const TangencySettings& s) {
  const int n = sys.n();
  if (i < 0 || i >= sys.p()) throw std::out_of_range("find_tangency_points: constraint index");
  if (static_cast<int>(s.fixed_coords.size()) != n - 2 || params.size() != n - 2) {
    throw std::invalid_argument("find_tangency_points: need n-2 fixed coordinates and values");
  }
  const Box box = s.search_box.value_or(sys.domain());
  if (!box.is_finite()) throw std::invalid_argument("find_tangency_points: unbounded search box");

  std::vector<int> free;
  Vector base = box.midpoint();
  for (int j = 0; j < n; ++j) {
    auto it = std::find(s.fixed_coords.begin(), s.fixed_coords.end(), j);
    if (it == s.fixed_coords.end()) {
      free.push_back(j);
    } else {
      base[j] = params[it - s.fixed_coords.begin()];
    }
  }
  if (free.size() != 2) throw std::invalid_argument("find_tangency_points: duplicate fixed coordinate");

  // solve along the coordinate with the stronger influence on g_i
  const RowVector dg = sys.constraint(i).gradient(base);
  const double w0 = std::abs(dg[free[0]]) * (box.upper(free[0]) - box.lower(free[0]));
  const double w1 = std::abs(dg[free[1]]) * (box.upper(free[1]) - box.lower(free[1]));
  if (w0 == 0.0 && w1 == 0.0) throw Degenerate("find_tangency_points: g_i independent of free coordinates");
  const int b = w1 >= w0 ? free[1] : free[0];
  const int a = w1 >= w0 ? free[0] : free[1];
  detail::Reduced R{sys, i, base, a, b, s.saddle};

  // sample the curve g_i = 0 and the Lie value along it
  struct Sample {
    double ya, yb, lie;
  };
  std::vector<Sample> curve;
  std::optional<double> guess;
  for (double ya : detail::scan_grid(box.lower(a), box.upper(a), s.scan_points)) {
    auto yb = detail::solve_on_constraint(R, ya, box.lower(b), box.upper(b), guess);
    if (!yb) {
      guess.reset();
      curve.push_back({ya, std::nan(""), std::nan("")});
      continue;
    }
    guess = yb;
    curve.push_back({ya, *yb, R.lie(ya, *yb)});
  }

  std::vector<TangencyPoint> out;
  auto newton_polish = [&](double ya, double yb) {
    Degenerate singular("find_tangency_points: singular tangency system");
    for (int it = 0; it < 30; ++it) {
      const double F0 = R.g(ya, yb), F1 = R.lie(ya, yb);
      const RowVector gg = sys.constraint(i).gradient(R.full(ya, yb));
      const double ha = fd_step(ya), hb = fd_step(yb);
      const double La = (R.lie(ya + ha, yb) - R.lie(ya - ha, yb)) / (2 * ha);
      const double Lb = (R.lie(ya, yb + hb) - R.lie(ya, yb - hb)) / (2 * hb);
      const double det = gg[a] * Lb - gg[b] * La;
      const double scale = (std::abs(gg[a]) + std::abs(gg[b])) * (std::abs(La) + std::abs(Lb));
      if (!(std::abs(det) > 1e-12 * scale)) throw singular;
      const double da = (F0 * Lb - gg[b] * F1) / det;
      const double db = (gg[a] * F1 - La * F0) / det;
      ya -= da;
      yb -= db;
      if (std::abs(da) <= 1e-15 * std::max(1.0, std::abs(ya)) &&
          std::abs(db) <= 1e-15 * std::max(1.0, std::abs(yb))) {
        break;
      }
    }
    return std::pair{ya, yb};
  };

  // sign changes between samples, and samples where the Lie value is exactly zero
  std::vector<std::pair<double, double>> seeds;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const Sample& q = curve[k];
    if (std::isnan(q.lie)) continue;
    if (q.lie == 0.0) {
      seeds.push_back({q.ya, q.yb});
      continue;
    }
    if (k == 0) continue;
    const Sample& p = curve[k - 1];
    if (std::isnan(p.lie) || p.lie == 0.0 || (p.lie < 0.0) == (q.lie < 0.0)) continue;
    // refine along the curve
    std::optional<double> g2 = p.yb;
    auto lie_on_curve = [&](double ya) {
      auto yb = detail::solve_on_constraint(R, ya, box.lower(b), box.upper(b), g2);
      return yb ? R.lie(ya, *yb) : std::nan("");
    };
    const double ya0 = detail::bracketed_root(lie_on_curve, p.ya, q.ya, p.lie, q.lie);
    const auto yb0 = detail::solve_on_constraint(R, ya0, box.lower(b), box.upper(b), g2);
    if (yb0) seeds.push_back({ya0, *yb0});
  }

  for (const auto& [ya0, yb0] : seeds) {
    const auto [ya, yb] = newton_polish(ya0, yb0);
    TangencyPoint tp;
    tp.z = R.full(ya, yb);
    tp.active_index = i;
    tp.params = params;
    const SaddleResult sr = saddle_lie(sys, tp.z, ActiveSet{{i}, 1.0}, s.saddle);
    tp.u_star = sr.u_star;
    tp.d_star = sr.d_star;
    tp.res_g = sys.constraint(i).value(tp.z);
    tp.res_lie = sr.value;
    if (std::abs(tp.res_g) > s.residual_tol || std::abs(tp.res_lie) > s.residual_tol) {
      log::warn("tangency_residual", {{"constraint", i + 1}, {"res_g", tp.res_g},
                                      {"res_lie", tp.res_lie}});
      continue;
    }
    const bool dup = std::any_of(out.begin(), out.end(), [&](const TangencyPoint& o) {
      return (o.z - tp.z).lpNorm<Eigen::Infinity>() <= s.dedup_tol * std::max(1.0, tp.z.norm());
    });
    if (!dup) out.push_back(std::move(tp));
  }
  if (out.empty()) {
    throw NoRoot("find_tangency_points: no tangency point for constraint " +
                 std::to_string(i + 1) +
                 (params.size() ? " at parameter " + std::to_string(params[0]) : std::string()));
  }
  std::sort(out.begin(), out.end(), [](const TangencyPoint& l, const TangencyPoint& r) {
    return std::lexicographical_compare(l.z.data(), l.z.data() + l.z.size(), r.z.data(),
                                        r.z.data() + r.z.size());
  });
  return out;
}

/// Batch search over a parameter grid; failures are collected per value.
inline TangencySearch find_tangency_points(const ControlSystem& sys, int i,
                                           const std::vector<Vector>& grid,
                                           const TangencySettings& s) {
  if (grid.empty()) throw std::invalid_argument("find_tangency_points: empty grid");
  struct One {
    std::vector<TangencyPoint> pts;
    std::optional<TangencyIssue> issue;
  };
  auto results = parallel_map(grid, [&](const Vector& prm) {
    One r;
    try {
      r.pts = find_tangency_points_at(sys, i, prm, s);
    } catch (const NoRoot& e) {
      r.issue = TangencyIssue{prm, "NoRoot", e.what()};
    } catch (const Degenerate& e) {
      r.issue = TangencyIssue{prm, "Degenerate", e.what()};
    }
    return r;
  });
  TangencySearch out;
  for (auto& r : results) {
    for (auto& p : r.pts) out.points.push_back(std::move(p));
    if (r.issue) out.issues.push_back(std::move(*r.issue));
  }
  return out;
}

/// Scalar-parameter convenience form for three-state systems.
inline TangencySearch find_tangency_points(const ControlSystem& sys, int i,
                                           const std::vector<double>& grid,
                                           const TangencySettings& s) {
  std::vector<Vector> g;
  for (double v : grid) g.push_back(Vector::Constant(1, v));
  return find_tangency_points(sys, i, g, s);
}

}  // namespace barrierkit

#endif  // BARRIERKIT_TANGENCY_HPP
