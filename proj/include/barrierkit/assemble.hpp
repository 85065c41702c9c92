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

#ifndef BARRIERKIT_ASSEMBLE_HPP
#define BARRIERKIT_ASSEMBLE_HPP

// Two-dimensional slices of the admissible set boundary.
//
// The n-2 fixed coordinates label the barrier family; a slice collects the
// barrier arcs whose tangency point carries the slice parameter, projected
// onto the two remaining coordinates, together with the usable parts of the
// constraint boundary at the parameter value. The pieces are stitched into a
// closed polygon; gaps whose endpoints share a constraint or a face of the
// state domain are closed along it.
//
// The usable part is taken to be exactly the set where
// min_u max_d L_f g_i <= 0. This is a containment in general, so the
// reconstruction is an approximation wherever the two differ.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "barrierkit/barrier.hpp"
#include "barrierkit/errors.hpp"
#include "barrierkit/log.hpp"
#include "barrierkit/saddle.hpp"
#include "barrierkit/sysmodel.hpp"
#include "barrierkit/tangency.hpp"

namespace barrierkit {

using Point2 = Eigen::Vector2d;

enum class SegmentTag { BarrierArc, UsablePart, ConstraintEdge };

inline const char* to_string(SegmentTag t) {
  switch (t) {
    case SegmentTag::BarrierArc: return "BarrierArc";
    case SegmentTag::UsablePart: return "UsablePart";
    case SegmentTag::ConstraintEdge: return "ConstraintEdge";
  }
  return "unknown";
}

/// Supports a slice node can lie on: constraints 0..p-1, then the faces of
/// the state domain in the slice plane, p + 2c (lower) and p + 2c + 1 (upper)
/// for plane coordinate c in {0, 1}.
inline std::string support_label(int id, int p, const std::vector<int>& plane) {
  if (id < p) return "g" + std::to_string(id + 1);
  const int c = (id - p) / 2;
  return "x" + std::to_string(plane.at(static_cast<std::size_t>(c)) + 1) +
         ((id - p) % 2 ? "_max" : "_min");
}

struct SliceSettings {
  std::vector<int> fixed_coords;  // n-2 coordinates labelling the family
  double stitch_tol = 1e-4;
  double slice_tol = 1e-6;
  double support_tol = 1e-7;  // |g_j| or face distance counting as "on" it
  int scan_points = 2000;
  SaddleSettings saddle;
};

/// Maximal run of the constraint curve g_i = 0 where the usable-part
/// condition holds.
struct UsableSegment {
  int constraint = 0;
  std::vector<Vector> states;  // full states along the run
  bool starts_at_tangency = false;
  bool ends_at_tangency = false;
};

struct SliceSegment {
  SegmentTag tag = SegmentTag::ConstraintEdge;
  int ref = 0;  // arc index for BarrierArc, support id otherwise
  std::string label;
  std::vector<Point2> points;
};

struct Junction {
  Point2 point;
  int constraint = 0;
  int arc = 0;
  double angle = 0.0;  // between the arc and the constraint tangent, radians
};

struct AdmissibleSetSlice {
  Vector params;
  std::vector<int> plane;  // the two projected coordinates
  std::vector<SliceSegment> segments;  // closed, counter-clockwise
  std::vector<Junction> junctions;
  std::vector<std::string> diagnostics;
  double stitch_tol = 1e-4;

  double parameter() const { return params.size() ? params[0] : 0.0; }

  /// Closed vertex loop without the repeated first vertex.
  std::vector<Point2> polygon() const {
    std::vector<Point2> out;
    for (const auto& s : segments) {
      for (std::size_t k = 0; k + 1 < s.points.size(); ++k) out.push_back(s.points[k]);
    }
    return out;
  }
};

namespace detail {

inline std::vector<int> plane_coords(int n, const std::vector<int>& fixed) {
  if (static_cast<int>(fixed.size()) != n - 2) {
    throw std::invalid_argument("slice: need n-2 fixed coordinates");
  }
  std::vector<int> out;
  for (int j = 0; j < n; ++j) {
    if (std::find(fixed.begin(), fixed.end(), j) == fixed.end()) out.push_back(j);
  }
  if (out.size() != 2) throw std::invalid_argument("slice: duplicate fixed coordinate");
  return out;
}

inline Point2 project(const Vector& x, const std::vector<int>& plane) {
  return Point2(x[plane[0]], x[plane[1]]);
}

inline double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 ab = b - a;
  const double L2 = ab.squaredNorm();
  const double t = L2 > 0 ? std::clamp((p - a).dot(ab) / L2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

inline double polyline_distance(const Point2& p, const std::vector<Point2>& pts) {
  if (pts.size() == 1) return (p - pts[0]).norm();
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < pts.size(); ++k) d = std::min(d, point_segment_distance(p, pts[k - 1], pts[k]));
  return d;
}

/// Supports (constraints and plane faces) that a full state lies on.
inline std::vector<int> supports(const ControlSystem& sys, const Vector& x,
                                 const std::vector<int>& plane, double tol) {
  std::vector<int> out;
  for (int j = 0; j < sys.p(); ++j) {
    if (std::abs(sys.constraint(j).value(x)) <= tol * std::max(1.0, x.lpNorm<Eigen::Infinity>())) out.push_back(j);
  }
  const Box& dom = sys.domain();
  for (int c = 0; c < 2; ++c) {
    const int k = plane[static_cast<std::size_t>(c)];
    const double sc = tol * std::max(1.0, std::abs(x[k]));
    if (std::isfinite(dom.lower(k)) && std::abs(x[k] - dom.lower(k)) <= sc) out.push_back(sys.p() + 2 * c);
    if (std::isfinite(dom.upper(k)) && std::abs(x[k] - dom.upper(k)) <= sc) out.push_back(sys.p() + 2 * c + 1);
  }
  return out;
}

}  // namespace detail

/// Usable parts of constraint i in the slice with the given fixed values.
inline std::vector<UsableSegment> usable_part(const ControlSystem& sys, int i, const Vector& params,
                                              const SliceSettings& s) {
  const int n = sys.n();
  if (i < 0 || i >= sys.p()) throw std::out_of_range("usable_part: constraint index");
  const std::vector<int> plane = detail::plane_coords(n, s.fixed_coords);
  const Box& dom = sys.domain();
  if (!dom.is_finite()) throw ConfigError("usable_part: the state domain must be bounded");
  Vector base = dom.midpoint();
  for (std::size_t k = 0; k < s.fixed_coords.size(); ++k) base[s.fixed_coords[k]] = params[static_cast<Eigen::Index>(k)];

  const RowVector dg = sys.constraint(i).gradient(base);
  const int c0 = plane[0], c1 = plane[1];
  const double w0 = std::abs(dg[c0]) * (dom.upper(c0) - dom.lower(c0));
  const double w1 = std::abs(dg[c1]) * (dom.upper(c1) - dom.lower(c1));
  if (w0 == 0.0 && w1 == 0.0) return {};
  const int b = w1 >= w0 ? c1 : c0;
  const int a = w1 >= w0 ? c0 : c1;
  detail::Reduced R{sys, i, base, a, b, s.saddle};
  const double lo_b = dom.lower(b), hi_b = dom.upper(b);

  // condition <= 0 means usable and inside the other constraints
  auto condition = [&](double ya, double yb) {
    double c = R.lie(ya, yb);
    const Vector x = R.full(ya, yb);
    for (int j = 0; j < sys.p(); ++j) {
      if (j != i) c = std::max(c, sys.constraint(j).value(x));
    }
    return c;
  };

  struct P {
    double ya;
    std::optional<double> yb;
    double c;
  };
  std::vector<P> samples;
  std::optional<double> guess;
  for (int k = 0; k <= s.scan_points; ++k) {
    const double ya = dom.lower(a) + (dom.upper(a) - dom.lower(a)) * k / s.scan_points;
    auto yb = detail::solve_on_constraint(R, ya, lo_b, hi_b, guess);
    guess = yb;
    samples.push_back({ya, yb, yb ? condition(ya, *yb) : std::numeric_limits<double>::infinity()});
  }

  // Boundary of a run between a good sample p and a bad sample q.
  auto clip = [&](const P& good, const P& bad) -> Vector {
    double lo = good.ya, hi = bad.ya;
    std::optional<double> yb_lo = good.yb;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      auto yb = detail::solve_on_constraint(R, mid, lo_b, hi_b, yb_lo);
      if (yb && condition(mid, *yb) <= 0.0) {
        lo = mid;
        yb_lo = yb;
      } else {
        hi = mid;
      }
      if (std::abs(hi - lo) <= 1e-15 * std::max(1.0, std::abs(lo))) break;
    }
    return R.full(lo, *yb_lo);
  };

  std::vector<UsableSegment> out;
  std::optional<UsableSegment> cur;
  auto lie_zero = [&](const Vector& x) {
    return std::abs(saddle_lie(sys, x, ActiveSet{{i}, 1.0}, s.saddle).value) <= s.support_tol;
  };
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const P& q = samples[k];
    const bool good = q.c <= 0.0;
    if (good && !cur) {
      cur = UsableSegment{i, {}, false, false};
      if (k > 0) cur->states.push_back(clip(q, samples[k - 1]));
      cur->states.push_back(R.full(q.ya, *q.yb));
    } else if (good) {
      cur->states.push_back(R.full(q.ya, *q.yb));
    } else if (cur) {
      cur->states.push_back(clip(samples[k - 1], q));
      out.push_back(std::move(*cur));
      cur.reset();
    }
  }
  if (cur) out.push_back(std::move(*cur));
  for (auto& seg : out) {
    // drop duplicated clip points
    seg.states.erase(std::unique(seg.states.begin(), seg.states.end(),
                                 [](const Vector& l, const Vector& r) { return (l - r).norm() == 0.0; }),
                     seg.states.end());
    seg.starts_at_tangency = lie_zero(seg.states.front());
    seg.ends_at_tangency = lie_zero(seg.states.back());
  }
  return out;
}

namespace detail {

struct Edge {
  SegmentTag tag;
  int ref;
  int support;  // constraint (or face) the edge runs along, -1 for arcs
  std::vector<Point2> pts;
  int a = -1, b = -1;  // node ids
  bool alive = true;
};

struct Node {
  Point2 p;
  std::vector<int> supports;
  bool junction = false;
};

inline int add_node(std::vector<Node>& nodes, const Point2& p, const std::vector<int>& sup,
                    bool junction, double tol) {
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if ((nodes[k].p - p).norm() <= tol) {
      for (int sid : sup) {
        if (std::find(nodes[k].supports.begin(), nodes[k].supports.end(), sid) == nodes[k].supports.end()) {
          nodes[k].supports.push_back(sid);
        }
      }
      nodes[k].junction |= junction;
      return static_cast<int>(k);
    }
  }
  nodes.push_back({p, sup, junction});
  return static_cast<int>(nodes.size() - 1);
}

inline double signed_area(const std::vector<Point2>& poly) {
  double a = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Point2& p = poly[k];
    const Point2& q = poly[(k + 1) % poly.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

}  // namespace detail

enum class Containment { Inside, Boundary, Outside };

inline const char* to_string(Containment c) {
  switch (c) {
    case Containment::Inside: return "Inside";
    case Containment::Boundary: return "Boundary";
    case Containment::Outside: return "Outside";
  }
  return "unknown";
}

struct ContainsResult {
  Containment where = Containment::Outside;
  double distance = 0.0;  // to the boundary polyline
};

/// Ray casting with a boundary band of width stitch_tol.
inline ContainsResult contains(const AdmissibleSetSlice& slice, const Point2& q) {
  ContainsResult r;
  r.distance = std::numeric_limits<double>::infinity();
  for (const auto& s : slice.segments) r.distance = std::min(r.distance, detail::polyline_distance(q, s.points));
  if (r.distance <= slice.stitch_tol) {
    r.where = Containment::Boundary;
    return r;
  }
  const auto poly = slice.polygon();
  bool inside = false;
  for (std::size_t k = 0, j = poly.size() - 1; k < poly.size(); j = k++) {
    const Point2& a = poly[k];
    const Point2& b = poly[j];
    if ((a.y() > q.y()) != (b.y() > q.y())) {
      const double xc = a.x() + (q.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (q.x() < xc) inside = !inside;
    }
  }
  r.where = inside ? Containment::Inside : Containment::Outside;
  return r;
}

/// Shoelace area of the closed boundary.
inline double slice_area(const AdmissibleSetSlice& slice) {
  const auto poly = slice.polygon();
  if (poly.size() < 3) return 0.0;
  return std::abs(detail::signed_area(poly));
}

/// A boundary curve in state space that starts at a tangency point: a
/// barrier trajectory, or a curve assembled from several of them.
struct BoundaryCurve {
  TangencyPoint origin;
  std::vector<Vector> states;
};

/// Stitches boundary curves and usable segments into a closed slice boundary.
inline AdmissibleSetSlice build_slice(const ControlSystem& sys, const Vector& params,
                                      std::vector<BoundaryCurve> arcs,
                                      const std::vector<UsableSegment>& usable,
                                      const SliceSettings& s) {
  const int p = sys.p();
  const std::vector<int> plane = detail::plane_coords(sys.n(), s.fixed_coords);
  AdmissibleSetSlice slice;
  slice.params = params;
  slice.plane = plane;
  slice.stitch_tol = s.stitch_tol;

  for (const auto& u : usable) {
    for (const Vector& x : u.states) {
      for (std::size_t k = 0; k < s.fixed_coords.size(); ++k) {
        if (std::abs(x[s.fixed_coords[k]] - params[static_cast<Eigen::Index>(k)]) > s.slice_tol) {
          throw std::invalid_argument("build_slice: usable segment off the slice plane");
        }
      }
    }
  }

  std::vector<detail::Node> nodes;
  std::vector<detail::Edge> edges;
  const double tol = s.stitch_tol;

  // usable polylines, split at arc endpoints that land on them
  // a curve that leaves at once (tangency on a face of the domain) is a point, not an edge
  for (auto& arc : arcs) {
    double len = 0.0;
    for (std::size_t k = 1; k < arc.states.size(); ++k) {
      len += (detail::project(arc.states[k], plane) - detail::project(arc.states[k - 1], plane)).norm();
    }
    if (len <= s.stitch_tol) arc.states.clear();
  }
  std::vector<std::pair<Point2, Vector>> landing;  // arc end points in the plane and full state
  for (const auto& arc : arcs) {
    if (arc.states.empty()) continue;
    landing.push_back({detail::project(arc.states.back(), plane), arc.states.back()});
  }
  for (const auto& u : usable) {
    std::vector<Point2> pts;
    for (const Vector& x : u.states) pts.push_back(detail::project(x, plane));
    std::vector<std::vector<Point2>> pieces{pts};
    std::vector<std::vector<Vector>> piece_states{u.states};
    for (const auto& [lp, lx] : landing) {
      if (std::abs(sys.constraint(u.constraint).value(lx)) > s.support_tol * std::max(1.0, lx.lpNorm<Eigen::Infinity>())) continue;
      std::vector<std::vector<Point2>> next;
      for (auto& pc : pieces) {
        std::size_t hit = pc.size();
        for (std::size_t k = 1; k < pc.size(); ++k) {
          if (detail::point_segment_distance(lp, pc[k - 1], pc[k]) <= tol) {
            hit = k;
            break;
          }
        }
        if (hit == pc.size() || (lp - pc.front()).norm() <= tol || (lp - pc.back()).norm() <= tol) {
          next.push_back(pc);
          continue;
        }
        std::vector<Point2> left(pc.begin(), pc.begin() + static_cast<long>(hit));
        left.push_back(lp);
        std::vector<Point2> right{lp};
        right.insert(right.end(), pc.begin() + static_cast<long>(hit), pc.end());
        next.push_back(left);
        next.push_back(right);
      }
      pieces = std::move(next);
    }
    for (auto& pc : pieces) {
      // supports at the ends come from the plane point lifted into the slice
      auto lift = [&](const Point2& q) {
        Vector x = u.states.front();
        x[plane[0]] = q.x();
        x[plane[1]] = q.y();
        return x;
      };
      const bool ja = u.starts_at_tangency && (pc.front() - pts.front()).norm() <= tol;
      const bool jb = u.ends_at_tangency && (pc.back() - pts.back()).norm() <= tol;
      detail::Edge e{SegmentTag::UsablePart, u.constraint, u.constraint, pc};
      e.a = detail::add_node(nodes, pc.front(), detail::supports(sys, lift(pc.front()), plane, s.support_tol), ja, tol);
      e.b = detail::add_node(nodes, pc.back(), detail::supports(sys, lift(pc.back()), plane, s.support_tol), jb, tol);
      edges.push_back(std::move(e));
    }
  }

  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const auto& arc = arcs[k];
    if (arc.states.empty()) continue;
    std::vector<Point2> pts;
    for (const Vector& x : arc.states) pts.push_back(detail::project(x, plane));
    detail::Edge e{SegmentTag::BarrierArc, static_cast<int>(k), -1, pts};
    e.a = detail::add_node(nodes, pts.front(), detail::supports(sys, arc.states.front(), plane, s.support_tol), true, tol);
    e.b = detail::add_node(nodes, pts.back(), detail::supports(sys, arc.states.back(), plane, s.support_tol), false, tol);
    edges.push_back(std::move(e));
  }

  auto degree = [&](int v) {
    int d = 0;
    for (const auto& e : edges) {
      if (!e.alive) continue;
      d += (e.a == v) + (e.b == v);
    }
    return d;
  };
  auto incident_support = [&](int v) {
    for (const auto& e : edges) {
      if (e.alive && (e.a == v || e.b == v)) return e.support;
    }
    return -1;
  };

  // close gaps between dangling ends that share a support
  {
    std::vector<int> leaves;
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      if (degree(static_cast<int>(v)) == 1) leaves.push_back(static_cast<int>(v));
    }
    std::vector<bool> used(nodes.size(), false);
    for (std::size_t x = 0; x < leaves.size(); ++x) {
      const int va = leaves[x];
      if (used[va]) continue;
      int best = -1, best_sup = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t y = x + 1; y < leaves.size(); ++y) {
        const int vb = leaves[y];
        if (used[vb]) continue;
        for (int sid : nodes[va].supports) {
          if (sid == incident_support(va) || sid == incident_support(vb)) continue;
          if (std::find(nodes[vb].supports.begin(), nodes[vb].supports.end(), sid) == nodes[vb].supports.end()) continue;
          const double d = (nodes[va].p - nodes[vb].p).norm();
          if (d < best_d) best_d = d, best = vb, best_sup = sid;
        }
      }
      if (best < 0) continue;
      detail::Edge e{SegmentTag::ConstraintEdge, best_sup, best_sup, {nodes[va].p, nodes[best].p}};
      e.a = va;
      e.b = best;
      edges.push_back(std::move(e));
      used[va] = used[best] = true;
    }
  }

  // prune dangling branches
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& e : edges) {
      if (!e.alive) continue;
      if (degree(e.a) == 1 || degree(e.b) == 1) {
        if (e.tag == SegmentTag::BarrierArc) continue;  // reported below
        e.alive = false;
        changed = true;
      }
    }
  }

  std::string gap_list;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const int dgr = degree(static_cast<int>(v));
    if (dgr != 0 && dgr != 2) {
      gap_list += " (" + std::to_string(nodes[v].p.x()) + ", " + std::to_string(nodes[v].p.y()) +
                  ") degree " + std::to_string(dgr);
    }
  }
  if (!gap_list.empty()) throw OpenBoundary("build_slice: cannot close boundary at" + gap_list);

  // walk the cycle
  std::vector<int> alive;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (edges[k].alive) alive.push_back(static_cast<int>(k));
  }
  if (alive.empty()) throw OpenBoundary("build_slice: no boundary pieces");
  std::vector<bool> visited(edges.size(), false);
  int ek = alive.front();
  int at = edges[ek].a;
  std::vector<SliceSegment> loop;
  for (std::size_t step = 0; step < alive.size(); ++step) {
    detail::Edge& e = edges[ek];
    visited[ek] = true;
    SliceSegment seg{e.tag, e.ref, "", e.pts};
    if (e.a != at) std::reverse(seg.points.begin(), seg.points.end());
    seg.label = e.tag == SegmentTag::BarrierArc ? "arc" + std::to_string(e.ref + 1)
                                                : support_label(e.ref, p, plane);
    loop.push_back(std::move(seg));
    at = (e.a == at) ? e.b : e.a;
    int next = -1;
    for (int k : alive) {
      if (!visited[k] && (edges[k].a == at || edges[k].b == at)) {
        next = k;
        break;
      }
    }
    if (next < 0) break;
    ek = next;
  }
  const std::size_t used_edges = static_cast<std::size_t>(std::count(visited.begin(), visited.end(), true));
  if (used_edges != alive.size() || at != edges[alive.front()].a) {
    throw OpenBoundary("build_slice: boundary splits into several loops");
  }
  // snap joints so that consecutive segments share end points exactly
  for (std::size_t k = 0; k < loop.size(); ++k) {
    loop[(k + 1) % loop.size()].points.front() = loop[k].points.back();
  }
  slice.segments = std::move(loop);

  // counter-clockwise orientation
  if (detail::signed_area(slice.polygon()) < 0.0) {
    std::reverse(slice.segments.begin(), slice.segments.end());
    for (auto& sg : slice.segments) std::reverse(sg.points.begin(), sg.points.end());
  }

  // interior side check: -Dg points inside at a usable midpoint
  for (const auto& sg : slice.segments) {
    if (sg.tag != SegmentTag::UsablePart || sg.points.size() < 2) continue;
    const Point2 mid = 0.5 * (sg.points.front() + sg.points.back());
    Vector x = usable.front().states.front();
    x[plane[0]] = mid.x();
    x[plane[1]] = mid.y();
    const RowVector g = sys.constraint(sg.ref).gradient(x);
    Point2 dir(-g[plane[0]], -g[plane[1]]);
    if (dir.norm() == 0.0 || slice_area(slice) == 0.0) break;
    const Point2 probe = mid + 10.0 * s.stitch_tol * dir.normalized();
    if (contains(slice, probe).where == Containment::Outside) {
      slice.diagnostics.push_back("interior check failed at usable part " + sg.label);
      log::warn("slice_orientation", {{"param", slice.parameter()}, {"segment", sg.label}});
    }
    break;
  }

  // junction angles between each arc's first chord and the constraint tangent
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const auto& arc = arcs[k];
    if (arc.states.size() < 2) continue;
    const Point2 a = detail::project(arc.states[0], plane);
    const Point2 b = detail::project(arc.states[1], plane);
    const RowVector g = sys.constraint(arc.origin.active_index).gradient(arc.states[0]);
    const Point2 tangent(-g[plane[1]], g[plane[0]]);
    const Point2 chord = b - a;
    double angle = 0.0;
    if (tangent.norm() > 0.0 && chord.norm() > 0.0) {
      const double cr = chord.x() * tangent.y() - chord.y() * tangent.x();
      angle = std::atan2(std::abs(cr), std::abs(chord.dot(tangent)));
    }
    slice.junctions.push_back({a, arc.origin.active_index, static_cast<int>(k), angle});
  }
  return slice;
}

inline AdmissibleSetSlice build_slice(const ControlSystem& sys, const Vector& params,
                                      const std::vector<BarrierTrajectory>& arcs,
                                      const std::vector<UsableSegment>& usable,
                                      const SliceSettings& s) {
  std::vector<BoundaryCurve> curves;
  curves.reserve(arcs.size());
  for (const auto& a : arcs) curves.push_back({a.origin, a.x});
  return build_slice(sys, params, std::move(curves), usable, s);
}

}  // namespace barrierkit

#endif  // BARRIERKIT_ASSEMBLE_HPP
