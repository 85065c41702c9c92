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

#ifndef BARRIERKIT_EXPORT_HPP
#define BARRIERKIT_EXPORT_HPP

// Slice, trajectory and tangency output as JSON, CSV and SVG. Numbers are
// written with %.17g so files round-trip bitwise and repeat byte for byte.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "barrierkit/assemble.hpp"
#include "barrierkit/barrier.hpp"
#include "barrierkit/errors.hpp"
#include "barrierkit/tangency.hpp"

namespace barrierkit::io {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << content;
  os.flush();
  if (!os) throw IoError("write failed for " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// slices

inline nlohmann::json to_json(const AdmissibleSetSlice& s) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& sg : s.segments) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : sg.points) pts.push_back({p.x(), p.y()});
    segs.push_back({{"tag", to_string(sg.tag)}, {"label", sg.label}, {"ref", sg.ref}, {"points", pts}});
  }
  nlohmann::json js = nlohmann::json::array();
  for (const auto& j : s.junctions) {
    js.push_back({{"point", {j.point.x(), j.point.y()}},
                  {"constraint", j.constraint + 1},
                  {"arc", j.arc},
                  {"angle", j.angle}});
  }
  return {{"param", s.parameter()},
          {"params", std::vector<double>(s.params.data(), s.params.data() + s.params.size())},
          {"plane", s.plane},
          {"stitch_tol", s.stitch_tol},
          {"area", slice_area(s)},
          {"segments", segs},
          {"junctions", js},
          {"diagnostics", s.diagnostics}};
}

inline nlohmann::json to_json(const std::vector<AdmissibleSetSlice>& slices) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : slices) out.push_back(to_json(s));
  return out;
}

inline SegmentTag segment_tag_from(const std::string& t) {
  for (SegmentTag c : {SegmentTag::BarrierArc, SegmentTag::UsablePart, SegmentTag::ConstraintEdge}) {
    if (t == to_string(c)) return c;
  }
  throw IoError("slice json: unknown segment tag '" + t + "'");
}

/// Inverse of to_json; the stored area is ignored and recomputed on output.
inline AdmissibleSetSlice slice_from_json(const nlohmann::json& j) {
  try {
    AdmissibleSetSlice s;
    const auto params = j.at("params").get<std::vector<double>>();
    s.params = Eigen::Map<const Vector>(params.data(), static_cast<Eigen::Index>(params.size()));
    s.plane = j.at("plane").get<std::vector<int>>();
    if (s.plane.size() != 2) throw IoError("slice json: plane must have two coordinates");
    s.stitch_tol = j.value("stitch_tol", s.stitch_tol);
    for (const auto& sg : j.at("segments")) {
      SliceSegment out;
      out.tag = segment_tag_from(sg.at("tag").get<std::string>());
      out.label = sg.at("label").get<std::string>();
      out.ref = sg.at("ref").get<int>();
      for (const auto& p : sg.at("points")) out.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
      s.segments.push_back(std::move(out));
    }
    for (const auto& jn : j.at("junctions")) {
      Junction out;
      out.point = Point2(jn.at("point").at(0).get<double>(), jn.at("point").at(1).get<double>());
      out.constraint = jn.at("constraint").get<int>() - 1;
      out.arc = jn.value("arc", 0);
      out.angle = jn.at("angle").get<double>();
      s.junctions.push_back(out);
    }
    s.diagnostics = j.value("diagnostics", std::vector<std::string>{});
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("slice json: ") + e.what());
  }
}

/// Accepts one slice object or an array of them.
inline std::vector<AdmissibleSetSlice> slices_from_json(const nlohmann::json& j) {
  std::vector<AdmissibleSetSlice> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(slice_from_json(e));
  } else {
    out.push_back(slice_from_json(j));
  }
  return out;
}

/// segment,tag,label,k,p1,p2 with one row per polyline vertex.
inline std::string slice_csv(const AdmissibleSetSlice& s) {
  std::string out = "segment,tag,label,k,x" + std::to_string(s.plane.at(0) + 1) + ",x" +
                    std::to_string(s.plane.at(1) + 1) + "\n";
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    const auto& sg = s.segments[i];
    for (std::size_t k = 0; k < sg.points.size(); ++k) {
      out += std::to_string(i) + "," + to_string(sg.tag) + "," + sg.label + "," + std::to_string(k) + "," +
             fmt(sg.points[k].x()) + "," + fmt(sg.points[k].y()) + "\n";
    }
  }
  return out;
}

/// State-unit SVG with the y axis pointing up: barrier arcs blue, usable
/// parts green, constraint and face edges black, tangency points red.
inline std::string slice_svg(const AdmissibleSetSlice& s, double width_px = 640.0) {
  Point2 lo(0, 0), hi(1, 1);
  bool first = true;
  for (const auto& sg : s.segments) {
    for (const auto& p : sg.points) {
      if (first) lo = hi = p, first = false;
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  Point2 span = hi - lo;
  const double pad = 0.05 * std::max({span.x(), span.y(), 1e-9});
  lo.array() -= pad;
  hi.array() += pad;
  span = hi - lo;
  const double stroke = 0.004 * std::max(span.x(), span.y());
  const double height_px = width_px * span.y() / span.x();

  auto colour = [](SegmentTag t) {
    switch (t) {
      case SegmentTag::BarrierArc: return "blue";
      case SegmentTag::UsablePart: return "green";
      case SegmentTag::ConstraintEdge: return "black";
    }
    return "black";
  };
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width_px) + "\" height=\"" + fmt(height_px) +
         "\" viewBox=\"" + fmt(lo.x()) + " " + fmt(-hi.y()) + " " + fmt(span.x()) + " " + fmt(span.y()) + "\">\n";
  out += "<title>slice x" + std::to_string(s.plane.at(0) + 1) + "-x" + std::to_string(s.plane.at(1) + 1) +
         " at parameter " + fmt(s.parameter()) + "</title>\n";
  out += "<g transform=\"scale(1,-1)\" fill=\"none\" stroke-width=\"" + fmt(stroke) + "\">\n";
  for (const auto& sg : s.segments) {
    out += "<polyline class=\"" + std::string(to_string(sg.tag)) + "\" stroke=\"" + colour(sg.tag) + "\" points=\"";
    for (std::size_t k = 0; k < sg.points.size(); ++k) {
      out += (k ? " " : "") + fmt(sg.points[k].x()) + "," + fmt(sg.points[k].y());
    }
    out += "\"/>\n";
  }
  for (const auto& j : s.junctions) {
    out += "<circle class=\"tangency\" fill=\"red\" stroke=\"none\" cx=\"" + fmt(j.point.x()) + "\" cy=\"" +
           fmt(j.point.y()) + "\" r=\"" + fmt(3 * stroke) + "\"/>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

// ---------------------------------------------------------------------------
// trajectories

/// Samples in the column order t, x1..xn, lam1..lamn, u1..um, d1..dw.
struct TrajectorySamples {
  std::vector<double> t;
  std::vector<Vector> x, lambda, u, d;

  static TrajectorySamples from(const BarrierTrajectory& tr) {
    return {tr.t, tr.x, tr.lambda, tr.u, tr.d};
  }
};

inline std::string trajectory_csv(const TrajectorySamples& tr) {
  if (tr.t.empty()) return "t\n";
  const auto n = tr.x.front().size(), m = tr.u.front().size(), w = tr.d.front().size();
  std::string out = "t";
  for (Eigen::Index i = 0; i < n; ++i) out += ",x" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < n; ++i) out += ",lam" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < m; ++i) out += ",u" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < w; ++i) out += ",d" + std::to_string(i + 1);
  out += "\n";
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    out += fmt(tr.t[k]);
    for (const Vector* v : {&tr.x[k], &tr.lambda[k], &tr.u[k], &tr.d[k]}) {
      for (Eigen::Index i = 0; i < v->size(); ++i) out += "," + fmt((*v)[i]);
    }
    out += "\n";
  }
  return out;
}

inline std::string trajectory_csv(const BarrierTrajectory& tr) { return trajectory_csv(TrajectorySamples::from(tr)); }

inline TrajectorySamples parse_trajectory_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw IoError("trajectory csv: empty input");
  int n = 0, m = 0, w = 0;
  {
    std::istringstream hs(line);
    std::string col;
    bool first = true;
    while (std::getline(hs, col, ',')) {
      if (first) {
        if (col != "t") throw IoError("trajectory csv: first column must be t");
        first = false;
      } else if (col.rfind("lam", 0) == 0) {
        ++n;
      } else if (col[0] == 'u') {
        ++m;
      } else if (col[0] == 'd') {
        ++w;
      } else if (col[0] != 'x') {
        throw IoError("trajectory csv: unexpected column " + col);
      }
    }
  }
  TrajectorySamples out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      char* end = nullptr;
      const double val = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw IoError("trajectory csv: bad number '" + cell + "'");
      v.push_back(val);
    }
    if (static_cast<int>(v.size()) != 1 + 2 * n + m + w) throw IoError("trajectory csv: wrong column count");
    out.t.push_back(v[0]);
    out.x.push_back(Eigen::Map<Vector>(v.data() + 1, n));
    out.lambda.push_back(Eigen::Map<Vector>(v.data() + 1 + n, n));
    out.u.push_back(Eigen::Map<Vector>(v.data() + 1 + 2 * n, m));
    out.d.push_back(Eigen::Map<Vector>(v.data() + 1 + 2 * n + m, w));
  }
  return out;
}

// ---------------------------------------------------------------------------
// tangency points

/// param,z1..zn,i_star,u_star..,d_star..,res_g,res_lie,accepted
inline std::string tangency_csv(const std::vector<TangencyPoint>& pts, const std::vector<bool>& accepted) {
  if (pts.size() != accepted.size()) throw std::invalid_argument("tangency_csv: size mismatch");
  if (pts.empty()) return "param,i_star,res_g,res_lie,accepted\n";
  const auto n = pts.front().z.size(), m = pts.front().u_star.size(), w = pts.front().d_star.size();
  std::string out = "param";
  for (Eigen::Index i = 0; i < n; ++i) out += ",z" + std::to_string(i + 1);
  out += ",i_star";
  for (Eigen::Index i = 0; i < m; ++i) out += ",u_star" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < w; ++i) out += ",d_star" + std::to_string(i + 1);
  out += ",res_g,res_lie,accepted\n";
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto& p = pts[k];
    out += p.params.size() ? fmt(p.params[0]) : std::string("");
    for (Eigen::Index i = 0; i < p.z.size(); ++i) out += "," + fmt(p.z[i]);
    out += "," + std::to_string(p.active_index + 1);
    for (Eigen::Index i = 0; i < p.u_star.size(); ++i) out += "," + fmt(p.u_star[i]);
    for (Eigen::Index i = 0; i < p.d_star.size(); ++i) out += "," + fmt(p.d_star[i]);
    out += "," + fmt(p.res_g) + "," + fmt(p.res_lie) + "," + (accepted[k] ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace barrierkit::io

#endif  // BARRIERKIT_EXPORT_HPP
