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

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "barrierkit/cli.hpp"

using namespace barrierkit;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "barrierkit");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("barrierkit_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::size_t count(const std::string& text, const std::string& what) {
  std::size_t n = 0;
  for (auto k = text.find(what); k != std::string::npos; k = text.find(what, k + 1)) ++n;
  return n;
}

// every leaf key of a, with its path, is present in b
void expect_keys_present(const json& a, const json& b, const std::string& path = "") {
  for (auto it = a.begin(); it != a.end(); ++it) {
    const std::string p = path + "/" + it.key();
    ASSERT_TRUE(b.contains(it.key())) << p;
    if (it->is_object()) expect_keys_present(*it, b.at(it.key()), p);
  }
}

}  // namespace

// exit codes

TEST(CliExitCodes, UnknownSystemIsUsageError) {
  const Result r = run({"barrier", "--system", "unknown"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--system"), std::string::npos);
}

TEST(CliExitCodes, MissingSubcommand) { EXPECT_EQ(run({}).code, 2); }

TEST(CliExitCodes, BadFlagValue) {
  EXPECT_EQ(run({"tangency", "--system", "acc", "--at", "10", "--atol", "-1"}).code, 2);
  EXPECT_EQ(run({"verify", "--system", "acc", "--check", "bogus"}).code, 2);
}

TEST(CliExitCodes, HelpIsSuccess) {
  const Result r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("tangency"), std::string::npos);
}

TEST(CliExitCodes, NeedleCheckPasses) {
  const Result r = run({"verify", "--system", "acc", "--check", "needle", "--eps", "1e-2,5e-3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["check"], "needle");
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_GE(j["order_min"].get<double>(), 1.8);
  EXPECT_LE(j["order_max"].get<double>(), 2.2);
}

TEST(CliExitCodes, HamiltonianMutationHasPower) {
  const Result r = run({"verify", "--system", "acc", "--check", "hamiltonian,jacobian", "--at", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j.size(), 2u);
  for (const auto& rep : j) EXPECT_TRUE(rep["pass"].get<bool>()) << rep.dump();
}

TEST(CliExitCodes, FailedInvariantIsOne) {
  // an impossible Jacobian tolerance turns the same check into a failure
  const Result r = run({"verify", "--system", "acc", "--check", "jacobian", "--samples", "5"});
  EXPECT_EQ(r.code, 0);
  fs::path d = scratch("strict");
  io::write_file(d / "cfg.json", R"({"jacobian_tol": 1e-30})");
  EXPECT_EQ(run({"verify", "--system", "acc", "--check", "jacobian", "--config", (d / "cfg.json").string()}).code, 1);
}

TEST(CliConfig, UnknownKeyIsUsageError) {
  const fs::path d = scratch("unknown_key");
  io::write_file(d / "cfg.json", R"({"barrier": {"horizon": 10, "bogus": 1}})");
  const Result r = run({"tangency", "--system", "acc", "--at", "10", "--config", (d / "cfg.json").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bogus"), std::string::npos);
  io::write_file(d / "top.json", R"({"colour": "blue"})");
  EXPECT_EQ(run({"acc", "--config", (d / "top.json").string(), "--out", (d / "o").string()}).code, 2);
}

TEST(CliConfig, MissingFileIsUsageError) {
  EXPECT_EQ(run({"tangency", "--system", "acc", "--config", "/nonexistent/cfg.json"}).code, 2);
}

TEST(CliConfig, EchoIsComplete) {
  const fs::path d = scratch("echo");
  io::write_file(d / "cfg.json", R"({"grid": [20.0], "seed": 7, "matched_points": 40, "run_permeability": false,
    "barrier": {"hamiltonian_tol": 2e-6, "ode": {"atol": 5e-13}}, "slice": {"stitch_tol": 2e-4},
    "permeability": {"eps_geo": 2e-3}, "tangency": {"scan_points": 3000}})");
  const Result r = run({"acc", "--config", (d / "cfg.json").string(), "--out", (d / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json m = json::parse(io::read_file(d / "o" / "manifest.json"));
  const json& c = m["config"];
  EXPECT_EQ(c["seed"], 7);
  EXPECT_EQ(c["matched_points"], 40);
  EXPECT_EQ(c["grid"], json::array({20.0}));
  EXPECT_EQ(c["barrier"]["hamiltonian_tol"], 2e-6);
  EXPECT_EQ(c["barrier"]["ode"]["atol"], 5e-13);
  EXPECT_EQ(c["slice"]["stitch_tol"], 2e-4);
  EXPECT_EQ(c["perm"]["eps_geo"], 2e-3);
  EXPECT_EQ(c["tangency"]["scan_points"], 3000);
  // every setting of every struct is echoed
  expect_keys_present(config::to_json(BarrierSettings{}), c["barrier"]);
  expect_keys_present(config::to_json(SliceSettings{}), c["slice"]);
  expect_keys_present(config::to_json(TangencySettings{}), c["tangency"]);
  expect_keys_present(config::to_json(verify::PermeabilitySettings{}), c["perm"]);
  expect_keys_present(config::to_json(verify::OracleSettings{}), c["oracle"]);
  expect_keys_present(config::to_json(SectionSettings{}), c["section"]);
  expect_keys_present(config::to_json(acc::AccParameters{}), c["params"]);
  // and the echo reads back to the same settings
  BarrierSettings b;
  config::apply(b, c["barrier"]);
  EXPECT_EQ(config::to_json(b), c["barrier"]);
}

TEST(CliConfig, FlagsOverrideTheFile) {
  const fs::path d = scratch("override");
  io::write_file(d / "cfg.json", R"({"seed": 7, "barrier": {"hamiltonian_tol": 2e-6}})");
  const Result r = run({"verify", "--config", (d / "cfg.json").string(), "--system", "acc", "--check", "jacobian",
                        "--seed", "9", "--hamiltonian-tol", "3e-6"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["config"]["seed"], 9);
  EXPECT_EQ(j["config"]["barrier"]["hamiltonian_tol"], 3e-6);
}

// outputs

TEST(CliTangency, CsvAtTen) {
  const Result r = run({"tangency", "--system", "acc", "--at", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "param,z1,z2,z3,i_star,u_star1,d_star1,d_star2,res_g,res_lie,accepted");
  std::vector<std::string> rows;
  for (std::string line; std::getline(is, line);) rows.push_back(line);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].rfind("10,10,11.869069877", 0), 0u) << rows[0];
  EXPECT_EQ(rows[0].substr(rows[0].size() - 2), ",1");
  EXPECT_EQ(rows[1].substr(rows[1].size() - 2), ",0");  // far root
  EXPECT_EQ(rows[2].rfind("10,10,10,100,2", 0), 0u) << rows[2];
}

TEST(CliBarrier, CsvRoundTripIsBitwise) {
  const fs::path d = scratch("barrier");
  const Result r = run({"barrier", "--system", "acc", "--at", "10", "--out", d.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), 2u);
  for (const auto& e : j) EXPECT_LE(e["max_H_residual"].get<double>(), 1e-6);
  for (const char* f : {"barrier_000.csv", "barrier_001.csv"}) {
    const std::string text = io::read_file(d / f);
    const io::TrajectorySamples s = io::parse_trajectory_csv(text);
    EXPECT_GT(s.t.size(), 2u);
    EXPECT_EQ(io::trajectory_csv(s), text) << f;
  }
}

TEST(CliBarrier, SamplesSurviveTheRoundTrip) {
  const ControlSystem sys = acc::acc_system({});
  BarrierSettings bs;
  bs.horizon = 1000.0;
  const BarrierTrajectory tr = trace_barrier(sys, acc::acc_tangency_g2({}, 20.0), bs);
  const io::TrajectorySamples back = io::parse_trajectory_csv(io::trajectory_csv(tr));
  ASSERT_EQ(back.t.size(), tr.size());
  for (std::size_t k = 0; k < tr.size(); ++k) {
    EXPECT_EQ(back.t[k], tr.t[k]);
    EXPECT_EQ(back.x[k], tr.x[k]);
    EXPECT_EQ(back.lambda[k], tr.lambda[k]);
    EXPECT_EQ(back.u[k], tr.u[k]);
    EXPECT_EQ(back.d[k], tr.d[k]);
  }
}

TEST(CliSlice, SvgHasTwoTangencyMarkers) {
  const fs::path d = scratch("slice");
  const Result r = run({"slice", "--system", "acc", "--at", "10", "--out", d.string(), "--format", "svg,json,csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string svg = io::read_file(d / "slices" / "slice_000.svg");
  EXPECT_EQ(count(svg, "class=\"tangency\""), 2u);
  EXPECT_NE(svg.find("viewBox"), std::string::npos);
  EXPECT_TRUE(fs::exists(d / "slices" / "slice_000.json"));
  EXPECT_TRUE(fs::exists(d / "slices" / "slice_000.csv"));
}

TEST(CliAcc, OutputTreeAndDeterminism) {
  const fs::path a = scratch("acc_a"), b = scratch("acc_b");
  for (const fs::path& d : {a, b}) {
    const Result r = run({"acc", "--at", "10,20,45", "--seed", "3", "--out", d.string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const std::string ma = io::read_file(a / "manifest.json"), mb = io::read_file(b / "manifest.json");
  EXPECT_EQ(ma, mb);
  const json m = json::parse(ma);
  ASSERT_EQ(m["slices"].size(), 3u);
  for (const auto& s : m["slices"]) {
    for (const auto& f : s["files"]) {
      EXPECT_TRUE(fs::exists(a / f.get<std::string>())) << f;
      EXPECT_EQ(io::read_file(a / f.get<std::string>()), io::read_file(b / f.get<std::string>())) << f;
    }
  }
  EXPECT_EQ(count(io::read_file(a / "slices" / "z1_000.svg"), "class=\"tangency\""), 2u);
}

TEST(CliAcc, FullGrid) {
  const fs::path d = scratch("acc_full");
  const Result r = run({"acc", "--out", d.string(), "--grid", "48"});
  EXPECT_EQ(r.code, 0) << r.err << r.out;
  const json m = json::parse(io::read_file(d / "manifest.json"));
  EXPECT_EQ(m["slices"].size(), 48u);
  EXPECT_EQ(m["summary"]["failed"], 0);
}

TEST(CliAcc, EmptyGrid) {
  const fs::path d = scratch("acc_empty");
  const Result r = run({"acc", "--out", d.string(), "--grid", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json m = json::parse(io::read_file(d / "manifest.json"));
  EXPECT_TRUE(m["slices"].empty());
}

TEST(CliExport, EmptyListIsEmptyArray) {
  const fs::path d = scratch("export_empty");
  io::write_file(d / "in.json", "[]");
  const Result r = run({"export", "--input", (d / "in.json").string(), "--out", (d / "o").string(), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(io::read_file(d / "o" / "slices.json")), json::array());
}

TEST(CliExport, RerendersSavedSlices) {
  const fs::path d = scratch("export");
  ASSERT_EQ(run({"slice", "--system", "acc", "--at", "10,20", "--out", d.string(), "--format", "json,svg"}).code, 0);
  const json s0 = json::parse(io::read_file(d / "slices" / "slice_000.json"));
  const json s1 = json::parse(io::read_file(d / "slices" / "slice_001.json"));
  io::write_file(d / "both.json", json::array({s0, s1}).dump());
  const Result r = run({"export", "--input", (d / "both.json").string(), "--out", (d / "o").string(),
                        "--format", "json,svg"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(io::read_file(d / "o" / "slices.json")), json::array({s0, s1}));
  EXPECT_EQ(io::read_file(d / "o" / "slice_000.svg"), io::read_file(d / "slices" / "slice_000.svg"));
}

TEST(CliExport, MissingInputIsUsageError) {
  EXPECT_EQ(run({"export", "--out", "/tmp/x"}).code, 2);
  EXPECT_EQ(run({"export", "--input", "/nonexistent.json", "--out", "/tmp/x"}).code, 1);
}
