// Copyright 2026 The etwl Authors
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
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "etwl/harness.hpp"

namespace etwl {
namespace {

const std::string kFixtures = ETWL_FIXTURES;

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ETWL_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CmdWl, CycleFwl2) {
  const RunReport r = cmd_wl({load_graph_file(kFixtures + "/c6.json"), WlMethod::kFwl2, std::nullopt, true});
  EXPECT_EQ(r.summary["tuples"], 36);
  EXPECT_LE(r.summary["rounds"].get<int>(), 3);
  EXPECT_EQ(r.summary["classes"], 4);
  EXPECT_EQ(r.results.size(), 1u);
}

TEST(CmdWl, TriangleWl1) {
  const RunReport r = cmd_wl({load_graph_file(kFixtures + "/k3.json"), WlMethod::kWl1, std::nullopt, false});
  EXPECT_EQ(r.summary["classes"], 1);
}

TEST(CmdDistinguish, BuiltinMatchesExpectations) {
  for (WlMethod m : {WlMethod::kWl1, WlMethod::kWl2, WlMethod::kFwl2, WlMethod::kWl3}) {
    const RunReport r = cmd_distinguish({builtin_pairs(), m, std::nullopt});
    EXPECT_TRUE(r.passed) << method_id(m);
    EXPECT_EQ(r.csv.size(), builtin_pairs().size() + 1);
  }
}

TEST(CmdDistinguish, SelfPairIndistinguishable) {
  const LabeledGraph g = graphs::wagner();
  const RunReport r = cmd_distinguish({{GraphPair{"self", g, g, {}}}, WlMethod::kFwl2, std::nullopt});
  EXPECT_FALSE(r.results[0]["distinguished"].get<bool>());
}

TEST(CmdDistinguish, WrongExpectationFails) {
  GraphPair p{"c6", graphs::cycle(6), graphs::disjoint_union(graphs::complete(3), graphs::complete(3)),
              {{"wl1", Expectation::kDistinguishable}}};
  EXPECT_FALSE(cmd_distinguish({{p}, WlMethod::kWl1, std::nullopt}).passed);
}

TEST(CmdEtCheck, SmallRunPasses) {
  EtCheckRequest req;
  req.graphs = {{"c6", graphs::cycle(6)}, {"p4", graphs::path(4)}};
  req.seeds = 2;
  req.permutations = 3;
  const RunReport r = cmd_et_check(req);
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.summary["max_violation"].get<double>(), 1e-6);
  EXPECT_LT(r.summary["equivariance_error"].get<double>(), 1e-9);
}

TEST(CmdEtCheck, ZeroLayersUsesAtomicTypes) {
  EtCheckRequest req;
  req.graphs = {{"paw", builtin_graphs().back().second}};
  req.layers = {0};
  req.permutations = 0;
  EXPECT_TRUE(cmd_et_check(req).passed);
}

TEST(CmdEtCheck, CapEnforced) {
  EtCheckRequest req;
  req.graphs = {{"big", graphs::cycle(9)}};
  EXPECT_THROW(cmd_et_check(req), std::invalid_argument);
}

TEST(CmdGradCheck, DefaultCase) {
  GradCheckRequest req;
  req.seeds = {0, 1};
  const RunReport r = cmd_grad_check(req);
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.summary["max_rel_error"].get<double>(), 1e-4);
}

TEST(CmdGradCheck, ZeroQueryKeyStillDifferentiable) {
  GradCheckRequest req;
  req.zero_qk = true;
  const GradCheckResult g = grad_check(req, 5);
  EXPECT_TRUE(g.finite);
  EXPECT_LT(g.max_rel_error, 1e-4);
}

TEST(CmdGradCheck, Deterministic) {
  GradCheckRequest req;
  EXPECT_EQ(cmd_grad_check(req).results, cmd_grad_check(req).results);
}

TEST(CmdBench, ReportsSpreadAndExponent) {
  BenchRequest req;
  req.sizes = {8, 16};
  req.repeats = 2;
  const RunReport r = cmd_bench(req);
  EXPECT_EQ(r.results.size(), 2u);
  EXPECT_TRUE(r.results[0].contains("min_s"));
  EXPECT_TRUE(r.summary.contains("exponent"));
  req.sizes = {16, 8};
  EXPECT_THROW(cmd_bench(req), std::invalid_argument);
}

TEST(CmdOracle, PathAndTriangle) {
  OracleRequest req;
  req.graph = load_graph_file(kFixtures + "/p3.json");
  EXPECT_TRUE(cmd_oracle(req).passed);
  req.graph = load_graph_file(kFixtures + "/k3.json");
  const RunReport r = cmd_oracle(req);
  for (const auto& c : r.summary["classes"]) EXPECT_EQ(c, 2);
}

TEST(CmdOracle, OversizedGraph) {
  OracleRequest req;
  req.graph = load_graph_file(kFixtures + "/twelve.json");
  EXPECT_THROW(cmd_oracle(req), BudgetError);
}

TEST(Fit, LogLogSlope) {
  EXPECT_NEAR(loglog_slope({1, 2, 4, 8}, {3, 24, 192, 1536}), 3.0, 1e-12);
  EXPECT_THROW(loglog_slope({1}, {1}), std::invalid_argument);
}

TEST(Report, JsonFields) {
  const RunReport r = cmd_wl({graphs::path(3), WlMethod::kWl1, std::nullopt, false});
  const nlohmann::json j = r.to_json();
  for (const char* key : {"command", "version", "seed", "threads", "seconds", "passed", "inputs", "results"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("wl " + kFixtures + "/c6.json --method fwl2"), 0);
  EXPECT_EQ(run_cli("wl " + kFixtures + "/malformed.json"), 2);
  EXPECT_EQ(run_cli("wl " + kFixtures + "/missing.json"), 2);
  EXPECT_EQ(run_cli("wl " + kFixtures + "/c6.json --method wl7"), 2);
  EXPECT_EQ(run_cli("distinguish --builtin --method wl1"), 0);
  EXPECT_EQ(run_cli("distinguish " + kFixtures + "/order_mismatch.json"), 2);
  EXPECT_EQ(run_cli("oracle " + kFixtures + "/twelve.json"), 2);
  EXPECT_EQ(run_cli("oracle " + kFixtures + "/p3.json --rounds 2"), 0);
  EXPECT_EQ(run_cli("grad-check --n 3 --d 4 --heads 2"), 0);
  EXPECT_EQ(run_cli("grad-check --tol 1e-30"), 1);
  EXPECT_EQ(run_cli("bogus"), 2);
}

TEST(Cli, WritesArtifacts) {
  const auto dir = std::filesystem::temp_directory_path() / "etwl_cli_test";
  std::filesystem::remove_all(dir);
  ASSERT_EQ(run_cli("--out " + dir.string() + " distinguish " + kFixtures + "/c6_vs_2c3.json"), 0);
  std::ifstream json(dir / "distinguish.json");
  const nlohmann::json j = nlohmann::json::parse(json);
  EXPECT_TRUE(j["results"][0]["distinguished"].get<bool>());
  EXPECT_TRUE(std::filesystem::exists(dir / "distinguish.csv"));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace etwl
