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

// Command implementations behind the etwl CLI. Each returns a RunReport;
// the CLI decides where to print or write it.

#ifndef ETWL_HARNESS_HPP_
#define ETWL_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "etwl/edge_transformer.hpp"
#include "etwl/oracle.hpp"
#include "etwl/wl.hpp"
#include "json.hpp"

namespace etwl {

struct RunReport {
  std::string command;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::array();
  /// Headline numbers, e.g. fitted exponent or max violation.
  nlohmann::json summary = nlohmann::json::object();
  double seconds = 0.0;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string version;
  bool passed = true;
  /// Human-readable lines for stdout.
  std::vector<std::string> lines;
  /// Header plus rows; empty when the command has no tabular output.
  std::vector<std::string> csv;

  nlohmann::json to_json() const;
};

struct WlRequest {
  LabeledGraph graph;
  WlMethod method = WlMethod::kFwl2;
  std::optional<int> rounds;
  bool dump = false;
};
RunReport cmd_wl(const WlRequest& req);

struct DistinguishRequest {
  std::vector<GraphPair> pairs;
  WlMethod method = WlMethod::kFwl2;
  std::optional<int> rounds;
};
/// Fails only when a verdict contradicts a recorded expectation.
RunReport cmd_distinguish(const DistinguishRequest& req);

struct EtCheckRequest {
  /// name, graph; empty means the builtin graphs.
  std::vector<std::pair<std::string, LabeledGraph>> graphs;
  std::vector<int> layers{1, 2, 3};
  int seeds = 5;
  double tol = 1e-6;
  int max_nodes = 8;
  /// Random relabelings per graph for the equivariance check; 0 skips it.
  int permutations = 20;
  double equivariance_tol = 1e-9;
  EtConfig config;  // layers and seed are overridden per run
  std::uint64_t seed = 0;
};
RunReport cmd_et_check(const EtCheckRequest& req);

struct GradCheckRequest {
  int n = 3;
  int d = 4;
  int heads = 2;
  std::vector<std::uint64_t> seeds{0};
  double h = 1e-5;
  double tol = 1e-4;
  Activation activation = Activation::kGelu;
  /// Sets W^Q = W^K = 0 before checking.
  bool zero_qk = false;
};
RunReport cmd_grad_check(const GradCheckRequest& req);

struct BenchRequest {
  std::vector<int> sizes{50, 100, 150, 200};
  int d = 8;
  int heads = 1;
  int repeats = 3;
  std::uint64_t seed = 0;
  /// When set, the fitted exponent must fall inside [min, max].
  std::optional<std::pair<double, double>> exponent_window;
};
RunReport cmd_bench(const BenchRequest& req);

struct OracleRequest {
  LabeledGraph graph;
  /// Runs a parallel simulation against this graph when present.
  std::optional<LabeledGraph> partner;
  int rounds = 2;
  std::size_t digit_budget = kDefaultDigitBudget;
  bool dump = false;
};
/// Throws BudgetError before any arithmetic if the budget is too small.
RunReport cmd_oracle(const OracleRequest& req);

// Pieces shared with the test suite.

struct ConsistencyResult {
  /// max_violation[t]: largest max-norm spread of X^(t) inside one 2-FWL
  /// class of round t.
  std::vector<double> max_violation;
};

/// Compares ET states against 2-FWL classes at every round t <= layers.
ConsistencyResult fwl_consistency(const LabeledGraph& g, const EtConfig& cfg, const EtParams& params);

struct EquivarianceResult {
  double pair_error = 0.0;
  double readout_error = 0.0;
};

/// Max errors of forward(pi(g)) against pi applied to forward(g), over
/// `permutations` random relabelings.
EquivarianceResult equivariance(const LabeledGraph& g, const EtConfig& cfg, const EtParams& params,
                                int permutations, std::uint64_t seed);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t entries = 0;
  bool finite = true;
};

/// Tokenizer plus one layer on a labeled path of order n, scalar loss
/// sum(R .* X^(1)) with a fixed random R.
GradCheckResult grad_check(const GradCheckRequest& req, std::uint64_t seed);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Uniformly random permutation of 0..n-1.
std::vector<int> random_permutation(int n, std::uint64_t seed);

}  // namespace etwl

#endif  // ETWL_HARNESS_HPP_
