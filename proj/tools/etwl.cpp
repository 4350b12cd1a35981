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

// etwl command-line front end. Exit codes: 0 all checks passed, 1 a check
// failed, 2 usage or input error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "etwl/harness.hpp"

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string join_csv(const std::vector<std::string>& rows) {
  std::string s;
  for (const auto& row : rows) s += row + "\n";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace etwl;
  CLI::App app{"Edge Transformer and Weisfeiler-Leman toolkit"};
  app.set_version_flag("--version", std::string(ETWL_VERSION));
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_dir, csv_path;
  bool as_json = false;
  app.add_option("--seed", seed, "Seed for all random choices");
  app.add_option("--threads", threads, "Kernel threads (default: ETWL_NUM_THREADS or 1)")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Directory for <command>.json and <command>.csv");
  app.add_option("--csv", csv_path, "Write the CSV table to this file");
  app.add_flag("--json", as_json, "Print the JSON report instead of text");

  // wl
  auto* wl = app.add_subcommand("wl", "Color a graph with a WL variant");
  std::string wl_graph, wl_method = "fwl2";
  std::optional<int> wl_rounds;
  bool wl_dump = false;
  wl->add_option("graph", wl_graph, "Graph JSON file")->required();
  wl->add_option("--method", wl_method, "wl1 | wl2 | fwl2 | wl3")->check(CLI::IsMember({"wl1", "wl2", "fwl2", "wl3"}));
  wl->add_option("--rounds", wl_rounds, "Stop after this many rounds");
  wl->add_flag("--dump", wl_dump, "Include the full coloring in the JSON report");

  // distinguish
  auto* dist = app.add_subcommand("distinguish", "Run a WL variant on graph pairs");
  std::string dist_pair, dist_method = "fwl2";
  bool dist_builtin = false;
  std::optional<int> dist_rounds;
  dist->add_option("pair", dist_pair, "Pair JSON file");
  dist->add_flag("--builtin", dist_builtin, "Use the builtin pair library");
  dist->add_option("--method", dist_method, "wl1 | wl2 | fwl2 | wl3")->check(CLI::IsMember({"wl1", "wl2", "fwl2", "wl3"}));
  dist->add_option("--rounds", dist_rounds, "Stop after this many rounds");

  // et-check
  auto* et = app.add_subcommand("et-check", "ET consistency with 2-FWL colors and equivariance");
  EtCheckRequest et_req;
  std::vector<std::string> et_graphs;
  et->add_option("graphs", et_graphs, "Graph JSON files (default: builtin graphs)");
  et->add_option("--layers", et_req.layers, "Layer counts to test")->delimiter(',');
  et->add_option("--seeds", et_req.seeds, "Parameter seeds per layer count")->check(CLI::PositiveNumber);
  et->add_option("--tol", et_req.tol, "Max-norm tolerance inside a color class");
  et->add_option("--max-nodes", et_req.max_nodes, "Reject larger graphs");
  et->add_option("--permutations", et_req.permutations, "Random relabelings for equivariance (0 skips)");
  et->add_option("--hidden", et_req.config.hidden, "Hidden width d");
  et->add_option("--heads", et_req.config.heads, "Attention heads");
  et->add_option("--rrwp", et_req.config.rrwp_steps, "Random-walk slices (0 disables)");

  // grad-check
  auto* grad = app.add_subcommand("grad-check", "Analytic vs finite-difference gradients");
  GradCheckRequest grad_req;
  bool grad_relu = false;
  int grad_seed_count = 1;
  grad->add_option("--n", grad_req.n, "Graph order")->check(CLI::Range(1, 5));
  grad->add_option("--d", grad_req.d, "Hidden width")->check(CLI::Range(1, 16));
  grad->add_option("--heads", grad_req.heads, "Attention heads");
  grad->add_option("--seeds", grad_seed_count, "Number of consecutive seeds from --seed")->check(CLI::PositiveNumber);
  grad->add_option("--step", grad_req.h, "Finite-difference step");
  grad->add_option("--tol", grad_req.tol, "Max relative error");
  grad->add_flag("--relu", grad_relu, "Use ReLU instead of GELU");
  grad->add_flag("--zero-qk", grad_req.zero_qk, "Set W^Q = W^K = 0");

  // bench
  auto* bench = app.add_subcommand("bench", "Single-layer forward timing over graph orders");
  BenchRequest bench_req;
  std::optional<double> min_exp, max_exp;
  bench->add_option("--sizes", bench_req.sizes, "Ascending orders n")->delimiter(',');
  bench->add_option("--d", bench_req.d, "Hidden width");
  bench->add_option("--heads", bench_req.heads, "Attention heads");
  bench->add_option("--repeats", bench_req.repeats, "Timed runs per size")->check(CLI::PositiveNumber);
  bench->add_option("--min-exponent", min_exp, "Fail if the fitted exponent is lower");
  bench->add_option("--max-exponent", max_exp, "Fail if the fitted exponent is higher");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exact rational simulation against 2-FWL");
  OracleRequest oracle_req;
  std::string oracle_graph, oracle_partner;
  oracle->add_option("graph", oracle_graph, "Graph JSON file")->required();
  oracle->add_option("--partner", oracle_partner, "Second graph for a parallel run");
  oracle->add_option("--rounds", oracle_req.rounds, "Rounds to simulate")->check(CLI::NonNegativeNumber);
  oracle->add_option("--digit-budget", oracle_req.digit_budget, "Max denominator digits");
  oracle->add_flag("--dump", oracle_req.dump, "Include per-pair rationals in the JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (threads > 0) set_num_threads(threads);

  RunReport report;
  try {
    if (*wl) {
      report = cmd_wl({load_graph_file(wl_graph), parse_method(wl_method), wl_rounds, wl_dump});
    } else if (*dist) {
      DistinguishRequest req;
      req.method = parse_method(dist_method);
      req.rounds = dist_rounds;
      if (dist_builtin == !dist_pair.empty()) {
        std::cerr << "distinguish: give exactly one of a pair file or --builtin\n";
        return kExitUsage;
      }
      req.pairs = dist_builtin ? builtin_pairs() : std::vector<GraphPair>{load_pair_file(dist_pair)};
      report = cmd_distinguish(req);
    } else if (*et) {
      for (const auto& path : et_graphs) et_req.graphs.emplace_back(path, load_graph_file(path));
      et_req.seed = seed;
      report = cmd_et_check(et_req);
    } else if (*grad) {
      grad_req.activation = grad_relu ? Activation::kRelu : Activation::kGelu;
      grad_req.seeds.clear();
      for (int s = 0; s < grad_seed_count; ++s) grad_req.seeds.push_back(seed + static_cast<std::uint64_t>(s));
      report = cmd_grad_check(grad_req);
    } else if (*bench) {
      bench_req.seed = seed;
      if (min_exp || max_exp) bench_req.exponent_window = {min_exp.value_or(-INFINITY), max_exp.value_or(INFINITY)};
      report = cmd_bench(bench_req);
    } else if (*oracle) {
      oracle_req.graph = load_graph_file(oracle_graph);
      if (!oracle_partner.empty()) oracle_req.partner = load_graph_file(oracle_partner);
      report = cmd_oracle(oracle_req);
    }
  } catch (const PartitionMismatch& e) {
    std::cerr << "FALSIFICATION: " << e.what() << "\n";
    return kExitFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (as_json) {
      std::cout << report.to_json().dump(2) << "\n";
    } else {
      for (const auto& line : report.lines) std::cout << line << "\n";
      std::cout << (report.passed ? "PASS" : "FAIL") << " (" << report.seconds << " s, " << report.threads
                << " thread" << (report.threads == 1 ? "" : "s") << ")\n";
    }
    if (!csv_path.empty() && !report.csv.empty()) write_file(csv_path, join_csv(report.csv));
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      write_file(std::filesystem::path(out_dir) / (report.command + ".json"), report.to_json().dump(2) + "\n");
      if (!report.csv.empty()) write_file(std::filesystem::path(out_dir) / (report.command + ".csv"), join_csv(report.csv));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return report.passed ? 0 : kExitFailed;
}
