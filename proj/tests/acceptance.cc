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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Tolerances and limits are fixed here, not configurable.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "etwl/harness.hpp"
#include "etwl/logic.hpp"
#include "etwl/oracle.hpp"

namespace {

using namespace etwl;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  failures += !o.pass;
  std::printf("[%s] %2d %-34s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double elapsed(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

// 1 ---------------------------------------------------------------------------
Outcome fwl_consistency_suite() {
  const auto start = Clock::now();
  EtCheckRequest req;
  req.layers = {1, 2, 3};
  req.seeds = 5;
  req.tol = 1e-6;
  req.permutations = 0;
  std::size_t graphs = 0;
  for (const auto& [name, g] : builtin_graphs()) graphs += g.num_nodes() <= 8;
  const RunReport r = cmd_et_check(req);
  const double secs = elapsed(start);
  const std::size_t violations = r.summary["violations"];
  return {violations == 0 && secs < 60.0,
          fmt("%zu graphs x 5 seeds x L{1,2,3}: %zu violations, max spread %.2e (tol 1e-6), %.1f s (limit 60)",
              graphs, violations, r.summary["max_violation"].get<double>(), secs)};
}

// 2 ---------------------------------------------------------------------------
Outcome exact_simulation_suite() {
  const auto start = Clock::now();
  auto graphs_under_test = builtin_graphs();
  for (const char* file : {"triangle", "p3", "k3", "directed_chain"}) {
    graphs_under_test.emplace_back(file, load_graph_file(std::string(ETWL_FIXTURES) + "/" + file + ".json"));
  }
  std::size_t graphs = 0, digits = 0;
  for (const auto& [name, g] : graphs_under_test) {
    if (g.num_nodes() > 5) continue;
    // exact_simulate throws PartitionMismatch on any disagreement.
    const ExactSimulation sim = exact_simulate(g, 2);
    for (std::size_t t = 0; t < sim.rounds.size(); ++t) {
      const std::vector<ColorId> exact(sim.rounds[t].index.begin(), sim.rounds[t].index.end());
      if (!same_partition(exact, fwl2(g, static_cast<int>(t)).colors)) {
        return {false, "partition mismatch on " + name + " round " + std::to_string(t)};
      }
    }
    digits = std::max(digits, sim.max_denominator_digits);
    ++graphs;
  }
  const double secs = elapsed(start);
  return {graphs > 0 && secs < 120.0,
          fmt("%zu builtin + fixture graphs (n <= 5), rounds 0..2 equal to 2-FWL; max denominator %zu digits, %.1f s (limit 120)",
              graphs, digits, secs)};
}

// 3 ---------------------------------------------------------------------------
void multisets(int alphabet, int max_order, std::vector<int>& cur, const std::function<void(const std::vector<int>&)>& f) {
  f(cur);
  if (static_cast<int>(cur.size()) == max_order) return;
  for (int x = cur.empty() ? 1 : cur.back(); x <= alphabet; ++x) {
    cur.push_back(x);
    multisets(alphabet, max_order, cur, f);
    cur.pop_back();
  }
}

Outcome multiset_injectivity() {
  const auto start = Clock::now();
  std::size_t checked = 0, collisions = 0;
  for (int alphabet = 1; alphabet <= 6; ++alphabet) {
    for (int base = 2; base <= 7; ++base) {
      std::set<mpq_class> codes;
      std::size_t count = 0;
      std::vector<int> cur;
      multisets(alphabet, base - 1, cur, [&](const std::vector<int>& m) {
        codes.insert(encode_multiset(m, base, alphabet).value);
        ++count;
      });
      collisions += count - codes.size();
      checked += count;
    }
  }
  const double secs = elapsed(start);
  return {collisions == 0 && secs < 10.0,
          fmt("%zu multisets over alphabets 1..6, bases 2..7: %zu collisions, %.2f s (limit 10)", checked, collisions,
              secs)};
}

// 4 ---------------------------------------------------------------------------
Outcome nonoverlap_addition() {
  std::mt19937_64 rng(4);
  std::size_t collisions = 0, sums = 0, nonconforming = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int base = std::uniform_int_distribution<int>(2, 7)(rng);
    const int split = std::uniform_int_distribution<int>(1, 3)(rng);
    const int tail = std::uniform_int_distribution<int>(1, 3)(rng);
    std::uniform_int_distribution<int> digit(0, base - 1);
    std::uniform_int_distribution<int> size(1, 6);
    // A uses positions 1..split with a nonzero leading part, B uses
    // split+1..split+tail, so every A digit precedes every B digit.
    auto random_code = [&](int first, int last, bool nonzero) {
      std::map<int, int> d;
      do {
        d.clear();
        for (int p = first; p <= last; ++p) d[p] = digit(rng);
      } while (nonzero && std::all_of(d.begin(), d.end(), [](auto kv) { return kv.second == 0; }));
      return mary_from_digits(d, base);
    };
    std::vector<MaryCode> a, b;
    for (int k = size(rng); k > 0; --k) a.push_back(random_code(1, split, true));
    for (int k = size(rng); k > 0; --k) b.push_back(random_code(split + 1, split + tail, false));
    const NonOverlapReport r = check_nonoverlap_addition(a, b);
    nonconforming += !(r.hypothesis_met && r.ordered);
    collisions += !r.unique_sums;
    sums += r.distinct_sums;
  }
  return {collisions == 0 && nonconforming == 0,
          fmt("100 random conforming (A,B): %zu sums checked exhaustively, %zu collisions", sums, collisions)};
}

// 5 ---------------------------------------------------------------------------
Outcome wl_hierarchy() {
  std::ifstream in(std::string(ETWL_FIXTURES) + "/builtin_verdicts.json");
  const nlohmann::json frozen = nlohmann::json::parse(in);
  std::map<std::string, GraphPair> pairs;
  for (auto& p : builtin_pairs()) pairs.emplace(p.name, p);
  const GraphPair& c6 = pairs.at("c6_vs_2c3");
  const GraphPair& srg = pairs.at("rook4_vs_shrikhande");
  const bool c6_wl1 = distinguishes(WlMethod::kWl1, c6);
  const bool c6_fwl2 = distinguishes(WlMethod::kFwl2, c6);
  const bool srg_wl2 = distinguishes(WlMethod::kWl2, srg);
  const bool srg_fwl2 = distinguishes(WlMethod::kFwl2, srg);
  std::size_t agree = 0;
  for (const auto& [name, p] : pairs) agree += distinguishes(WlMethod::kWl3, p) == distinguishes(WlMethod::kFwl2, p);
  const bool pass = !c6_wl1 && c6_fwl2 && !srg_wl2 && srg_fwl2 == frozen["fwl2"]["rook4_vs_shrikhande"].get<bool>() &&
                    agree == pairs.size();
  return {pass, fmt("c6/2c3 wl1=%s fwl2=%s; rook4/shrikhande wl2=%s fwl2=%s (frozen %s); wl3==fwl2 on %zu/%zu pairs",
                    c6_wl1 ? "yes" : "no", c6_fwl2 ? "yes" : "no", srg_wl2 ? "yes" : "no", srg_fwl2 ? "yes" : "no",
                    frozen["fwl2"]["rook4_vs_shrikhande"].get<bool>() ? "yes" : "no", agree, pairs.size())};
}

// 6 ---------------------------------------------------------------------------
Outcome gradient_check() {
  GradCheckRequest req;
  req.n = 3;
  req.d = 4;
  req.heads = 2;
  req.h = 1e-5;
  req.tol = 1e-4;
  req.seeds = {0, 1, 2};
  const RunReport r = cmd_grad_check(req);
  return {r.passed, fmt("n=3 d=4 H=2, 3 seeds, h=1e-5: max rel err %.2e (limit 1e-4)",
                        r.summary["max_rel_error"].get<double>())};
}

// 7 ---------------------------------------------------------------------------
Outcome equivariance_suite() {
  EtConfig cfg;
  cfg.layers = 2;
  cfg.hidden = 8;
  cfg.heads = 2;
  cfg.rrwp_steps = 3;
  double pair = 0, readout = 0;
  std::size_t graphs = 0;
  for (const auto& [name, g] : builtin_graphs()) {
    const EquivarianceResult e = equivariance(g, cfg, EtParams::init_for(cfg, g), 20, 77);
    pair = std::max(pair, e.pair_error);
    readout = std::max(readout, e.readout_error);
    ++graphs;
  }
  return {pair < 1e-9 && readout < 1e-9,
          fmt("%zu graphs x 20 permutations: pair err %.2e, graph readout err %.2e (tol 1e-9)", graphs, pair, readout)};
}

// 8 ---------------------------------------------------------------------------
Outcome cubic_scaling() {
  const auto start = Clock::now();
  BenchRequest req;
  req.sizes = {50, 100, 150, 200};
  req.d = 8;
  req.repeats = 5;
  const RunReport r = cmd_bench(req);
  const double exponent = r.summary["exponent"];
  const double ratio = r.summary["ratios"][0]["ratio"];
  const double secs = elapsed(start);
  return {exponent >= 2.6 && exponent <= 3.4 && ratio >= 5 && ratio <= 12 && secs < 300,
          fmt("n={50,100,150,200} d=8: exponent %.3f (window [2.6,3.4]), t(100)/t(50) %.2f (window [5,12]), "
              "%d thread(s), %.1f s (limit 300)",
              exponent, ratio, r.threads, secs)};
}

// 9 ---------------------------------------------------------------------------
Outcome logic_suite() {
  std::size_t checks = 0, failed = 0;
  auto check = [&](const Relation& mother) {
    const Relation rels[] = {mother};
    const LabeledGraph g = relation_graph(rels);
    failed += !logic_fwl_consistency(g, ancestor(mother, 2), 1);
    failed += !logic_fwl_consistency(g, ancestor(mother, 3), 2);
    checks += 2;
  };
  check(mother_chain(4));
  check(mother_chain(7));
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 25; ++trial) check(random_family(3 + trial % 5, 0.8, rng));
  return {failed == 0, fmt("grandmother@t=1, greatgrandmother@t=2 on chains + 25 family DAGs: %zu/%zu consistent",
                           checks - failed, checks)};
}

// 10 --------------------------------------------------------------------------
MatrixXd random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  MatrixXd m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

Outcome kernel_equivalence() {
  std::mt19937_64 rng(10);
  std::size_t serial_mismatch = 0;
  double parallel_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + (trial * 7) % 16;
    const Index d = 1 + trial % 5;
    const MatrixXd q = random_matrix(n * n, d, rng), k = random_matrix(n * n, d, rng);
    const MatrixXd a = random_matrix(n * n, n, rng);
    MatrixXd ref_s(n * n, n), ref_v = MatrixXd::Zero(n * n, d);
    for (Index i = 0; i < n; ++i)
      for (Index l = 0; l < n; ++l)
        for (Index j = 0; j < n; ++j) {
          double s = 0;
          for (Index c = 0; c < d; ++c) s += q(i * n + l, c) * k(l * n + j, c);
          ref_s(i * n + j, l) = s;
        }
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        for (Index l = 0; l < n; ++l)
          for (Index c = 0; c < d; ++c) ref_v(i * n + j, c) += a(i * n + j, l) * (q(i * n + l, c) * k(l * n + j, c));
    set_num_threads(1);
    serial_mismatch += tri_contract_scores(q, k) != ref_s;
    serial_mismatch += tri_contract_values(a, q, k) != ref_v;
    set_num_threads(4);
    parallel_err = std::max(parallel_err, (tri_contract_scores(q, k) - ref_s).cwiseAbs().maxCoeff());
    parallel_err = std::max(parallel_err, (tri_contract_values(a, q, k) - ref_v).cwiseAbs().maxCoeff());
    set_num_threads(1);
  }
  return {serial_mismatch == 0 && parallel_err <= 1e-12,
          fmt("50 instances each: %zu serial mismatches (exact), parallel max err %.2e (tol 1e-12)", serial_mismatch,
              parallel_err)};
}

}  // namespace

int main() {
  std::printf("etwl %s acceptance suite\n", ETWL_VERSION);
  criterion(1, "FWL consistency of ET embeddings", fwl_consistency_suite);
  criterion(2, "exact simulation equals 2-FWL", exact_simulation_suite);
  criterion(3, "m-ary multiset encoding injective", multiset_injectivity);
  criterion(4, "non-overlapping sums unique", nonoverlap_addition);
  criterion(5, "WL hierarchy on builtin pairs", wl_hierarchy);
  criterion(6, "gradients vs finite differences", gradient_check);
  criterion(7, "permutation equivariance", equivariance_suite);
  criterion(8, "cubic runtime of one layer", cubic_scaling);
  criterion(9, "relation composition vs 2-FWL", logic_suite);
  criterion(10, "triangular kernels vs loops", kernel_equivalence);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
