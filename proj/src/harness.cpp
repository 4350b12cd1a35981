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

#include "etwl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <new>
#include <numeric>
#include <random>
#include <stdexcept>

namespace etwl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

RunReport start_report(std::string command, std::uint64_t seed) {
  RunReport r;
  r.command = std::move(command);
  r.seed = seed;
  r.threads = num_threads();
  r.version = ETWL_VERSION;
  return r;
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

nlohmann::json RunReport::to_json() const {
  return {{"command", command}, {"version", version}, {"seed", seed},     {"threads", threads},
          {"seconds", seconds}, {"passed", passed},   {"inputs", inputs}, {"summary", summary},
          {"results", results}};
}

std::vector<int> random_permutation(int n, std::uint64_t seed) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

// wl ------------------------------------------------------------------------------------

RunReport cmd_wl(const WlRequest& req) {
  const auto start = Clock::now();
  RunReport r = start_report("wl", 0);
  WlOptions opts;
  opts.max_rounds = req.rounds;
  const Coloring c = run_wl(req.method, req.graph, opts);
  r.seconds = seconds_since(start);

  std::vector<std::size_t> sizes;
  for (auto [color, count] : c.histogram()) sizes.push_back(count);
  std::sort(sizes.rbegin(), sizes.rend());
  r.inputs = {{"method", method_id(req.method)}, {"n", req.graph.num_nodes()}};
  if (req.rounds) r.inputs["rounds"] = *req.rounds;
  r.summary = {{"tuples", c.num_tuples()}, {"rounds", c.round}, {"stable", c.stable},
               {"classes", c.num_classes()}, {"class_sizes", sizes}};
  if (req.dump) r.results.push_back(coloring_to_json(c));

  r.lines.push_back(fmt("%s on n=%d: %zu tuples, %d rounds (%s), %zu classes", method_id(req.method).c_str(),
                        req.graph.num_nodes(), c.num_tuples(), c.round, c.stable ? "stable" : "not stable",
                        c.num_classes()));
  std::string hist = "class sizes:";
  for (std::size_t s : sizes) hist += " " + std::to_string(s);
  r.lines.push_back(hist);
  return r;
}

// distinguish -----------------------------------------------------------------------------

RunReport cmd_distinguish(const DistinguishRequest& req) {
  const auto start = Clock::now();
  RunReport r = start_report("distinguish", 0);
  const std::string method = method_id(req.method);
  r.inputs = {{"method", method}, {"pairs", req.pairs.size()}};
  r.csv.push_back("pair,method,n,distinguished,expected,first_difference");
  WlOptions opts;
  opts.max_rounds = req.rounds;
  std::size_t mismatches = 0;
  for (const auto& p : req.pairs) {
    if (p.g.num_nodes() != p.h.num_nodes()) {
      throw std::invalid_argument("pair '" + p.name + "': graphs have different orders");
    }
    const ParallelRun run = run_parallel(req.method, p.g, p.h, opts);
    auto it = p.expected.find(method);
    const Expectation expected = it == p.expected.end() ? Expectation::kUnknown : it->second;
    const bool mismatch = expected != Expectation::kUnknown &&
                          (expected == Expectation::kDistinguishable) != run.distinguished;
    mismatches += mismatch;
    r.results.push_back({{"pair", p.name},
                         {"distinguished", run.distinguished},
                         {"expected", to_string(expected)},
                         {"first_difference", run.first_difference},
                         {"matches_expected", !mismatch}});
    r.csv.push_back(fmt("%s,%s,%d,%s,%s,%d", p.name.c_str(), method.c_str(), p.g.num_nodes(),
                        run.distinguished ? "yes" : "no", to_string(expected).c_str(), run.first_difference));
    r.lines.push_back(fmt("%-28s %-4s %-16s expected %-16s%s", p.name.c_str(), method.c_str(),
                          run.distinguished ? "distinguishable" : "indistinguishable", to_string(expected).c_str(),
                          mismatch ? "  MISMATCH" : ""));
  }
  r.seconds = seconds_since(start);
  r.passed = mismatches == 0;
  r.summary = {{"mismatches", mismatches}};
  return r;
}

// et-check --------------------------------------------------------------------------------

ConsistencyResult fwl_consistency(const LabeledGraph& g, const EtConfig& cfg, const EtParams& params) {
  const EtOutput out = forward(g, cfg, params, Readout::kPair);
  const Coloring c = fwl2(g, cfg.layers);
  ConsistencyResult res;
  for (int t = 0; t <= cfg.layers; ++t) {
    const auto& colors = c.history[std::min<std::size_t>(static_cast<std::size_t>(t), c.history.size() - 1)];
    const MatrixXd& x = out.states[static_cast<std::size_t>(t)];
    // Per class and column, the spread max - min equals the largest
    // pairwise max-norm difference inside the class.
    std::map<ColorId, std::pair<Eigen::RowVectorXd, Eigen::RowVectorXd>> range;
    for (std::size_t row = 0; row < colors.size(); ++row) {
      auto [it, fresh] = range.try_emplace(colors[row], x.row(static_cast<Index>(row)), x.row(static_cast<Index>(row)));
      if (!fresh) {
        it->second.first = it->second.first.cwiseMin(x.row(static_cast<Index>(row)));
        it->second.second = it->second.second.cwiseMax(x.row(static_cast<Index>(row)));
      }
    }
    double worst = 0.0;
    for (const auto& [color, mm] : range) worst = std::max(worst, (mm.second - mm.first).maxCoeff());
    res.max_violation.push_back(worst);
  }
  return res;
}

EquivarianceResult equivariance(const LabeledGraph& g, const EtConfig& cfg, const EtParams& params,
                                int permutations, std::uint64_t seed) {
  const EtOutput base = forward(g, cfg, params, Readout::kGraphSum);
  EquivarianceResult res;
  for (int p = 0; p < permutations; ++p) {
    const std::vector<int> perm = random_permutation(g.num_nodes(), seed + static_cast<std::uint64_t>(p));
    const EtOutput moved = forward(g.permuted(perm), cfg, params, Readout::kGraphSum);
    const MatrixXd expected = permute_pairs(base.states.back(), perm);
    res.pair_error = std::max(res.pair_error, (moved.states.back() - expected).cwiseAbs().maxCoeff());
    res.readout_error = std::max(res.readout_error, (moved.readout - base.readout).cwiseAbs().maxCoeff());
  }
  return res;
}

RunReport cmd_et_check(const EtCheckRequest& req) {
  const auto start = Clock::now();
  RunReport r = start_report("et-check", req.seed);
  auto graphs = req.graphs.empty() ? builtin_graphs() : req.graphs;
  for (const auto& [name, g] : graphs) {
    if (g.num_nodes() > req.max_nodes) {
      throw std::invalid_argument("graph '" + name + "' has " + std::to_string(g.num_nodes()) +
                                  " nodes, cap is " + std::to_string(req.max_nodes));
    }
  }
  r.inputs = {{"graphs", graphs.size()}, {"layers", req.layers}, {"seeds", req.seeds},
              {"tol", req.tol}, {"permutations", req.permutations}, {"config", config_to_json(req.config)}};
  r.csv.push_back("graph,layers,seed,round,max_violation");

  double worst = 0.0, worst_pair = 0.0, worst_readout = 0.0;
  std::size_t violations = 0;
  for (const auto& [name, g] : graphs) {
    double graph_worst = 0.0;
    for (int layers : req.layers) {
      for (int s = 0; s < req.seeds; ++s) {
        EtConfig cfg = req.config;
        cfg.layers = layers;
        cfg.seed = req.seed + static_cast<std::uint64_t>(s);
        const EtParams params = EtParams::init_for(cfg, g);
        const ConsistencyResult c = fwl_consistency(g, cfg, params);
        for (std::size_t t = 0; t < c.max_violation.size(); ++t) {
          const double v = c.max_violation[t];
          violations += v >= req.tol;
          graph_worst = std::max(graph_worst, v);
          r.csv.push_back(fmt("%s,%d,%llu,%zu,%.3e", name.c_str(), layers,
                              static_cast<unsigned long long>(cfg.seed), t, v));
          r.results.push_back({{"graph", name}, {"layers", layers}, {"seed", cfg.seed}, {"round", t},
                               {"max_violation", v}});
        }
      }
    }
    worst = std::max(worst, graph_worst);
    std::string line = fmt("%-14s n=%-2d consistency max violation %.3e", name.c_str(), g.num_nodes(), graph_worst);
    if (req.permutations > 0) {
      EtConfig cfg = req.config;
      cfg.layers = *std::max_element(req.layers.begin(), req.layers.end());
      cfg.seed = req.seed;
      const EquivarianceResult e = equivariance(g, cfg, EtParams::init_for(cfg, g), req.permutations, req.seed);
      worst_pair = std::max(worst_pair, e.pair_error);
      worst_readout = std::max(worst_readout, e.readout_error);
      line += fmt(", equivariance %.3e, readout %.3e", e.pair_error, e.readout_error);
    }
    r.lines.push_back(line);
  }
  const bool equivariant = worst_pair < req.equivariance_tol && worst_readout < req.equivariance_tol;
  r.passed = violations == 0 && (req.permutations == 0 || equivariant);
  r.summary = {{"max_violation", worst}, {"violations", violations}};
  if (req.permutations > 0) {
    r.summary["equivariance_error"] = worst_pair;
    r.summary["readout_invariance_error"] = worst_readout;
  }
  r.seconds = seconds_since(start);
  r.lines.push_back(fmt("max violation %.3e (tol %.1e), %zu violations", worst, req.tol, violations));
  return r;
}

// grad-check ------------------------------------------------------------------------------

GradCheckResult grad_check(const GradCheckRequest& req, std::uint64_t seed) {
  if (req.n < 1 || req.d < 1) throw std::invalid_argument("grad-check: n and d must be positive");
  std::vector<Label> labels;
  for (int v = 0; v < req.n; ++v) labels.push_back(v % 2);
  const LabeledGraph g(req.n, graphs::path(req.n).edges(), labels);

  EtConfig cfg;
  cfg.layers = 1;
  cfg.hidden = req.d;
  cfg.heads = req.heads;
  cfg.activation = req.activation;
  cfg.readout = Readout::kPair;
  cfg.edge_dim = req.d;
  cfg.seed = seed;
  EtParams params = EtParams::init(cfg, {0, 1});
  if (req.zero_qk) {
    params.layers[0].wq.setZero();
    params.layers[0].wk.setZero();
  }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  MatrixXd weights(static_cast<Index>(req.n) * req.n, req.d);
  for (Index i = 0; i < weights.size(); ++i) weights.data()[i] = dist(rng);

  auto record_loss = [&](Tape& tape, const EtParams& p, bool trainable) {
    const ParamVars vars = register_params(tape, p, trainable);
    Var x = record_tokenize(tape, g, p, vars, cfg);
    x = record_layer(tape, x, 0, vars, cfg);
    return sum_all(tape, hadamard(tape, x, tape.constant(weights)));
  };
  auto loss_value = [&](const EtParams& p) {
    Tape tape(false);
    return tape.value(record_loss(tape, p, false))(0, 0);
  };

  Tape tape(true);
  const Var loss = record_loss(tape, params, true);
  const Gradients grads = tape.backward(loss);

  GradCheckResult res;
  params.for_each([&](const std::string& name, MatrixXd& m) {
    if (name.starts_with("readout.")) return;  // unused by a pair-output loss
    const MatrixXd& analytic = grads.at(name);
    for (Index i = 0; i < m.size(); ++i) {
      const double orig = m.data()[i];
      m.data()[i] = orig + req.h;
      const double up = loss_value(params);
      m.data()[i] = orig - req.h;
      const double down = loss_value(params);
      m.data()[i] = orig;
      const double numeric = (up - down) / (2 * req.h);
      const double a = analytic.data()[i];
      res.finite = res.finite && std::isfinite(a) && std::isfinite(numeric);
      const double rel = std::abs(a - numeric) / (std::abs(a) + 1e-8);
      if (rel > res.max_rel_error || !std::isfinite(rel)) {
        res.max_rel_error = std::isfinite(rel) ? rel : INFINITY;
        res.worst_param = name;
      }
      ++res.entries;
    }
  });
  return res;
}

RunReport cmd_grad_check(const GradCheckRequest& req) {
  const auto start = Clock::now();
  RunReport r = start_report("grad-check", req.seeds.empty() ? 0 : req.seeds.front());
  r.inputs = {{"n", req.n}, {"d", req.d}, {"heads", req.heads}, {"h", req.h}, {"tol", req.tol},
              {"seeds", req.seeds}, {"zero_qk", req.zero_qk}};
  r.csv.push_back("seed,entries,max_rel_error,worst_param");
  double worst = 0.0;
  for (std::uint64_t seed : req.seeds) {
    const GradCheckResult g = grad_check(req, seed);
    worst = std::max(worst, g.max_rel_error);
    r.passed = r.passed && g.finite && g.max_rel_error < req.tol;
    r.results.push_back({{"seed", seed}, {"entries", g.entries}, {"max_rel_error", g.max_rel_error},
                         {"worst_param", g.worst_param}, {"finite", g.finite}});
    r.csv.push_back(fmt("%llu,%zu,%.3e,%s", static_cast<unsigned long long>(seed), g.entries, g.max_rel_error,
                        g.worst_param.c_str()));
    r.lines.push_back(fmt("seed %llu: %zu entries, max rel err %.3e (%s)", static_cast<unsigned long long>(seed),
                          g.entries, g.max_rel_error, g.worst_param.c_str()));
  }
  r.summary = {{"max_rel_error", worst}};
  r.seconds = seconds_since(start);
  return r;
}

// bench -------------------------------------------------------------------------------------

RunReport cmd_bench(const BenchRequest& req) {
  const auto start = Clock::now();
  RunReport r = start_report("bench", req.seed);
  if (req.sizes.empty()) throw std::invalid_argument("bench: no sizes given");
  for (std::size_t i = 0; i < req.sizes.size(); ++i) {
    if (req.sizes[i] < 1 || (i > 0 && req.sizes[i] <= req.sizes[i - 1])) {
      throw std::invalid_argument("bench: sizes must be positive and ascending");
    }
  }
  if (req.repeats < 1) throw std::invalid_argument("bench: repeats must be >= 1");
  r.inputs = {{"sizes", req.sizes}, {"d", req.d}, {"heads", req.heads}, {"repeats", req.repeats}};

  EtConfig cfg;
  cfg.layers = 1;
  cfg.hidden = req.d;
  cfg.heads = req.heads;
  cfg.seed = req.seed;
  const LayerParams layer = EtParams::init(cfg, {0}).layers.front();

  r.csv.push_back("n,d,heads,threads,repeats,median_s,min_s,max_s");
  std::vector<double> xs, medians;
  for (int n : req.sizes) {
    std::vector<double> times;
    try {
      std::mt19937_64 rng(req.seed + static_cast<std::uint64_t>(n));
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      MatrixXd x(static_cast<Index>(n) * n, req.d);
      for (Index i = 0; i < x.size(); ++i) x.data()[i] = dist(rng);
      et_layer(x, layer, cfg);  // warm-up
      for (int k = 0; k < req.repeats; ++k) {
        const auto t0 = Clock::now();
        const MatrixXd y = et_layer(x, layer, cfg);
        times.push_back(seconds_since(t0));
        if (!std::isfinite(y(0, 0))) throw std::runtime_error("bench: non-finite output");
      }
    } catch (const std::bad_alloc&) {
      throw std::runtime_error("bench: allocation failed at n=" + std::to_string(n));
    }
    const double med = median(times);
    const double lo = *std::min_element(times.begin(), times.end());
    const double hi = *std::max_element(times.begin(), times.end());
    xs.push_back(n);
    medians.push_back(med);
    r.results.push_back({{"n", n}, {"median_s", med}, {"min_s", lo}, {"max_s", hi}, {"times_s", times}});
    r.csv.push_back(fmt("%d,%d,%d,%d,%d,%.6e,%.6e,%.6e", n, req.d, req.heads, r.threads, req.repeats, med, lo, hi));
    r.lines.push_back(fmt("n=%-5d median %.4f s  (min %.4f, max %.4f)", n, med, lo, hi));
  }
  if (xs.size() >= 2) {
    const double slope = loglog_slope(xs, medians);
    r.summary["exponent"] = slope;
    nlohmann::json ratios = nlohmann::json::array();
    for (std::size_t i = 1; i < xs.size(); ++i) {
      ratios.push_back({{"from", xs[i - 1]}, {"to", xs[i]}, {"ratio", medians[i] / medians[i - 1]}});
    }
    r.summary["ratios"] = ratios;
    r.lines.push_back(fmt("fitted exponent %.3f", slope));
    if (req.exponent_window) {
      r.passed = slope >= req.exponent_window->first && slope <= req.exponent_window->second;
    }
  }
  r.seconds = seconds_since(start);
  return r;
}

// oracle ------------------------------------------------------------------------------------

RunReport cmd_oracle(const OracleRequest& req) {
  const auto start = Clock::now();
  RunReport r = start_report("oracle", 0);
  r.inputs = {{"n", req.graph.num_nodes()}, {"rounds", req.rounds}, {"digit_budget", req.digit_budget},
              {"parallel", req.partner.has_value()}};
  r.csv.push_back("graph,round,classes");
  auto report = [&](const char* label, const ExactSimulation& sim) {
    for (const auto& st : sim.rounds) {
      r.lines.push_back(fmt("%s round %d: %zu classes, partition equals 2-FWL", label, st.round, st.num_classes));
      r.csv.push_back(fmt("%s,%d,%zu", label, st.round, st.num_classes));
    }
    r.lines.push_back(fmt("%s max denominator digits: %zu", label, sim.max_denominator_digits));
    if (req.dump) r.results.push_back(simulation_to_json(sim));
  };
  if (req.partner) {
    const ExactParallel run = exact_simulate_pair(req.graph, *req.partner, req.rounds, req.digit_budget);
    report("g", run.g);
    report("h", run.h);
    r.summary = {{"first_difference", run.first_difference},
                 {"max_denominator_digits", std::max(run.g.max_denominator_digits, run.h.max_denominator_digits)}};
    r.lines.push_back(run.first_difference < 0 ? std::string("aggregates agree at every round")
                                               : fmt("aggregates first differ at round %d", run.first_difference));
  } else {
    const ExactSimulation sim = exact_simulate(req.graph, req.rounds, req.digit_budget);
    report("g", sim);
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& st : sim.rounds) classes.push_back(st.num_classes);
    r.summary = {{"classes", classes}, {"max_denominator_digits", sim.max_denominator_digits}};
  }
  r.seconds = seconds_since(start);
  return r;
}

}  // namespace etwl
