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

#include "etwl/edge_transformer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace etwl {

Readout parse_readout(std::string_view id) {
  if (id == "pair") return Readout::kPair;
  if (id == "edge") return Readout::kEdge;
  if (id == "node-diagonal") return Readout::kNodeDiagonal;
  if (id == "node-sum") return Readout::kNodeSum;
  if (id == "graph-sum") return Readout::kGraphSum;
  if (id == "graph-mean") return Readout::kGraphMean;
  throw std::invalid_argument("unknown readout mode '" + std::string(id) + "'");
}

std::string readout_id(Readout r) {
  switch (r) {
    case Readout::kPair: return "pair";
    case Readout::kEdge: return "edge";
    case Readout::kNodeDiagonal: return "node-diagonal";
    case Readout::kNodeSum: return "node-sum";
    case Readout::kGraphSum: return "graph-sum";
    case Readout::kGraphMean: return "graph-mean";
  }
  return "?";
}

void EtConfig::validate() const {
  if (layers < 0) throw std::invalid_argument("EtConfig: layers must be >= 0");
  if (hidden < 1 || heads < 1 || hidden % heads != 0) {
    throw std::invalid_argument("EtConfig: heads must divide hidden");
  }
  if (ffn_multiplier < 1) throw std::invalid_argument("EtConfig: ffn_multiplier must be >= 1");
  if (rrwp_steps < 0) throw std::invalid_argument("EtConfig: rrwp_steps must be >= 0");
  if (edge_dim < 1) throw std::invalid_argument("EtConfig: edge_dim must be >= 1");
  if (!(ln_eps > 0.0)) throw std::invalid_argument("EtConfig: ln_eps must be positive");
}

// Parameters --------------------------------------------------------------------

namespace {

FeedForward make_ffn(Index in, Index hidden, Index out) {
  return FeedForward{MatrixXd(in, hidden), MatrixXd(1, hidden), MatrixXd(hidden, out), MatrixXd(1, out)};
}

template <class Params, class Fn>
void visit(Params& p, Fn&& fn) {
  auto ffn = [&](const std::string& prefix, auto& f) {
    fn(prefix + ".w1", f.w1);
    fn(prefix + ".b1", f.b1);
    fn(prefix + ".w2", f.w2);
    fn(prefix + ".b2", f.b2);
  };
  fn("tokenizer.x1", p.tokenizer.x1);
  fn("tokenizer.x2", p.tokenizer.x2);
  ffn("tokenizer.phi", p.tokenizer.phi);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    auto& layer = p.layers[l];
    const std::string pre = "layers." + std::to_string(l);
    fn(pre + ".wq", layer.wq);
    fn(pre + ".wk", layer.wk);
    fn(pre + ".wv1", layer.wv1);
    fn(pre + ".wv2", layer.wv2);
    fn(pre + ".wo", layer.wo);
    fn(pre + ".ln_gamma", layer.ln_gamma);
    fn(pre + ".ln_beta", layer.ln_beta);
    ffn(pre + ".ffn", layer.ffn);
  }
  ffn("readout.rho1", p.rho1);
  ffn("readout.rho2", p.rho2);
}

}  // namespace

int EtParams::token_input_width() const {
  return static_cast<int>(tokenizer.x1.cols()) + edge_feature_width + rrwp_steps +
         2 * static_cast<int>(label_alphabet.size());
}

void EtParams::for_each(const std::function<void(const std::string&, MatrixXd&)>& fn) { visit(*this, fn); }

void EtParams::for_each(const std::function<void(const std::string&, const MatrixXd&)>& fn) const {
  visit(*this, fn);
}

EtParams EtParams::init(const EtConfig& cfg, std::vector<Label> label_alphabet, int edge_feature_width) {
  cfg.validate();
  std::sort(label_alphabet.begin(), label_alphabet.end());
  label_alphabet.erase(std::unique(label_alphabet.begin(), label_alphabet.end()), label_alphabet.end());

  EtParams p;
  p.label_alphabet = std::move(label_alphabet);
  p.edge_feature_width = edge_feature_width;
  p.rrwp_steps = cfg.rrwp_steps;
  const Index d = cfg.hidden;
  p.tokenizer.x1.resize(1, cfg.edge_dim);
  p.tokenizer.x2.resize(1, cfg.edge_dim);
  p.tokenizer.phi = make_ffn(p.token_input_width(), d, d);
  for (int l = 0; l < cfg.layers; ++l) {
    LayerParams layer;
    layer.wq.resize(d, d);
    layer.wk.resize(d, d);
    layer.wv1.resize(d, d);
    layer.wv2.resize(d, d);
    layer.wo.resize(d, d);
    layer.ln_gamma = MatrixXd::Ones(1, d);
    layer.ln_beta = MatrixXd::Zero(1, d);
    layer.ffn = make_ffn(d, d * cfg.ffn_multiplier, d);
    p.layers.push_back(std::move(layer));
  }
  p.rho1 = make_ffn(d, d, d);
  p.rho2 = make_ffn(d, d, d);

  std::mt19937_64 rng(cfg.seed);
  // Fan-in of a bias is the row count of the weight it follows.
  Index last_fan_in = 1;
  p.for_each([&](const std::string& name, MatrixXd& m) {
    if (name.ends_with("ln_gamma") || name.ends_with("ln_beta")) return;
    Index fan_in = m.rows();
    if (name.ends_with(".x1") || name.ends_with(".x2")) {
      fan_in = m.cols();
    } else if (m.rows() == 1 && name.find(".b") != std::string::npos) {
      fan_in = last_fan_in;
    } else {
      last_fan_in = m.rows();
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<Index>(fan_in, 1)));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  });
  return p;
}

EtParams EtParams::init_for(const EtConfig& cfg, const LabeledGraph& g) {
  return init(cfg, g.label_alphabet(), g.edge_feature_width());
}

// Positional features ----------------------------------------------------------------

RrwpFeatures rrwp(const LabeledGraph& g, int steps) {
  if (steps < 1) throw std::invalid_argument("rrwp: steps must be >= 1");
  const int n = g.num_nodes();
  MatrixXd walk = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& nb = g.neighbors(i);
    for (Node j : nb) walk(i, j) = 1.0 / static_cast<double>(nb.size());
  }
  RrwpFeatures out;
  out.n = n;
  out.slices.push_back(MatrixXd::Identity(n, n));
  for (int s = 1; s < steps; ++s) out.slices.push_back(out.slices.back() * walk);
  return out;
}

// Tokenization ---------------------------------------------------------------------------

TokenInputs token_inputs(const LabeledGraph& g, const EtParams& params) {
  const int n = g.num_nodes();
  const Index pairs = static_cast<Index>(n) * n;
  const int p = static_cast<int>(params.label_alphabet.size());
  if (g.edge_feature_width() != 0 && g.edge_feature_width() != params.edge_feature_width) {
    throw std::invalid_argument("tokenize: graph edge features have width " +
                                std::to_string(g.edge_feature_width()) + ", params expect " +
                                std::to_string(params.edge_feature_width));
  }
  std::vector<int> onehot(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    auto it = std::lower_bound(params.label_alphabet.begin(), params.label_alphabet.end(), g.label(v));
    if (it == params.label_alphabet.end() || *it != g.label(v)) {
      throw std::invalid_argument("tokenize: label " + std::to_string(g.label(v)) +
                                  " is outside the alphabet the parameters were built for");
    }
    onehot[static_cast<std::size_t>(v)] = static_cast<int>(it - params.label_alphabet.begin());
  }

  const int q = params.edge_feature_width;
  const int k = params.rrwp_steps;
  TokenInputs in{MatrixXd::Zero(pairs, q + k + 2 * p), MatrixXd::Zero(pairs, 1), MatrixXd::Zero(pairs, 1)};
  RrwpFeatures walks;
  if (k > 0) walks = rrwp(g, k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Index r = static_cast<Index>(i) * n + j;
      if (i == j) {
        in.diag_mask(r, 0) = 1.0;
      } else if (g.has_edge(i, j)) {
        in.edge_mask(r, 0) = 1.0;
      }
      if (q > 0) {
        if (auto f = g.edge_feature(i, j)) {
          for (int c = 0; c < q; ++c) in.fixed(r, c) = (*f)[static_cast<std::size_t>(c)];
        }
      }
      for (int s = 0; s < k; ++s) in.fixed(r, q + s) = walks.at(i, j, s);
      in.fixed(r, q + k + onehot[static_cast<std::size_t>(i)]) = 1.0;
      in.fixed(r, q + k + p + onehot[static_cast<std::size_t>(j)]) = 1.0;
    }
  }
  return in;
}

// Recording --------------------------------------------------------------------------------

ParamVars register_params(Tape& tape, const EtParams& params, bool trainable) {
  ParamVars vars;
  params.for_each([&](const std::string& name, const MatrixXd& m) {
    vars[name] = trainable ? tape.parameter(name, m) : tape.constant(m);
  });
  return vars;
}

namespace {

Var get(const ParamVars& vars, const std::string& name) {
  auto it = vars.find(name);
  if (it == vars.end()) throw std::invalid_argument("missing parameter '" + name + "'");
  return it->second;
}

Var record_ffn(Tape& t, Var x, const ParamVars& vars, const std::string& prefix, Activation act) {
  Var h = add_row(t, matmul(t, x, get(vars, prefix + ".w1")), get(vars, prefix + ".b1"));
  h = activate(t, h, act);
  return add_row(t, matmul(t, h, get(vars, prefix + ".w2")), get(vars, prefix + ".b2"));
}

Var record_layer_impl(Tape& t, Var x, const std::string& pre, const ParamVars& vars, const EtConfig& cfg,
                      std::vector<Var>* attention) {
  const Var ln = layer_norm(t, x, get(vars, pre + ".ln_gamma"), get(vars, pre + ".ln_beta"), cfg.ln_eps);
  const Var q = matmul(t, ln, get(vars, pre + ".wq"));
  const Var k = matmul(t, ln, get(vars, pre + ".wk"));
  const Var v1 = matmul(t, ln, get(vars, pre + ".wv1"));
  const Var v2 = matmul(t, ln, get(vars, pre + ".wv2"));
  const Index dh = cfg.head_dim();
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Var> heads;
  for (int h = 0; h < cfg.heads; ++h) {
    auto part = [&](Var m) { return cfg.heads == 1 ? m : slice_cols(t, m, h * dh, dh); };
    const Var scores = scale(t, tri_contract_scores(t, part(q), part(k)), inv_sqrt);
    const Var alpha = softmax_lastdim(t, scores);
    if (attention) attention->push_back(alpha);
    heads.push_back(tri_contract_values(t, alpha, part(v1), part(v2)));
  }
  const Var joined = heads.size() == 1 ? heads.front() : concat_cols(t, heads);
  const Var attended = matmul(t, joined, get(vars, pre + ".wo"));
  return record_ffn(t, add(t, x, attended), vars, pre + ".ffn", cfg.activation);
}

void check_compatible(const EtConfig& cfg, const EtParams& params) {
  cfg.validate();
  if (static_cast<int>(params.layers.size()) < cfg.layers) {
    throw std::invalid_argument("parameters hold fewer layers than the config requests");
  }
  if (params.rrwp_steps != cfg.rrwp_steps) {
    throw std::invalid_argument("parameters were built for a different rrwp_steps");
  }
  if (params.tokenizer.phi.w2.cols() != cfg.hidden) {
    throw std::invalid_argument("parameters were built for a different hidden size");
  }
}

}  // namespace

Var record_tokenize(Tape& tape, const LabeledGraph& g, const EtParams& params, const ParamVars& vars,
                    const EtConfig& cfg) {
  TokenInputs in = token_inputs(g, params);
  const Var edge = matmul(tape, tape.constant(std::move(in.edge_mask)), get(vars, "tokenizer.x1"));
  const Var diag = matmul(tape, tape.constant(std::move(in.diag_mask)), get(vars, "tokenizer.x2"));
  const Var base = add(tape, edge, diag);
  Var u = base;
  if (in.fixed.cols() > 0) {
    const Var parts[] = {base, tape.constant(std::move(in.fixed))};
    u = concat_cols(tape, parts);
  }
  return record_ffn(tape, u, vars, "tokenizer.phi", cfg.activation);
}

Var record_layer(Tape& tape, Var x, int layer, const ParamVars& vars, const EtConfig& cfg) {
  return record_layer_impl(tape, x, "layers." + std::to_string(layer), vars, cfg, nullptr);
}

Var record_readout(Tape& tape, Var x, const LabeledGraph& g, Readout mode, const ParamVars& vars,
                   const EtConfig& cfg) {
  const Index n = g.num_nodes();
  switch (mode) {
    case Readout::kPair:
      return x;
    case Readout::kEdge: {
      std::vector<Index> rows;
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
          if (g.has_edge(static_cast<Node>(i), static_cast<Node>(j))) rows.push_back(i * n + j);
      return gather_rows(tape, x, std::move(rows));
    }
    case Readout::kNodeDiagonal: {
      std::vector<Index> rows;
      for (Index i = 0; i < n; ++i) rows.push_back(i * n + i);
      return gather_rows(tape, x, std::move(rows));
    }
    case Readout::kNodeSum:
    case Readout::kGraphSum:
    case Readout::kGraphMean: {
      const Var first = sum_over_second(tape, record_ffn(tape, x, vars, "readout.rho1", cfg.activation));
      const Var second = sum_over_first(tape, record_ffn(tape, x, vars, "readout.rho2", cfg.activation));
      const Var nodes = add(tape, first, second);
      if (mode == Readout::kNodeSum) return nodes;
      const Var total = sum_rows(tape, nodes);
      return mode == Readout::kGraphSum ? total : scale(tape, total, 1.0 / static_cast<double>(n));
    }
  }
  throw std::invalid_argument("unknown readout mode");
}

// Inference ---------------------------------------------------------------------------------

MatrixXd tokenize(const LabeledGraph& g, const EtConfig& cfg, const EtParams& params) {
  check_compatible(cfg, params);
  Tape tape(false);
  const ParamVars vars = register_params(tape, params, false);
  return tape.value(record_tokenize(tape, g, params, vars, cfg));
}

namespace {

ParamVars register_layer(Tape& tape, const LayerParams& layer) {
  return {{"l.wq", tape.constant(layer.wq)},
          {"l.wk", tape.constant(layer.wk)},
          {"l.wv1", tape.constant(layer.wv1)},
          {"l.wv2", tape.constant(layer.wv2)},
          {"l.wo", tape.constant(layer.wo)},
          {"l.ln_gamma", tape.constant(layer.ln_gamma)},
          {"l.ln_beta", tape.constant(layer.ln_beta)},
          {"l.ffn.w1", tape.constant(layer.ffn.w1)},
          {"l.ffn.b1", tape.constant(layer.ffn.b1)},
          {"l.ffn.w2", tape.constant(layer.ffn.w2)},
          {"l.ffn.b2", tape.constant(layer.ffn.b2)}};
}

}  // namespace

MatrixXd et_layer(const MatrixXd& x, const LayerParams& layer, const EtConfig& cfg) {
  cfg.validate();
  if (x.cols() != cfg.hidden) throw ShapeError("et_layer: input width differs from hidden size");
  pair_order(x.rows());
  Tape tape(false);
  const ParamVars vars = register_layer(tape, layer);
  return tape.value(record_layer_impl(tape, tape.constant(x), "l", vars, cfg, nullptr));
}

std::vector<MatrixXd> attention_weights(const MatrixXd& x, const LayerParams& layer, const EtConfig& cfg) {
  cfg.validate();
  Tape tape(false);
  const ParamVars vars = register_layer(tape, layer);
  std::vector<Var> attn;
  record_layer_impl(tape, tape.constant(x), "l", vars, cfg, &attn);
  std::vector<MatrixXd> out;
  for (Var a : attn) out.push_back(tape.value(a));
  return out;
}

EtOutput forward(const LabeledGraph& g, const EtConfig& cfg, const EtParams& params, Readout mode) {
  check_compatible(cfg, params);
  Tape tape(false);
  const ParamVars vars = register_params(tape, params, false);
  EtOutput out;
  Var x = record_tokenize(tape, g, params, vars, cfg);
  out.states.push_back(tape.value(x));
  for (int l = 0; l < cfg.layers; ++l) {
    x = record_layer(tape, x, l, vars, cfg);
    out.states.push_back(tape.value(x));
  }
  out.readout = tape.value(record_readout(tape, x, g, mode, vars, cfg));
  return out;
}

EtOutput forward(const LabeledGraph& g, const EtConfig& cfg, const EtParams& params) {
  return forward(g, cfg, params, cfg.readout);
}

MatrixXd permute_pairs(const MatrixXd& x, std::span<const int> perm) {
  const Index n = pair_order(x.rows());
  if (static_cast<Index>(perm.size()) != n) throw ShapeError("permute_pairs: permutation size mismatch");
  MatrixXd out(x.rows(), x.cols());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out.row(perm[static_cast<std::size_t>(i)] * n + perm[static_cast<std::size_t>(j)]) = x.row(i * n + j);
  return out;
}

}  // namespace etwl
