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

#ifndef ETWL_EDGE_TRANSFORMER_HPP_
#define ETWL_EDGE_TRANSFORMER_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "etwl/graph.hpp"
#include "etwl/tape.hpp"
#include "etwl/tensor.hpp"
#include "json.hpp"

namespace etwl {

enum class Readout { kPair, kEdge, kNodeDiagonal, kNodeSum, kGraphSum, kGraphMean };

Readout parse_readout(std::string_view id);
std::string readout_id(Readout r);

struct EtConfig {
  int layers = 2;
  int hidden = 16;
  int heads = 2;
  int ffn_multiplier = 2;
  Activation activation = Activation::kGelu;
  Readout readout = Readout::kGraphSum;
  /// Number of random-walk slices appended to the edge features; 0 disables.
  int rrwp_steps = 0;
  /// Width of the learnable edge/diagonal embeddings x1, x2.
  int edge_dim = 4;
  double ln_eps = 1e-5;
  /// Accepted for config compatibility, never applied.
  double dropout = 0.0;
  std::uint64_t seed = 0;

  int head_dim() const { return hidden / heads; }
  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

nlohmann::json config_to_json(const EtConfig& cfg);
EtConfig config_from_json(const nlohmann::json& j);

/// Two affine maps with an activation in between, biases stored as 1 x k.
struct FeedForward {
  MatrixXd w1, b1, w2, b2;
};

struct LayerParams {
  MatrixXd wq, wk, wv1, wv2, wo;  // d x d; head h owns columns [h*dh, (h+1)*dh)
  MatrixXd ln_gamma, ln_beta;     // 1 x d
  FeedForward ffn;                // d -> ffn_multiplier*d -> d
};

struct TokenizerParams {
  MatrixXd x1, x2;  // 1 x edge_dim
  FeedForward phi;  // token input -> d -> d
};

/// All learnable state of an ET stack plus the input encoding it was built for.
struct EtParams {
  std::vector<Label> label_alphabet;
  int edge_feature_width = 0;
  int rrwp_steps = 0;
  TokenizerParams tokenizer;
  std::vector<LayerParams> layers;
  FeedForward rho1, rho2;

  /// Seeded symmetric-uniform initialization with bound 1/sqrt(fan_in).
  static EtParams init(const EtConfig& cfg, std::vector<Label> label_alphabet,
                       int edge_feature_width = 0);
  /// Convenience: alphabet and feature width taken from `g`.
  static EtParams init_for(const EtConfig& cfg, const LabeledGraph& g);

  int token_input_width() const;

  /// Visits every learnable matrix with its checkpoint name.
  void for_each(const std::function<void(const std::string&, MatrixXd&)>& fn);
  void for_each(const std::function<void(const std::string&, const MatrixXd&)>& fn) const;
};

/// Flat map name -> {"shape": [...], "data": [...]}.
nlohmann::json save_checkpoint(const EtParams& params);
EtParams load_checkpoint(const nlohmann::json& j);

/// Random-walk features: slices[0] = I, slices[s] = (D^-1 A)^s. Rows of
/// isolated nodes in D^-1 A are zero.
struct RrwpFeatures {
  int n = 0;
  std::vector<MatrixXd> slices;
  double at(int i, int j, int s) const { return slices[static_cast<std::size_t>(s)](i, j); }
};

RrwpFeatures rrwp(const LabeledGraph& g, int steps);

/// Raw token inputs [E_ij | F_i | F_j] with the learnable x1/x2 part left
/// out; rows follow pair order. Also returns the edge and diagonal masks.
struct TokenInputs {
  MatrixXd fixed;      // (n*n) x (edge_feature_width + rrwp_steps + 2p)
  MatrixXd edge_mask;  // (n*n) x 1
  MatrixXd diag_mask;  // (n*n) x 1
};

TokenInputs token_inputs(const LabeledGraph& g, const EtParams& params);

/// Parameters registered on a tape, by checkpoint name.
using ParamVars = std::map<std::string, Var>;

/// Registers all params as tape parameters (gradients requested) or
/// constants.
ParamVars register_params(Tape& tape, const EtParams& params, bool trainable);

Var record_tokenize(Tape& tape, const LabeledGraph& g, const EtParams& params, const ParamVars& vars,
                    const EtConfig& cfg);
Var record_layer(Tape& tape, Var x, int layer, const ParamVars& vars, const EtConfig& cfg);
Var record_readout(Tape& tape, Var x, const LabeledGraph& g, Readout mode, const ParamVars& vars,
                   const EtConfig& cfg);

/// X^(0) as an (n*n) x d pair tensor.
MatrixXd tokenize(const LabeledGraph& g, const EtConfig& cfg, const EtParams& params);

/// One layer: FFN(X + W^O concat_h TriAttention_h(LN(X))).
MatrixXd et_layer(const MatrixXd& x, const LayerParams& layer, const EtConfig& cfg);

/// Per-head attention weights of one layer, each (n*n) x n (see tensor.hpp).
std::vector<MatrixXd> attention_weights(const MatrixXd& x, const LayerParams& layer, const EtConfig& cfg);

struct EtOutput {
  /// states[t] = X^(t) for t = 0..L.
  std::vector<MatrixXd> states;
  MatrixXd readout;
};

EtOutput forward(const LabeledGraph& g, const EtConfig& cfg, const EtParams& params);
EtOutput forward(const LabeledGraph& g, const EtConfig& cfg, const EtParams& params, Readout mode);

/// Maps a pair tensor of g to the pair tensor of g.permuted(perm).
MatrixXd permute_pairs(const MatrixXd& x, std::span<const int> perm);

}  // namespace etwl

#endif  // ETWL_EDGE_TRANSFORMER_HPP_
