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

// JSON round trips for EtConfig and EtParams.

#include <stdexcept>

#include "etwl/edge_transformer.hpp"

namespace etwl {

namespace {

std::string activation_id(Activation a) { return a == Activation::kRelu ? "relu" : "gelu"; }

Activation parse_activation(const std::string& id) {
  if (id == "gelu") return Activation::kGelu;
  if (id == "relu") return Activation::kRelu;
  throw std::invalid_argument("unknown activation '" + id + "'");
}

nlohmann::json matrix_entry(const MatrixXd& m) {
  std::vector<double> data(m.data(), m.data() + m.size());
  return {{"shape", {m.rows(), m.cols()}}, {"data", data}};
}

MatrixXd matrix_from(const nlohmann::json& entry, const std::string& name) {
  const auto& shape = entry.at("shape");
  const auto& data = entry.at("data");
  if (shape.size() != 2) throw std::invalid_argument("checkpoint: '" + name + "' must be 2-D");
  const Index rows = shape[0].get<Index>();
  const Index cols = shape[1].get<Index>();
  if (rows < 0 || cols < 0 || static_cast<Index>(data.size()) != rows * cols) {
    throw std::invalid_argument("checkpoint: '" + name + "' data length does not match its shape");
  }
  MatrixXd m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = data[static_cast<std::size_t>(i)].get<double>();
  return m;
}

}  // namespace

nlohmann::json config_to_json(const EtConfig& cfg) {
  return {{"layers", cfg.layers},
          {"hidden", cfg.hidden},
          {"heads", cfg.heads},
          {"ffn_multiplier", cfg.ffn_multiplier},
          {"activation", activation_id(cfg.activation)},
          {"readout", readout_id(cfg.readout)},
          {"rrwp_steps", cfg.rrwp_steps},
          {"edge_dim", cfg.edge_dim},
          {"ln_eps", cfg.ln_eps},
          {"dropout", cfg.dropout},
          {"seed", cfg.seed}};
}

EtConfig config_from_json(const nlohmann::json& j) {
  EtConfig cfg;
  cfg.layers = j.value("layers", cfg.layers);
  cfg.hidden = j.value("hidden", cfg.hidden);
  cfg.heads = j.value("heads", cfg.heads);
  cfg.ffn_multiplier = j.value("ffn_multiplier", cfg.ffn_multiplier);
  cfg.activation = parse_activation(j.value("activation", activation_id(cfg.activation)));
  cfg.readout = parse_readout(j.value("readout", readout_id(cfg.readout)));
  cfg.rrwp_steps = j.value("rrwp_steps", cfg.rrwp_steps);
  cfg.edge_dim = j.value("edge_dim", cfg.edge_dim);
  cfg.ln_eps = j.value("ln_eps", cfg.ln_eps);
  cfg.dropout = j.value("dropout", cfg.dropout);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.validate();
  return cfg;
}

nlohmann::json save_checkpoint(const EtParams& params) {
  nlohmann::json out = nlohmann::json::object();
  params.for_each([&](const std::string& name, const MatrixXd& m) { out[name] = matrix_entry(m); });
  MatrixXd alphabet(1, static_cast<Index>(params.label_alphabet.size()));
  for (std::size_t i = 0; i < params.label_alphabet.size(); ++i) {
    alphabet(0, static_cast<Index>(i)) = static_cast<double>(params.label_alphabet[i]);
  }
  out["meta.label_alphabet"] = matrix_entry(alphabet);
  out["meta.edge_feature_width"] = matrix_entry(MatrixXd::Constant(1, 1, params.edge_feature_width));
  out["meta.rrwp_steps"] = matrix_entry(MatrixXd::Constant(1, 1, params.rrwp_steps));
  return out;
}

EtParams load_checkpoint(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("checkpoint: expected a JSON object");
  EtParams p;
  const MatrixXd alphabet = matrix_from(j.at("meta.label_alphabet"), "meta.label_alphabet");
  for (Index i = 0; i < alphabet.size(); ++i) p.label_alphabet.push_back(static_cast<Label>(alphabet.data()[i]));
  p.edge_feature_width = static_cast<int>(matrix_from(j.at("meta.edge_feature_width"), "meta").value());
  p.rrwp_steps = static_cast<int>(matrix_from(j.at("meta.rrwp_steps"), "meta").value());

  // Layer count is implied by the names present.
  int layers = 0;
  while (j.contains("layers." + std::to_string(layers) + ".wq")) ++layers;
  p.layers.resize(static_cast<std::size_t>(layers));

  p.for_each([&](const std::string& name, MatrixXd& m) {
    if (!j.contains(name)) throw std::invalid_argument("checkpoint: missing '" + name + "'");
    m = matrix_from(j.at(name), name);
  });
  return p;
}

}  // namespace etwl
