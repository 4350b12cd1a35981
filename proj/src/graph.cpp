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

#include "etwl/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace etwl {

using nlohmann::json;

LabeledGraph::LabeledGraph(int n, std::vector<std::pair<Node, Node>> edges,
                           std::vector<Label> labels, EdgeFeatureMap edge_features)
    : n_(n), labels_(std::move(labels)), edge_features_(std::move(edge_features)) {
  if (n < 0) throw GraphFormatError("node count must be non-negative");
  const auto un = static_cast<std::size_t>(n);
  if (labels_.empty()) labels_.assign(un, 0);
  if (labels_.size() != un) {
    throw GraphFormatError("expected " + std::to_string(n) + " labels, got " +
                           std::to_string(labels_.size()));
  }
  for (Label l : labels_) {
    if (l < 0) throw GraphFormatError("node labels must be natural numbers");
  }

  adjacency_.assign(un * un, 0);
  neighbors_.assign(un, {});
  std::set<std::pair<Node, Node>> unique;
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw GraphFormatError("edge endpoint out of range: [" + std::to_string(u) + "," +
                             std::to_string(v) + "] with n=" + std::to_string(n));
    }
    if (u == v) throw GraphFormatError("self-loop at node " + std::to_string(u));
    unique.emplace(std::min(u, v), std::max(u, v));
  }
  edges_.assign(unique.begin(), unique.end());
  for (auto [u, v] : edges_) {
    adjacency_[static_cast<std::size_t>(u) * un + static_cast<std::size_t>(v)] = 1;
    adjacency_[static_cast<std::size_t>(v) * un + static_cast<std::size_t>(u)] = 1;
    neighbors_[static_cast<std::size_t>(u)].push_back(v);
    neighbors_[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());

  bool first = true;
  for (const auto& [key, feat] : edge_features_) {
    auto [i, j] = key;
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw GraphFormatError("edge feature key out of range: " + std::to_string(i) + "," +
                             std::to_string(j));
    }
    if (feat.empty()) throw GraphFormatError("edge feature vectors must be non-empty");
    if (first) {
      feature_width_ = static_cast<int>(feat.size());
      first = false;
    } else if (static_cast<int>(feat.size()) != feature_width_) {
      throw GraphFormatError("inconsistent edge-feature widths: " + std::to_string(feature_width_) +
                             " vs " + std::to_string(feat.size()));
    }
  }
}

std::optional<std::span<const double>> LabeledGraph::edge_feature(Node i, Node j) const {
  auto it = edge_features_.find({i, j});
  if (it == edge_features_.end()) return std::nullopt;
  return std::span<const double>(it->second);
}

std::vector<Label> LabeledGraph::label_alphabet() const {
  std::vector<Label> out(labels_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

LabeledGraph LabeledGraph::permuted(std::span<const int> perm) const {
  if (static_cast<int>(perm.size()) != n_) throw std::invalid_argument("permutation size mismatch");
  std::vector<std::pair<Node, Node>> edges;
  edges.reserve(edges_.size());
  for (auto [u, v] : edges_) edges.emplace_back(perm[static_cast<std::size_t>(u)], perm[static_cast<std::size_t>(v)]);
  std::vector<Label> labels(labels_.size());
  for (int v = 0; v < n_; ++v) labels[static_cast<std::size_t>(perm[static_cast<std::size_t>(v)])] = labels_[static_cast<std::size_t>(v)];
  EdgeFeatureMap feats;
  for (const auto& [key, f] : edge_features_) {
    feats[{perm[static_cast<std::size_t>(key.first)], perm[static_cast<std::size_t>(key.second)]}] = f;
  }
  return LabeledGraph(n_, std::move(edges), std::move(labels), std::move(feats));
}

AtomicType atomic_type(const LabeledGraph& g, std::span<const Node> tuple) {
  const int k = static_cast<int>(tuple.size());
  if (k < 1) throw std::invalid_argument("atomic_type: tuple must be non-empty");
  for (Node v : tuple) {
    if (v < 0 || v >= g.num_nodes()) throw std::invalid_argument("atomic_type: node out of range");
  }
  AtomicType t;
  t.k = k;
  t.matrix.resize(static_cast<std::size_t>(k * k));
  t.labels.reserve(static_cast<std::size_t>(k));
  const bool with_features = g.edge_feature_width() > 0;
  if (with_features) t.features.resize(static_cast<std::size_t>(k * k));
  for (int a = 0; a < k; ++a) {
    t.labels.push_back(g.label(tuple[static_cast<std::size_t>(a)]));
    for (int b = 0; b < k; ++b) {
      const Node u = tuple[static_cast<std::size_t>(a)];
      const Node v = tuple[static_cast<std::size_t>(b)];
      PairRelation r = PairRelation::kNeither;
      if (u == v) {
        r = PairRelation::kEqual;
      } else if (g.has_edge(u, v)) {
        r = PairRelation::kEdge;
      }
      t.matrix[static_cast<std::size_t>(a * k + b)] = r;
      if (with_features) {
        if (auto f = g.edge_feature(u, v)) {
          t.features[static_cast<std::size_t>(a * k + b)].assign(f->begin(), f->end());
        }
      }
    }
  }
  return t;
}

// JSON -----------------------------------------------------------------------

namespace {

std::pair<Node, Node> parse_pair_key(const std::string& key) {
  const auto comma = key.find(',');
  if (comma == std::string::npos) {
    throw GraphFormatError("edge feature key '" + key + "' is not of the form \"i,j\"");
  }
  auto parse_int = [&](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw GraphFormatError("edge feature key '" + key + "' is not of the form \"i,j\"");
    }
    return value;
  };
  std::string_view sv(key);
  return {parse_int(sv.substr(0, comma)), parse_int(sv.substr(comma + 1))};
}

json parse_json_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Report line and column of the offending byte.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << "malformed JSON at line " << line << ", column " << col << ": " << e.what();
    throw GraphFormatError(msg.str());
  }
}

}  // namespace

LabeledGraph graph_from_json(const json& j) {
  if (!j.is_object()) throw GraphFormatError("graph must be a JSON object");
  try {
    if (!j.contains("n")) throw GraphFormatError("graph is missing \"n\"");
    const int n = j.at("n").get<int>();
    std::vector<std::pair<Node, Node>> edges;
    if (j.contains("edges")) {
      for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw GraphFormatError("each edge must be a pair [u,v]");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
      }
    }
    std::vector<Label> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<Label>>();
    LabeledGraph::EdgeFeatureMap feats;
    if (j.contains("edge_features") && !j.at("edge_features").is_null()) {
      for (const auto& [key, value] : j.at("edge_features").items()) {
        feats[parse_pair_key(key)] = value.get<std::vector<double>>();
      }
    }
    return LabeledGraph(n, std::move(edges), std::move(labels), std::move(feats));
  } catch (const json::exception& e) {
    throw GraphFormatError(std::string("invalid graph: ") + e.what());
  }
}

json graph_to_json(const LabeledGraph& g) {
  json j;
  j["n"] = g.num_nodes();
  json edges = json::array();
  for (auto [u, v] : g.edges()) edges.push_back({u, v});
  j["edges"] = std::move(edges);
  j["labels"] = g.labels();
  if (!g.edge_features().empty()) {
    json feats = json::object();
    for (const auto& [key, f] : g.edge_features()) {
      feats[std::to_string(key.first) + "," + std::to_string(key.second)] = f;
    }
    j["edge_features"] = std::move(feats);
  }
  return j;
}

LabeledGraph parse_graph(std::string_view text) { return graph_from_json(parse_json_text(text)); }

GraphPair parse_pair(std::string_view text) {
  const json j = parse_json_text(text);
  if (!j.is_object() || !j.contains("g") || !j.contains("h")) {
    throw GraphFormatError("pair file must contain \"g\" and \"h\"");
  }
  GraphPair p;
  p.name = j.value("name", std::string("pair"));
  p.g = graph_from_json(j.at("g"));
  p.h = graph_from_json(j.at("h"));
  if (p.g.num_nodes() != p.h.num_nodes()) {
    throw GraphFormatError("pair '" + p.name + "' has graphs of different order");
  }
  return p;
}

json pair_to_json(const GraphPair& p) {
  json j;
  j["name"] = p.name;
  j["g"] = graph_to_json(p.g);
  j["h"] = graph_to_json(p.h);
  return j;
}

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GraphFormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

LabeledGraph load_graph_file(const std::string& path) {
  try {
    return parse_graph(slurp(path));
  } catch (const GraphFormatError& e) {
    throw GraphFormatError(path + ": " + e.what());
  }
}

GraphPair load_pair_file(const std::string& path) {
  try {
    return parse_pair(slurp(path));
  } catch (const GraphFormatError& e) {
    throw GraphFormatError(path + ": " + e.what());
  }
}

// Isomorphism ------------------------------------------------------------------

namespace {

bool same_feature(std::optional<std::span<const double>> a, std::optional<std::span<const double>> b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || std::ranges::equal(*a, *b);
}

struct IsoSearch {
  const LabeledGraph& g;
  const LabeledGraph& h;
  std::vector<int> map;   // g node -> h node
  std::vector<char> used;

  bool extend(int v) {
    const int n = g.num_nodes();
    if (v == n) return true;
    for (int w = 0; w < n; ++w) {
      if (used[static_cast<std::size_t>(w)] || g.label(v) != h.label(w) || g.degree(v) != h.degree(w)) continue;
      bool ok = true;
      for (int u = 0; u < v && ok; ++u) {
        const int mu = map[static_cast<std::size_t>(u)];
        ok = g.has_edge(u, v) == h.has_edge(mu, w);
        if (ok && g.edge_feature_width() > 0) {
          ok = same_feature(g.edge_feature(u, v), h.edge_feature(mu, w)) &&
               same_feature(g.edge_feature(v, u), h.edge_feature(w, mu));
        }
      }
      if (!ok) continue;
      map[static_cast<std::size_t>(v)] = w;
      used[static_cast<std::size_t>(w)] = 1;
      if (extend(v + 1)) return true;
      used[static_cast<std::size_t>(w)] = 0;
    }
    return false;
  }
};

}  // namespace

bool brute_force_isomorphic(const LabeledGraph& g, const LabeledGraph& h) {
  if (g.num_nodes() > kBruteForceMaxNodes || h.num_nodes() > kBruteForceMaxNodes) {
    throw std::invalid_argument("brute_force_isomorphic: graphs are capped at " +
                                std::to_string(kBruteForceMaxNodes) + " nodes");
  }
  if (g.num_nodes() != h.num_nodes() || g.num_edges() != h.num_edges()) return false;
  if (g.edge_feature_width() != h.edge_feature_width()) return false;
  auto lg = g.labels(), lh = h.labels();
  std::sort(lg.begin(), lg.end());
  std::sort(lh.begin(), lh.end());
  if (lg != lh) return false;
  IsoSearch search{g, h, std::vector<int>(static_cast<std::size_t>(g.num_nodes()), -1),
                   std::vector<char>(static_cast<std::size_t>(g.num_nodes()), 0)};
  return search.extend(0);
}

std::string to_string(Expectation e) {
  switch (e) {
    case Expectation::kDistinguishable: return "distinguishable";
    case Expectation::kIndistinguishable: return "indistinguishable";
    case Expectation::kUnknown: return "unknown";
  }
  return "unknown";
}

}  // namespace etwl
