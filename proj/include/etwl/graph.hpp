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

#ifndef ETWL_GRAPH_HPP_
#define ETWL_GRAPH_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace etwl {

using Label = std::int64_t;
using Node = int;

/// Raised for malformed graph files and invalid graph construction.
class GraphFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Node-labeled simple undirected graph with optional ordered-pair features.
///
/// Topology is stored as unordered pairs (u < v) and queried as ordered
/// pairs. Edge features live on ordered pairs (i, j) and share one width.
/// Instances are immutable after construction.
class LabeledGraph {
 public:
  using EdgeFeatureMap = std::map<std::pair<Node, Node>, std::vector<double>>;

  LabeledGraph() = default;
  LabeledGraph(int n, std::vector<std::pair<Node, Node>> edges,
               std::vector<Label> labels = {}, EdgeFeatureMap edge_features = {});

  int num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }

  /// Edges as sorted unordered pairs with first < second.
  const std::vector<std::pair<Node, Node>>& edges() const { return edges_; }
  const std::vector<Label>& labels() const { return labels_; }
  Label label(Node v) const { return labels_[static_cast<std::size_t>(v)]; }

  bool has_edge(Node i, Node j) const {
    return adjacency_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
                      static_cast<std::size_t>(j)] != 0;
  }
  int degree(Node v) const { return static_cast<int>(neighbors_[static_cast<std::size_t>(v)].size()); }
  const std::vector<Node>& neighbors(Node v) const { return neighbors_[static_cast<std::size_t>(v)]; }

  /// Width of the ordered-pair feature vectors, 0 when the graph has none.
  int edge_feature_width() const { return feature_width_; }
  const EdgeFeatureMap& edge_features() const { return edge_features_; }
  std::optional<std::span<const double>> edge_feature(Node i, Node j) const;

  /// Sorted distinct node labels.
  std::vector<Label> label_alphabet() const;

  /// Relabels nodes: node v of this graph becomes node perm[v].
  LabeledGraph permuted(std::span<const int> perm) const;

  friend bool operator==(const LabeledGraph& a, const LabeledGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_ && a.labels_ == b.labels_ &&
           a.edge_features_ == b.edge_features_;
  }

 private:
  int n_ = 0;
  std::vector<std::pair<Node, Node>> edges_;
  std::vector<Label> labels_;
  EdgeFeatureMap edge_features_;
  int feature_width_ = 0;
  std::vector<char> adjacency_;
  std::vector<std::vector<Node>> neighbors_;
};

/// Entry codes of an atomic-type matrix.
enum class PairRelation : std::uint8_t { kEdge = 1, kEqual = 2, kNeither = 3 };

/// Isomorphism type of an ordered k-tuple together with its node labels.
///
/// `features` holds, row-major over (a, b), the ordered-pair feature of
/// (tuple[a], tuple[b]); it is empty for graphs without edge features and
/// an absent pair contributes an empty vector.
struct AtomicType {
  int k = 0;
  std::vector<PairRelation> matrix;
  std::vector<Label> labels;
  std::vector<std::vector<double>> features;

  PairRelation at(int a, int b) const { return matrix[static_cast<std::size_t>(a * k + b)]; }
  friend bool operator==(const AtomicType&, const AtomicType&) = default;
  friend auto operator<=>(const AtomicType&, const AtomicType&) = default;
};

AtomicType atomic_type(const LabeledGraph& g, std::span<const Node> tuple);

/// Verdict a WL variant is expected to return on a pair.
enum class Expectation { kDistinguishable, kIndistinguishable, kUnknown };

struct GraphPair {
  std::string name;
  LabeledGraph g;
  LabeledGraph h;
  /// Keyed by method id ("wl1", "wl2", "fwl2", "wl3").
  std::map<std::string, Expectation> expected;
};

// JSON I/O --------------------------------------------------------------

LabeledGraph parse_graph(std::string_view text);
GraphPair parse_pair(std::string_view text);
LabeledGraph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const LabeledGraph& g);
nlohmann::json pair_to_json(const GraphPair& p);
LabeledGraph load_graph_file(const std::string& path);
GraphPair load_pair_file(const std::string& path);

// Isomorphism -----------------------------------------------------------

inline constexpr int kBruteForceMaxNodes = 10;

/// Exhaustive label- and edge-preserving bijection search. Throws
/// std::invalid_argument when either graph exceeds kBruteForceMaxNodes.
bool brute_force_isomorphic(const LabeledGraph& g, const LabeledGraph& h);

// Generators ------------------------------------------------------------

namespace graphs {

LabeledGraph path(int n);
LabeledGraph cycle(int n);
LabeledGraph complete(int n);
LabeledGraph star(int leaves);
LabeledGraph disjoint_union(const LabeledGraph& a, const LabeledGraph& b);
/// Rook's graph on a k x k board (K_k box K_k).
LabeledGraph rook(int k);
/// Shrikhande graph, the Cayley graph of Z4 x Z4 with connection set
/// {±(1,0), ±(0,1), ±(1,1)}.
LabeledGraph shrikhande();
LabeledGraph hypercube(int dim);
/// Wagner graph: C8 plus the four long diagonals.
LabeledGraph wagner();
LabeledGraph decalin();
LabeledGraph bicyclopentyl();
/// Cai-Fürer-Immerman graph over `base`; `twisted` flips the connection of
/// the base's first edge.
LabeledGraph cfi(const LabeledGraph& base, bool twisted);

}  // namespace graphs

/// Curated non-isomorphic pairs with frozen expected verdicts.
std::vector<GraphPair> builtin_pairs();

/// Small named graphs used as fixtures across the test suites.
std::vector<std::pair<std::string, LabeledGraph>> builtin_graphs();

std::string to_string(Expectation e);

}  // namespace etwl

#endif  // ETWL_GRAPH_HPP_
