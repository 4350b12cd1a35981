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

#ifndef ETWL_WL_HPP_
#define ETWL_WL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "etwl/graph.hpp"
#include "json.hpp"

namespace etwl {

using ColorId = std::uint32_t;

enum class WlMethod { kWl1, kWl2, kFwl2, kWl3 };

/// Accepts "wl1", "wl2", "fwl2", "wl3"; throws std::invalid_argument otherwise.
WlMethod parse_method(std::string_view id);
std::string method_id(WlMethod m);
int method_arity(WlMethod m);

/// Thrown when n^k exceeds the tuple budget of a k-WL run.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultTupleBudget = 1'000'000;

/// Injective, invertible map between structured keys and color ids.
///
/// Keys are stored in full, so decode(lookup_or_insert(k)) == k always.
class RecolorTable {
 public:
  using Key = std::vector<std::uint64_t>;

  ColorId lookup_or_insert(const Key& key);
  std::optional<ColorId> find(const Key& key) const;
  const Key& decode(ColorId id) const { return keys_.at(id); }
  std::size_t size() const { return keys_.size(); }

 private:
  std::map<Key, ColorId> ids_;
  std::vector<Key> keys_;
};

/// Colors of all k-tuples of one graph, indexed by lexicographic tuple rank
/// (tuple (v_0..v_{k-1}) has rank sum v_p n^{k-1-p}).
struct Coloring {
  int k = 1;
  int n = 0;
  /// Iteration index of `colors`.
  int round = 0;
  /// True when the partition at `round` equals the one at `round - 1`.
  bool stable = false;
  std::vector<ColorId> colors;
  /// history[t] holds the colors after iteration t, for t = 0..round.
  std::vector<std::vector<ColorId>> history;

  std::size_t num_tuples() const { return colors.size(); }
  std::vector<Node> tuple(std::size_t rank) const;
  std::size_t rank(std::span<const Node> tuple) const;
  ColorId color(std::span<const Node> tuple) const { return colors[rank(tuple)]; }
  ColorId color(Node i, Node j) const { return colors[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)]; }

  std::size_t num_classes() const;
  std::map<ColorId, std::size_t> histogram() const;
  /// Tuple ranks grouped by color, classes ordered by first occurrence.
  std::vector<std::vector<std::size_t>> classes() const;
};

struct WlOptions {
  /// Defaults to n^k, an upper bound on the number of refining rounds.
  std::optional<int> max_rounds;
  std::size_t tuple_budget = kDefaultTupleBudget;
};

Coloring wl1(const LabeledGraph& g, std::optional<int> max_rounds = std::nullopt);
Coloring fwl2(const LabeledGraph& g, std::optional<int> max_rounds = std::nullopt);
/// Oblivious k-WL for k in {2, 3}.
Coloring kwl(const LabeledGraph& g, int k, std::optional<int> max_rounds = std::nullopt,
             std::size_t tuple_budget = kDefaultTupleBudget);
Coloring run_wl(WlMethod method, const LabeledGraph& g, const WlOptions& opts = {});

/// Result of running one method on two graphs with a shared recolor table.
struct ParallelRun {
  Coloring g;
  Coloring h;
  bool distinguished = false;
  /// First iteration at which the histograms differed, -1 if never.
  int first_difference = -1;
};

ParallelRun run_parallel(WlMethod method, const LabeledGraph& g, const LabeledGraph& h,
                         const WlOptions& opts = {});

/// True iff the stable color histograms of the pair differ.
bool distinguishes(WlMethod method, const GraphPair& pair, const WlOptions& opts = {});

/// Both colorings induce the same partition of the tuple set.
bool same_partition(std::span<const ColorId> a, std::span<const ColorId> b);
/// Every class of `fine` lies inside a class of `coarse`.
bool refines(std::span<const ColorId> fine, std::span<const ColorId> coarse);

/// {"k":int,"round":int,"classes":[[tuple,...],...]}
nlohmann::json coloring_to_json(const Coloring& c);

}  // namespace etwl

#endif  // ETWL_WL_HPP_
