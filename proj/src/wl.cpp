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

#include "etwl/wl.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_map>

namespace etwl {

WlMethod parse_method(std::string_view id) {
  if (id == "wl1") return WlMethod::kWl1;
  if (id == "wl2") return WlMethod::kWl2;
  if (id == "fwl2") return WlMethod::kFwl2;
  if (id == "wl3") return WlMethod::kWl3;
  throw std::invalid_argument("unknown WL method '" + std::string(id) +
                              "' (expected wl1, wl2, fwl2 or wl3)");
}

std::string method_id(WlMethod m) {
  switch (m) {
    case WlMethod::kWl1: return "wl1";
    case WlMethod::kWl2: return "wl2";
    case WlMethod::kFwl2: return "fwl2";
    case WlMethod::kWl3: return "wl3";
  }
  return "?";
}

int method_arity(WlMethod m) {
  switch (m) {
    case WlMethod::kWl1: return 1;
    case WlMethod::kWl2:
    case WlMethod::kFwl2: return 2;
    case WlMethod::kWl3: return 3;
  }
  return 1;
}

ColorId RecolorTable::lookup_or_insert(const Key& key) {
  auto [it, inserted] = ids_.try_emplace(key, static_cast<ColorId>(keys_.size()));
  if (inserted) keys_.push_back(key);
  return it->second;
}

std::optional<ColorId> RecolorTable::find(const Key& key) const {
  auto it = ids_.find(key);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

// Coloring ------------------------------------------------------------------

std::vector<Node> Coloring::tuple(std::size_t r) const {
  std::vector<Node> t(static_cast<std::size_t>(k));
  for (int p = k - 1; p >= 0; --p) {
    t[static_cast<std::size_t>(p)] = static_cast<Node>(r % static_cast<std::size_t>(n));
    r /= static_cast<std::size_t>(n);
  }
  return t;
}

std::size_t Coloring::rank(std::span<const Node> t) const {
  std::size_t r = 0;
  for (Node v : t) r = r * static_cast<std::size_t>(n) + static_cast<std::size_t>(v);
  return r;
}

std::size_t Coloring::num_classes() const { return histogram().size(); }

std::map<ColorId, std::size_t> Coloring::histogram() const {
  std::map<ColorId, std::size_t> h;
  for (ColorId c : colors) ++h[c];
  return h;
}

std::vector<std::vector<std::size_t>> Coloring::classes() const {
  std::unordered_map<ColorId, std::size_t> slot;
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t r = 0; r < colors.size(); ++r) {
    auto [it, inserted] = slot.try_emplace(colors[r], out.size());
    if (inserted) out.emplace_back();
    out[it->second].push_back(r);
  }
  return out;
}

bool refines(std::span<const ColorId> fine, std::span<const ColorId> coarse) {
  if (fine.size() != coarse.size()) return false;
  std::unordered_map<ColorId, ColorId> image;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    auto [it, inserted] = image.try_emplace(fine[i], coarse[i]);
    if (!inserted && it->second != coarse[i]) return false;
  }
  return true;
}

bool same_partition(std::span<const ColorId> a, std::span<const ColorId> b) {
  return refines(a, b) && refines(b, a);
}

// Refinement engine -----------------------------------------------------------

namespace {

using Key = RecolorTable::Key;

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

void append_atomic_type(Key& key, const AtomicType& t) {
  for (PairRelation r : t.matrix) key.push_back(static_cast<std::uint64_t>(r));
  for (Label l : t.labels) key.push_back(static_cast<std::uint64_t>(l));
  for (const auto& f : t.features) {
    key.push_back(f.size());
    for (double x : f) key.push_back(std::bit_cast<std::uint64_t>(x));
  }
}

/// One graph being refined: arity, order, and its current colors.
struct Track {
  const LabeledGraph* graph;
  int k;
  int n;
  std::vector<ColorId> colors;
  std::vector<std::vector<ColorId>> history;
};

void initial_colors(Track& tr, RecolorTable& table) {
  const std::size_t count = ipow(static_cast<std::size_t>(tr.n), tr.k);
  tr.colors.resize(count);
  std::vector<Node> t(static_cast<std::size_t>(tr.k));
  for (std::size_t r = 0; r < count; ++r) {
    std::size_t rem = r;
    for (int p = tr.k - 1; p >= 0; --p) {
      t[static_cast<std::size_t>(p)] = static_cast<Node>(rem % static_cast<std::size_t>(tr.n));
      rem /= static_cast<std::size_t>(tr.n);
    }
    Key key{0};
    append_atomic_type(key, atomic_type(*tr.graph, t));
    tr.colors[r] = table.lookup_or_insert(key);
  }
  tr.history.push_back(tr.colors);
}

void refine_round(WlMethod method, Track& tr, RecolorTable& table, int round) {
  const int n = tr.n;
  const auto un = static_cast<std::size_t>(n);
  const std::vector<ColorId>& prev = tr.colors;
  std::vector<ColorId> next(prev.size());
  Key key;
  std::vector<std::uint64_t> scratch;

  switch (method) {
    case WlMethod::kWl1:
      for (int v = 0; v < n; ++v) {
        key.assign({static_cast<std::uint64_t>(round), prev[static_cast<std::size_t>(v)]});
        scratch.clear();
        for (Node u : tr.graph->neighbors(v)) scratch.push_back(prev[static_cast<std::size_t>(u)]);
        std::sort(scratch.begin(), scratch.end());
        key.insert(key.end(), scratch.begin(), scratch.end());
        next[static_cast<std::size_t>(v)] = table.lookup_or_insert(key);
      }
      break;

    case WlMethod::kFwl2:
      for (std::size_t i = 0; i < un; ++i) {
        for (std::size_t j = 0; j < un; ++j) {
          key.assign({static_cast<std::uint64_t>(round), prev[i * un + j]});
          scratch.clear();
          for (std::size_t l = 0; l < un; ++l) {
            scratch.push_back((static_cast<std::uint64_t>(prev[i * un + l]) << 32) | prev[l * un + j]);
          }
          std::sort(scratch.begin(), scratch.end());
          key.insert(key.end(), scratch.begin(), scratch.end());
          next[i * un + j] = table.lookup_or_insert(key);
        }
      }
      break;

    case WlMethod::kWl2:
    case WlMethod::kWl3: {
      const int k = tr.k;
      std::vector<std::size_t> stride(static_cast<std::size_t>(k));
      for (int p = 0; p < k; ++p) stride[static_cast<std::size_t>(p)] = ipow(un, k - 1 - p);
      for (std::size_t r = 0; r < prev.size(); ++r) {
        key.assign({static_cast<std::uint64_t>(round), prev[r]});
        for (int p = 0; p < k; ++p) {
          const std::size_t s = stride[static_cast<std::size_t>(p)];
          const std::size_t base = r - ((r / s) % un) * s;  // position p zeroed
          scratch.clear();
          for (std::size_t w = 0; w < un; ++w) scratch.push_back(prev[base + w * s]);
          std::sort(scratch.begin(), scratch.end());
          key.insert(key.end(), scratch.begin(), scratch.end());
        }
        next[r] = table.lookup_or_insert(key);
      }
      break;
    }
  }
  tr.colors = std::move(next);
  tr.history.push_back(tr.colors);
}

std::size_t joint_classes(const std::vector<Track>& tracks) {
  std::vector<ColorId> all;
  for (const auto& tr : tracks) all.insert(all.end(), tr.colors.begin(), tr.colors.end());
  std::sort(all.begin(), all.end());
  return static_cast<std::size_t>(std::unique(all.begin(), all.end()) - all.begin());
}

std::map<ColorId, std::size_t> histogram_of(const std::vector<ColorId>& colors) {
  std::map<ColorId, std::size_t> h;
  for (ColorId c : colors) ++h[c];
  return h;
}

/// Refines all tracks in lockstep with one shared table until the joint
/// partition stops changing or max_rounds is reached. Since each round
/// refines the previous partition, an unchanged class count means an
/// unchanged partition.
std::vector<Coloring> refine(WlMethod method, std::vector<const LabeledGraph*> graphs,
                             const WlOptions& opts, int* first_difference) {
  const int k = method_arity(method);
  int max_n = 0;
  for (auto* g : graphs) max_n = std::max(max_n, g->num_nodes());
  if (k >= 2) {
    double count = 1.0;
    for (int p = 0; p < k; ++p) count *= static_cast<double>(max_n);
    if (count > static_cast<double>(opts.tuple_budget)) {
      throw BudgetError(method_id(method) + ": n^k = " + std::to_string(static_cast<long long>(count)) +
                        " exceeds the tuple budget of " + std::to_string(opts.tuple_budget));
    }
  }
  const int max_rounds = opts.max_rounds.value_or(static_cast<int>(
      std::min<std::size_t>(ipow(static_cast<std::size_t>(std::max(max_n, 1)), k), 1u << 20)));

  RecolorTable table;
  std::vector<Track> tracks;
  for (auto* g : graphs) tracks.push_back(Track{g, k, g->num_nodes(), {}, {}});
  for (auto& tr : tracks) initial_colors(tr, table);

  auto differs = [&] {
    return tracks.size() == 2 && histogram_of(tracks[0].colors) != histogram_of(tracks[1].colors);
  };
  if (first_difference) *first_difference = differs() ? 0 : -1;

  std::size_t classes = joint_classes(tracks);
  int round = 0;
  bool stable = false;
  while (round < max_rounds) {
    ++round;
    for (auto& tr : tracks) refine_round(method, tr, table, round);
    if (first_difference && *first_difference < 0 && differs()) *first_difference = round;
    const std::size_t now = joint_classes(tracks);
    if (now == classes) {
      stable = true;
      break;
    }
    classes = now;
  }

  std::vector<Coloring> out;
  for (auto& tr : tracks) {
    Coloring c;
    c.k = k;
    c.n = tr.n;
    c.round = round;
    c.stable = stable;
    c.colors = std::move(tr.colors);
    c.history = std::move(tr.history);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

Coloring run_wl(WlMethod method, const LabeledGraph& g, const WlOptions& opts) {
  return std::move(refine(method, {&g}, opts, nullptr).front());
}

Coloring wl1(const LabeledGraph& g, std::optional<int> max_rounds) {
  return run_wl(WlMethod::kWl1, g, WlOptions{max_rounds});
}

Coloring fwl2(const LabeledGraph& g, std::optional<int> max_rounds) {
  return run_wl(WlMethod::kFwl2, g, WlOptions{max_rounds});
}

Coloring kwl(const LabeledGraph& g, int k, std::optional<int> max_rounds, std::size_t tuple_budget) {
  if (k != 2 && k != 3) throw std::invalid_argument("kwl: k must be 2 or 3");
  return run_wl(k == 2 ? WlMethod::kWl2 : WlMethod::kWl3, g, WlOptions{max_rounds, tuple_budget});
}

ParallelRun run_parallel(WlMethod method, const LabeledGraph& g, const LabeledGraph& h,
                         const WlOptions& opts) {
  int first = -1;
  auto colorings = refine(method, {&g, &h}, opts, &first);
  ParallelRun out;
  out.g = std::move(colorings[0]);
  out.h = std::move(colorings[1]);
  out.first_difference = first;
  out.distinguished = out.g.histogram() != out.h.histogram();
  return out;
}

bool distinguishes(WlMethod method, const GraphPair& pair, const WlOptions& opts) {
  if (pair.g.num_nodes() != pair.h.num_nodes()) {
    throw std::invalid_argument("distinguishes: pair '" + pair.name + "' has graphs of different order");
  }
  return run_parallel(method, pair.g, pair.h, opts).distinguished;
}

nlohmann::json coloring_to_json(const Coloring& c) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& cls : c.classes()) {
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t r : cls) members.push_back(c.tuple(r));
    classes.push_back(std::move(members));
  }
  return {{"k", c.k}, {"round", c.round}, {"classes", std::move(classes)}};
}

}  // namespace etwl
