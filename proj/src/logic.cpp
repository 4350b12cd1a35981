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

#include "etwl/logic.hpp"

#include <map>
#include <stdexcept>

#include "etwl/wl.hpp"

namespace etwl {

std::vector<std::pair<int, int>> Relation::pairs() const {
  std::vector<std::pair<int, int>> out;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (at(x, y)) out.emplace_back(x, y);
  return out;
}

Relation compose_relations(const Relation& r, const Relation& s) {
  if (r.n != s.n) throw std::invalid_argument("compose_relations: universes differ");
  Relation out(r.name + "." + s.name, r.n);
  for (int x = 0; x < r.n; ++x)
    for (int y = 0; y < r.n; ++y) {
      if (!r.at(x, y)) continue;
      for (int z = 0; z < r.n; ++z)
        if (s.at(y, z)) out.set(x, z);
    }
  return out;
}

LabeledGraph relation_graph(std::span<const Relation> relations) {
  if (relations.empty()) throw std::invalid_argument("relation_graph: no relations");
  const int n = relations.front().n;
  for (const auto& r : relations)
    if (r.n != n) throw std::invalid_argument("relation_graph: universes differ");

  std::vector<std::pair<Node, Node>> edges;
  LabeledGraph::EdgeFeatureMap features;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (x == y) continue;
      std::vector<double> f;
      bool any = false;
      for (const auto& r : relations) {
        f.push_back(r.at(x, y) ? 1.0 : 0.0);
        f.push_back(r.at(y, x) ? 1.0 : 0.0);
        any = any || r.at(x, y) || r.at(y, x);
      }
      if (!any) continue;
      if (x < y) edges.emplace_back(x, y);
      features[{x, y}] = std::move(f);
    }
  }
  return LabeledGraph(n, std::move(edges), {}, std::move(features));
}

bool logic_fwl_consistency(const LabeledGraph& g, const Relation& target, int t) {
  if (target.n != g.num_nodes()) throw std::invalid_argument("logic_fwl_consistency: universe mismatch");
  const Coloring c = fwl2(g, t);
  const auto& colors = c.history[std::min<std::size_t>(static_cast<std::size_t>(t), c.history.size() - 1)];
  std::map<ColorId, bool> member;
  const int n = g.num_nodes();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const ColorId col = colors[static_cast<std::size_t>(x) * n + y];
      auto [it, fresh] = member.try_emplace(col, target.at(x, y));
      if (!fresh && it->second != target.at(x, y)) return false;
    }
  return true;
}

Relation mother_chain(int n) {
  Relation r("mother", n);
  for (int x = 0; x + 1 < n; ++x) r.set(x, x + 1);
  return r;
}

Relation random_family(int n, double p, std::mt19937_64& rng) {
  Relation r("mother", n);
  std::bernoulli_distribution has_mother(p);
  for (int x = 0; x + 1 < n; ++x) {
    if (!has_mother(rng)) continue;
    std::uniform_int_distribution<int> pick(x + 1, n - 1);
    r.set(x, pick(rng));
  }
  return r;
}

Relation ancestor(const Relation& mother, int steps) {
  if (steps < 1) throw std::invalid_argument("ancestor: steps must be >= 1");
  Relation out = mother;
  for (int s = 1; s < steps; ++s) out = compose_relations(out, mother);
  out.name = mother.name + "^" + std::to_string(steps);
  return out;
}

}  // namespace etwl
