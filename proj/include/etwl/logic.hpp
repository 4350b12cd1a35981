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

// Binary relations and the composition fragment of counting logic.

#ifndef ETWL_LOGIC_HPP_
#define ETWL_LOGIC_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "etwl/graph.hpp"

namespace etwl {

/// Directed boolean relation over nodes 0..n-1.
struct Relation {
  std::string name;
  int n = 0;
  std::vector<std::uint8_t> cells;  // row-major n x n

  Relation() = default;
  Relation(std::string name, int n) : name(std::move(name)), n(n), cells(static_cast<std::size_t>(n) * n, 0) {}

  bool at(int x, int y) const { return cells[static_cast<std::size_t>(x) * n + y] != 0; }
  void set(int x, int y, bool v = true) { cells[static_cast<std::size_t>(x) * n + y] = v ? 1 : 0; }
  std::vector<std::pair<int, int>> pairs() const;

  friend bool operator==(const Relation& a, const Relation& b) { return a.n == b.n && a.cells == b.cells; }
};

/// out(x, z) = exists y: r(x, y) and s(y, z). Throws on universe mismatch.
Relation compose_relations(const Relation& r, const Relation& s);

/// Undirected graph on the union of the relations' tuples. Each ordered edge
/// (x, y) carries features [r(x,y), r(y,x)] per relation, so direction
/// survives in the ordered-pair features that 2-FWL and the ET read.
LabeledGraph relation_graph(std::span<const Relation> relations);

/// True iff no two pairs with equal 2-FWL colors after t rounds disagree on
/// membership in `target`.
bool logic_fwl_consistency(const LabeledGraph& g, const Relation& target, int t);

/// mother(x, x+1) for x < n-1.
Relation mother_chain(int n);

/// Random family DAG: each x gets, with probability p, one mother among the
/// nodes with larger index.
Relation random_family(int n, double p, std::mt19937_64& rng);

/// r composed with itself so that the result relates x to its ancestor
/// `steps` generations up (steps >= 1).
Relation ancestor(const Relation& mother, int steps);

}  // namespace etwl

#endif  // ETWL_LOGIC_HPP_
