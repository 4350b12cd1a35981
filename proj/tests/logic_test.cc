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

#include <gtest/gtest.h>

#include "etwl/logic.hpp"

namespace etwl {
namespace {

using Pairs = std::vector<std::pair<int, int>>;

Relation random_relation(int n, std::mt19937_64& rng) {
  Relation r("r", n);
  std::bernoulli_distribution coin(0.35);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) r.set(x, y, coin(rng));
  return r;
}

TEST(Compose, GrandmotherOnChain) {
  const Relation mother = mother_chain(4);
  const Relation grandmother = compose_relations(mother, mother);
  EXPECT_EQ(grandmother.pairs(), (Pairs{{0, 2}, {1, 3}}));
  EXPECT_EQ(compose_relations(grandmother, mother).pairs(), (Pairs{{0, 3}}));
}

TEST(Compose, EmptyAnnihilates) {
  const Relation mother = mother_chain(5);
  EXPECT_TRUE(compose_relations(mother, Relation("empty", 5)).pairs().empty());
}

TEST(Compose, UniverseMismatch) {
  EXPECT_THROW(compose_relations(mother_chain(3), mother_chain(4)), std::invalid_argument);
}

TEST(Compose, Associative) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 6;
    const Relation a = random_relation(n, rng), b = random_relation(n, rng), c = random_relation(n, rng);
    EXPECT_EQ(compose_relations(compose_relations(a, b), c), compose_relations(a, compose_relations(b, c)));
  }
}

TEST(RelationGraph, DirectionInFeatures) {
  const Relation mother = mother_chain(3);
  const Relation rels[] = {mother};
  const LabeledGraph g = relation_graph(rels);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(std::vector<double>((*g.edge_feature(0, 1)).begin(), (*g.edge_feature(0, 1)).end()),
            (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(std::vector<double>((*g.edge_feature(1, 0)).begin(), (*g.edge_feature(1, 0)).end()),
            (std::vector<double>{0.0, 1.0}));
}

TEST(LogicConsistency, ChainExamples) {
  const Relation mother = mother_chain(6);
  const Relation rels[] = {mother};
  const LabeledGraph g = relation_graph(rels);
  EXPECT_TRUE(logic_fwl_consistency(g, ancestor(mother, 2), 1));
  EXPECT_TRUE(logic_fwl_consistency(g, ancestor(mother, 3), 2));
  // Round 0 only sees edge / non-edge: (0,3) and (0,2) look alike.
  EXPECT_FALSE(logic_fwl_consistency(g, ancestor(mother, 3), 0));
  EXPECT_FALSE(logic_fwl_consistency(g, ancestor(mother, 2), 0));
  EXPECT_TRUE(logic_fwl_consistency(g, mother, 0));
}

TEST(LogicConsistency, RandomFamilies) {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 3 + trial % 5;
    const Relation mother = random_family(n, 0.8, rng);
    const Relation rels[] = {mother};
    const LabeledGraph g = relation_graph(rels);
    for (int steps = 1; steps <= 3; ++steps) {
      // steps - 1 compositions need at least that many rounds.
      const int t = std::max(steps - 1, 0);
      EXPECT_TRUE(logic_fwl_consistency(g, ancestor(mother, steps), t)) << "trial " << trial;
    }
  }
}

TEST(RandomFamily, IsADag) {
  std::mt19937_64 rng(1);
  const Relation r = random_family(7, 1.0, rng);
  for (auto [x, y] : r.pairs()) EXPECT_LT(x, y);
  EXPECT_EQ(r.pairs().size(), 6u);
}

}  // namespace
}  // namespace etwl
