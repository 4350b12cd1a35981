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

#include <random>

#include "etwl/graph.hpp"
#include "etwl/harness.hpp"

namespace etwl {
namespace {

const std::string kFixtures = ETWL_FIXTURES;

using R = PairRelation;

TEST(ParseGraph, Triangle) {
  const LabeledGraph g = load_graph_file(kFixtures + "/triangle.json");
  EXPECT_EQ(g.num_nodes(), 3);
  EXPECT_EQ(g.num_edges(), 3u);
  EXPECT_EQ(g.labels(), (std::vector<Label>{1, 1, 1}));
}

TEST(ParseGraph, CycleIsTwoRegular) {
  const LabeledGraph g = load_graph_file(kFixtures + "/c6.json");
  for (Node v = 0; v < 6; ++v) EXPECT_EQ(g.degree(v), 2);
}

TEST(ParseGraph, RejectsSelfLoop) {
  try {
    load_graph_file(kFixtures + "/self_loop.json");
    FAIL() << "self-loop accepted";
  } catch (const GraphFormatError& e) {
    EXPECT_NE(std::string(e.what()).find("self-loop"), std::string::npos) << e.what();
  }
}

TEST(ParseGraph, RejectsOutOfRangeEndpoint) {
  EXPECT_THROW(load_graph_file(kFixtures + "/out_of_range.json"), GraphFormatError);
}

TEST(ParseGraph, RejectsInconsistentFeatureWidths) {
  EXPECT_THROW(load_graph_file(kFixtures + "/bad_widths.json"), GraphFormatError);
}

TEST(ParseGraph, MalformedJsonReportsLine) {
  try {
    load_graph_file(kFixtures + "/malformed.json");
    FAIL() << "malformed file accepted";
  } catch (const GraphFormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ParseGraph, KeepsOrderedPairFeatures) {
  const LabeledGraph g = load_graph_file(kFixtures + "/directed_chain.json");
  EXPECT_EQ(g.edge_feature_width(), 2);
  ASSERT_TRUE(g.edge_feature(0, 1).has_value());
  EXPECT_EQ((*g.edge_feature(0, 1))[0], 1.0);
  EXPECT_EQ((*g.edge_feature(1, 0))[1], 1.0);
  EXPECT_FALSE(g.edge_feature(0, 2).has_value());
}

TEST(ParseGraph, JsonRoundTrip) {
  const LabeledGraph g = load_graph_file(kFixtures + "/directed_chain.json");
  EXPECT_EQ(graph_from_json(graph_to_json(g)), g);
  for (const auto& p : builtin_pairs()) {
    const GraphPair q = parse_pair(pair_to_json(p).dump());
    EXPECT_EQ(q.g, p.g);
    EXPECT_EQ(q.h, p.h);
  }
}

TEST(AtomicType, AdjacentPair) {
  const LabeledGraph g = load_graph_file(kFixtures + "/triangle.json");
  const Node t[] = {0, 1};
  const AtomicType a = atomic_type(g, t);
  EXPECT_EQ(a.matrix, (std::vector<R>{R::kEqual, R::kEdge, R::kEdge, R::kEqual}));
  EXPECT_EQ(a.labels, (std::vector<Label>{1, 1}));
}

TEST(AtomicType, DiagonalPair) {
  const LabeledGraph g = graphs::complete(3);
  const Node t[] = {0, 0};
  EXPECT_EQ(atomic_type(g, t).matrix, std::vector<R>(4, R::kEqual));
}

TEST(AtomicType, NonAdjacentPair) {
  const LabeledGraph g = graphs::path(3);
  const Node t[] = {0, 2};
  EXPECT_EQ(atomic_type(g, t).matrix, (std::vector<R>{R::kEqual, R::kNeither, R::kNeither, R::kEqual}));
}

TEST(AtomicType, PermutationInvariant) {
  for (const auto& [name, g] : builtin_graphs()) {
    const std::vector<int> perm = random_permutation(g.num_nodes(), 11);
    const LabeledGraph pg = g.permuted(perm);
    const int n = g.num_nodes();
    for (Node a = 0; a < n; ++a)
      for (Node b = 0; b < n; ++b)
        for (Node c = 0; c < n; ++c) {
          const Node t[] = {a, b, c};
          const Node pt[] = {perm[a], perm[b], perm[c]};
          ASSERT_EQ(atomic_type(g, t), atomic_type(pg, pt)) << name;
        }
  }
}

TEST(BruteForce, RelabeledCycleIsIsomorphic) {
  const LabeledGraph c6 = graphs::cycle(6);
  EXPECT_TRUE(brute_force_isomorphic(c6, c6.permuted(random_permutation(6, 3))));
}

TEST(BruteForce, CycleVersusTwoTriangles) {
  EXPECT_FALSE(brute_force_isomorphic(graphs::cycle(6),
                                      graphs::disjoint_union(graphs::complete(3), graphs::complete(3))));
}

TEST(BruteForce, LabelMultisetMatters) {
  const auto edges = graphs::complete(3).edges();
  EXPECT_FALSE(brute_force_isomorphic(LabeledGraph(3, edges, {1, 1, 2}), LabeledGraph(3, edges, {1, 2, 2})));
  EXPECT_TRUE(brute_force_isomorphic(LabeledGraph(3, edges, {1, 1, 2}), LabeledGraph(3, edges, {2, 1, 1})));
}

TEST(BruteForce, FeaturesMustMatch) {
  const LabeledGraph g = load_graph_file(kFixtures + "/directed_chain.json");
  // Reversing the chain maps node 0 to 2, but the labels pin node 2.
  const LabeledGraph rev = g.permuted(std::vector<int>{2, 1, 0});
  EXPECT_TRUE(brute_force_isomorphic(g, rev));
  LabeledGraph::EdgeFeatureMap flipped;
  for (const auto& [key, f] : g.edge_features()) flipped[{key.second, key.first}] = f;
  EXPECT_FALSE(brute_force_isomorphic(g, LabeledGraph(3, g.edges(), g.labels(), flipped)));
}

TEST(BruteForce, EquivalenceOnSmallGraphs) {
  const auto gs = builtin_graphs();
  for (const auto& [a, g] : gs) {
    EXPECT_TRUE(brute_force_isomorphic(g, g)) << a;
    for (const auto& [b, h] : gs) {
      if (g.num_nodes() != h.num_nodes()) continue;
      EXPECT_EQ(brute_force_isomorphic(g, h), brute_force_isomorphic(h, g)) << a << " " << b;
    }
  }
}

TEST(BruteForce, EnforcesCap) {
  EXPECT_THROW(brute_force_isomorphic(graphs::cycle(11), graphs::cycle(11)), std::invalid_argument);
}

TEST(Generators, StronglyRegularParameters) {
  // srg(16, 6, 2, 2): 6-regular, adjacent pairs share 2 neighbors, so do
  // non-adjacent ones.
  for (const LabeledGraph& g : {graphs::rook(4), graphs::shrikhande()}) {
    ASSERT_EQ(g.num_nodes(), 16);
    for (Node u = 0; u < 16; ++u) {
      EXPECT_EQ(g.degree(u), 6);
      for (Node v = u + 1; v < 16; ++v) {
        int common = 0;
        for (Node w : g.neighbors(u)) common += g.has_edge(w, v);
        EXPECT_EQ(common, 2);
      }
    }
  }
}

TEST(Generators, CfiSizes) {
  const LabeledGraph a = graphs::cfi(graphs::complete(3), false);
  const LabeledGraph b = graphs::cfi(graphs::complete(3), true);
  // Per base vertex of degree 2: 2 middle vertices + 2 x 2 endpoint vertices.
  EXPECT_EQ(a.num_nodes(), 18);
  EXPECT_EQ(b.num_nodes(), 18);
  EXPECT_EQ(a.num_edges(), b.num_edges());
}

TEST(BuiltinPairs, RequiredPairsPresent) {
  std::map<std::string, GraphPair> by_name;
  for (auto& p : builtin_pairs()) by_name.emplace(p.name, p);
  ASSERT_TRUE(by_name.count("c6_vs_2c3"));
  ASSERT_TRUE(by_name.count("rook4_vs_shrikhande"));
  ASSERT_TRUE(by_name.count("cfi_k3"));
  EXPECT_EQ(by_name.at("c6_vs_2c3").expected.at("wl1"), Expectation::kIndistinguishable);
  EXPECT_EQ(by_name.at("c6_vs_2c3").expected.at("fwl2"), Expectation::kDistinguishable);
  EXPECT_EQ(by_name.at("rook4_vs_shrikhande").expected.at("wl2"), Expectation::kIndistinguishable);
}

TEST(BuiltinPairs, NonIsomorphicAndSameOrder) {
  for (const auto& p : builtin_pairs()) {
    EXPECT_EQ(p.g.num_nodes(), p.h.num_nodes()) << p.name;
    if (p.g.num_nodes() <= kBruteForceMaxNodes) EXPECT_FALSE(brute_force_isomorphic(p.g, p.h)) << p.name;
  }
}

}  // namespace
}  // namespace etwl
