#include <gtest/gtest.h>

#include "cmh/baselines.hpp"
#include "cmh/edge_list.hpp"
#include "oracles.hpp"

using namespace cmh;

namespace {

Graph load(const std::string& name) { return load_edge_list_file(oracle::fixture(name)).graph; }

Graph star(std::size_t leaves) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId v = 1; v <= leaves; ++v) e.emplace_back(0, v);
  return Graph::from_edges(leaves + 1, e);
}

std::vector<std::string> labels_of(const Graph& g, const std::vector<NodeId>& ids) {
  std::vector<std::string> out;
  for (NodeId v : ids) out.push_back(g.label(v));
  std::sort(out.begin(), out.end(), label_less);
  return out;
}

const DetectorSpec kGreedy{DetectorKind::greedy};

}  // namespace

TEST(Dice, RemovesTheHighestDegreeInsider) {
  // u = 0 has in-community neighbours 1, 2, 3 of degree 3, 7 and 5.
  std::vector<std::pair<NodeId, NodeId>> e{{0, 1}, {0, 2}, {0, 3}, {1, 4}, {1, 5}};
  for (NodeId v = 4; v <= 9; ++v) e.emplace_back(2, v);
  for (NodeId v = 4; v <= 7; ++v) e.emplace_back(3, v);
  const Graph g = Graph::from_edges(10, e);
  ASSERT_EQ(g.degree(1), 3u);
  ASSERT_EQ(g.degree(2), 7u);
  ASSERT_EQ(g.degree(3), 5u);
  const std::vector<NodeId> community{0, 1, 2, 3};
  EXPECT_EQ(dice_delta(g, 0, community, 1).toggled(), (std::vector<NodeId>{2}));
  // With more budget, additions go to the highest-degree outsiders: 4, 5 (degree 3 each).
  EXPECT_EQ(dice_delta(g, 0, community, 3).toggled(), (std::vector<NodeId>{2, 4, 5}));
}

TEST(Dice, NoInsideNeighbourSpendsEverythingOnAdditions) {
  const Graph g = Graph::from_edges(5, {{0, 3}, {1, 2}, {2, 4}});
  const std::vector<NodeId> community{0, 1};
  const auto d = dice_delta(g, 0, community, 2);
  EXPECT_EQ(d.size(), 2u);
  for (NodeId v : d.toggled()) EXPECT_FALSE(g.has_edge(0, v));
}

TEST(Dice, TwoCliquesTrace) {
  const Graph g = load("two_cliques.txt");
  const NodeId u = g.id_of("0");
  const Partition original = detect(kGreedy, g);
  const auto out = run_dice(g, u, kGreedy, original, 0.5, 3);
  std::size_t removals = 0, additions = 0;
  for (NodeId v : out.delta.toggled()) {
    const bool same = original.community_index(v) == original.community_index(u);
    if (g.has_edge(u, v)) {
      ++removals;
      EXPECT_TRUE(same);
    } else {
      ++additions;
      EXPECT_FALSE(same);
    }
  }
  EXPECT_EQ(removals, 1u);
  EXPECT_EQ(additions, 2u);
  // Clique B's hub (the bridge end, degree 5) and the lowest id among the rest.
  EXPECT_EQ(labels_of(g, out.delta.toggled()), (std::vector<std::string>{"4", "5", "6"}));
  const Partition after = detect(kGreedy, apply_delta(g, out.delta).materialize());
  EXPECT_EQ(out.final_partition, after);
  const double sim = oracle::dice(without(community_of(original, u), u),
                                  without(community_of(after, u), u));
  EXPECT_DOUBLE_EQ(out.similarity, sim);
}

TEST(Roam, StarLeaf) {
  const Graph g = star(4);
  const auto d = roam_delta(g, 2, 3);
  EXPECT_EQ(d.owner(), 0u);
  EXPECT_EQ(d.toggled(), (std::vector<NodeId>{2}));
}

TEST(Roam, PathTrace) {
  // a - u - b - c with ids 0 1 2 3: v0 = b (degree 2), then b connects to a.
  const Graph g = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  const auto d = roam_delta(g, 1, 2);
  EXPECT_EQ(d.owner(), 2u);
  EXPECT_EQ(d.toggled(), (std::vector<NodeId>{0, 1}));
  const auto view = apply_delta(g, d);
  EXPECT_FALSE(view.has_edge(1, 2));
  EXPECT_TRUE(view.has_edge(0, 2));
}

TEST(Roam, DegreeTiesGoToTheLowerId) {
  const Graph g = Graph::from_edges(3, {{0, 1}, {0, 2}});
  EXPECT_EQ(roam_delta(g, 0, 1).owner(), 1u);
}

TEST(Roam, IsolatedTargetFails) {
  const Graph g = Graph::from_edges(3, {{0, 1}});
  EXPECT_TRUE(roam_delta(g, 2, 2).empty());
  const Partition p(std::vector<std::uint32_t>{0, 0, 0});
  const auto out = run_roam(g, 2, kGreedy, p, 0.9, 2);
  EXPECT_FALSE(out.success);
  EXPECT_EQ(out.used_budget, 0u);
}

TEST(Random, ReproducibleUnderSeed) {
  const Graph g = load("kar.txt");
  EXPECT_EQ(random_delta(g, 5, 3, 17), random_delta(g, 5, 3, 17));
  EXPECT_THROW(random_delta(g, 5, 0, 17), ConfigError);
}

TEST(Random, TriangleRemovalIsFair) {
  const Graph g = Graph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  std::size_t first = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto d = random_delta(g, 0, 1, seed);
    ASSERT_EQ(d.size(), 1u);
    first += d.toggled().front() == 1;
  }
  EXPECT_NEAR(static_cast<double>(first) / 1000.0, 0.5, 0.05);
}

TEST(Random, RedrawsCanCancelUnlessDistinct) {
  const Graph g = Graph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  bool saw_cancel = false;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    saw_cancel = saw_cancel || random_delta(g, 0, 2, seed).size() == 0;
    EXPECT_EQ(random_delta(g, 0, 2, seed, true).size(), 2u);
  }
  EXPECT_TRUE(saw_cancel);
}

TEST(RankedToggles, StarLeafHitsTheCentreFirst) {
  const Graph g = star(5);
  const auto bc = betweenness(g);
  EXPECT_EQ(ranked_toggle_delta(g, 3, 1, nullptr).toggled(), (std::vector<NodeId>{0}));
  EXPECT_EQ(ranked_toggle_delta(g, 3, 1, &bc).toggled(), (std::vector<NodeId>{0}));
}

TEST(RankedToggles, DistinctAndCappedByNodeCount) {
  const Graph g = load("barbell.txt");
  for (std::size_t beta : {1u, 3u, 5u, 9u}) {
    const auto d = ranked_toggle_delta(g, 0, beta, nullptr);
    EXPECT_EQ(d.size(), std::min<std::size_t>(beta, 5));
  }
}

TEST(RankedToggles, KarateRegression) {
  const Graph g = load("kar.txt");
  const NodeId u = g.id_of("8");  // neighbour of both hubs
  const auto bc = betweenness(g);
  const std::vector<std::string> want{"0", "32", "33"};
  EXPECT_EQ(labels_of(g, ranked_toggle_delta(g, u, 3, &bc).toggled()), want);
  EXPECT_EQ(labels_of(g, ranked_toggle_delta(g, u, 3, nullptr).toggled()), want);
}

TEST(Baselines, SharedPredicateAndBudget) {
  const Graph g = load("kar.txt");
  const Partition original = detect(kGreedy, g);
  for (auto kind : {BaselineKind::dice, BaselineKind::roam, BaselineKind::random,
                    BaselineKind::degree, BaselineKind::centrality}) {
    for (NodeId u : {0u, 16u, 25u}) {
      for (std::size_t beta : {1u, 3u, 6u}) {
        const auto out = run_baseline({kind, 9}, g, u, kGreedy, original, 0.5, beta);
        EXPECT_LE(out.used_budget, beta);
        EXPECT_EQ(out.used_budget, out.delta.size());
        if (kind != BaselineKind::roam) { EXPECT_EQ(out.delta.owner(), u); }
        const Partition after = detect(kGreedy, apply_delta(g, out.delta).materialize());
        const double sim = oracle::dice(without(community_of(original, u), u),
                                        without(community_of(after, u), u));
        EXPECT_DOUBLE_EQ(out.similarity, sim);
        EXPECT_EQ(out.success, sim <= 0.5 && !(kind == BaselineKind::roam && out.delta.empty()));
      }
    }
  }
}

TEST(Baselines, ParseNames) {
  EXPECT_EQ(parse_baseline_kind("centrality"), BaselineKind::centrality);
  EXPECT_THROW(parse_baseline_kind("drl"), ConfigError);
}
