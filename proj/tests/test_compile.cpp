#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace bnic;
using namespace bnic::test;

namespace {

UndirectedGraph cycle(std::uint32_t n) {
  UndirectedGraph g;
  for (std::uint32_t i = 0; i < n; ++i) g.addVertex(VarId{i});
  for (std::uint32_t i = 0; i < n; ++i) g.addEdge(VarId{i}, VarId{(i + 1) % n});
  return g;
}

UndirectedGraph randomGraph(std::uint32_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  UndirectedGraph g;
  for (std::uint32_t v = 0; v < n; ++v) g.addVertex(VarId{v});
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b)
      if (coin(rng)) g.addEdge(VarId{a}, VarId{b});
  return g;
}

}  // namespace

TEST(MinFill, AsiaNeedsOneFillEdge) {
  const Dag g = asia();
  const Triangulation t = triangulateMinFill(moralize(g));
  EXPECT_TRUE(isChordal(t.triangulated()));
  EXPECT_EQ(t.fill.size(), 1u);
  EXPECT_TRUE(t.fill == EdgeSet{edge(g, "L", "B")} || t.fill == EdgeSet{edge(g, "S", "E")});
}

TEST(MinFill, ChordalInputGetsNoFill) {
  const Dag g = asia();
  UndirectedGraph h = moralize(g);
  h.addEdge(id(g, "L"), id(g, "B"));
  EXPECT_TRUE(triangulateMinFill(h).fill.empty());
}

TEST(RecursiveThinning, FiveCycleKeepsExactlyTwoFillEdges) {
  const UndirectedGraph c5 = cycle(5);
  // A deliberately fat triangulation: connect vertex 0 to everything and also 1-3, 2-4.
  Triangulation t{c5, {}, {}};
  for (auto [a, b] : {std::pair{0u, 2u}, {0u, 3u}, {1u, 3u}, {2u, 4u}, {1u, 4u}}) t.fill.insert(makeEdge(VarId{a}, VarId{b}));
  ASSERT_TRUE(isChordal(t.triangulated()));
  const Triangulation thin = recursiveThinning(t);
  EXPECT_EQ(thin.fill.size(), 2u);
  EXPECT_TRUE(oracle::fillIsMinimal(c5, thin.fill));
  EXPECT_EQ(thin.order.size(), 5u);
}

TEST(RecursiveThinning, RejectsNonChordalInput) {
  Triangulation t{cycle(4), {}, {}};
  EXPECT_THROW(recursiveThinning(t), std::invalid_argument);
}

TEST(RecursiveThinning, RandomTriangulationsBecomeMinimal) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const UndirectedGraph g = randomGraph(10, 0.3, seed);
    // Start from a wasteful triangulation: eliminate in id order.
    Triangulation t{g, {}, {}};
    UndirectedGraph work = g;
    for (VarId v : g.vertices()) {
      const VarSet nbrs = work.neighbors(v);
      for (VarId a : nbrs)
        for (VarId b : nbrs)
          if (a < b && !work.hasEdge(a, b)) {
            work.addEdge(a, b);
            t.fill.insert(makeEdge(a, b));
          }
      work.removeVertex(v);
    }
    const Triangulation thin = recursiveThinning(t);
    EXPECT_TRUE(oracle::fillIsMinimal(g, thin.fill)) << "seed " << seed;
    EXPECT_TRUE(std::includes(t.fill.begin(), t.fill.end(), thin.fill.begin(), thin.fill.end()));
  }
}

TEST(MinFillThenThinning, SeedThreeIsMinimal) {
  const UndirectedGraph g = randomGraph(10, 0.35, 3);
  const Triangulation t = recursiveThinning(triangulateMinFill(g));
  EXPECT_TRUE(oracle::fillIsMinimal(g, t.fill));
}

TEST(ExtractCliques, AsiaMatchesBruteForce) {
  const Dag g = asia();
  UndirectedGraph h = moralize(g);
  h.addEdge(id(g, "L"), id(g, "B"));
  const auto cliques = extractCliques(h);
  EXPECT_EQ(cliques, sets(g, {"AT", "TLE", "LEB", "SLB", "EBD", "EX"}));
  EXPECT_EQ(cliques, oracle::maximalCliques(h));
}

TEST(ExtractCliques, EdgelessGraphGivesSingletons) {
  UndirectedGraph g;
  for (std::uint32_t v = 0; v < 3; ++v) g.addVertex(VarId{v});
  EXPECT_EQ(extractCliques(g).size(), 3u);
  EXPECT_THROW(extractCliques(cycle(4)), std::invalid_argument);
}

TEST(ExtractCliques, RandomChordalGraphsMatchBruteForce) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const UndirectedGraph g = randomGraph(9, 0.4, seed);
    const UndirectedGraph h = triangulateMinFill(g).triangulated();
    EXPECT_EQ(extractCliques(h), oracle::maximalCliques(h)) << "seed " << seed;
  }
}

TEST(BuildJoinTree, AsiaSeparators) {
  const Dag g = asia();
  const auto jt = buildJoinTree(sets(g, {"AT", "TLE", "LEB", "SLB", "EBD", "EX"}));
  EXPECT_TRUE(jt.isTree());
  std::vector<VarSet> seps;
  for (const TreeEdge& e : jt.edges()) seps.push_back(e.separator);
  std::sort(seps.begin(), seps.end());
  EXPECT_EQ(seps, sets(g, {"T", "LE", "LB", "EB", "E"}));
}

TEST(BuildJoinTree, SingleAndDisjointCliques) {
  EXPECT_EQ(buildJoinTree({VarSet{VarId{0}, VarId{1}}}).size(), 1u);
  const auto jt = buildJoinTree({VarSet{VarId{0}, VarId{1}}, VarSet{VarId{2}, VarId{3}}});
  ASSERT_EQ(jt.edges().size(), 1u);
  EXPECT_TRUE(jt.edges()[0].separator.empty());
  EXPECT_TRUE(buildJoinTree({}).empty());
}

TEST(AssignFamilies, EveryFamilyFitsItsHost) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Dag g = randomDag(8, 0.4, seed);
    const auto [jt, tri] = constructJoinTree(moralize(g), g);
    for (VarId v : g.nodes()) {
      const auto host = jt.familyHost(v);
      ASSERT_TRUE(host.has_value());
      EXPECT_TRUE(isSubset(g.family(v), jt.vars(*host)));
    }
  }
}

TEST(AssignFamilies, PicksSmallestContainingCluster) {
  const Dag g = asia();
  const auto [jt, tri] = constructJoinTree(moralize(g), g);
  EXPECT_EQ(jt.vars(*jt.familyHost(id(g, "A"))), vs(g, "AT"));
  EXPECT_EQ(jt.vars(*jt.familyHost(id(g, "X"))), vs(g, "EX"));
  EXPECT_EQ(jt.vars(*jt.familyHost(id(g, "D"))), vs(g, "EBD"));
}

TEST(ConstructJoinTree, EmptyGraph) {
  const auto [jt, tri] = constructJoinTree(UndirectedGraph{}, Dag{});
  EXPECT_TRUE(jt.empty());
  EXPECT_TRUE(tri.fill.empty());
}

TEST(EliminationOrder, ReadOffJoinTreeIsPerfect) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Dag g = randomDag(20, 0.2, seed);
    const auto [jt, tri] = constructJoinTree(moralize(g), g);
    const UndirectedGraph h = tri.triangulated();
    EXPECT_TRUE(isPerfectEliminationOrder(h, eliminationOrderFromTree(jt))) << "seed " << seed;
    EXPECT_TRUE(isPerfectEliminationOrder(h, tri.order)) << "seed " << seed;
  }
  EXPECT_FALSE(isPerfectEliminationOrder(cycle(4), {VarId{0}, VarId{1}, VarId{2}, VarId{3}}));
}
