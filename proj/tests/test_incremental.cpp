#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "property_support.hpp"

using namespace bnic;
using namespace bnic::test;

namespace {

std::set<VarSet> markedSets(const MarkStep& s) { return {s.markedVars.begin(), s.markedVars.end()}; }

std::vector<Modification> resolve(const CompiledModel& m, const std::string& script) {
  Dag scratch = m.dag;
  return flatten(resolveEdits(scratch, parseEditScript(script)));
}

}  // namespace

TEST(ModifyMoralGraph, RemoveLEDropsLEAndTL) {
  CompiledModel m = fullRecompile(asia());
  const Dag& g = m.dag;
  IncrementalEngine engine(m);
  const MarkStep s = engine.stage(RemoveArc{id(g, "L"), id(g, "E")});
  ASSERT_EQ(s.links.size(), 2u);
  EXPECT_EQ(s.links[0].edge, edge(g, "L", "E"));
  EXPECT_EQ(s.links[1].edge, edge(g, "T", "L"));
  for (const Link& l : s.links) EXPECT_EQ(l.change, LinkChange::Deleted);
  EXPECT_EQ(markedSets(s), (std::set<VarSet>{vs(g, "TLE"), vs(g, "SLBE")}));
}

TEST(ModifyMoralGraph, SharedChildKeepsMarriage) {
  // a->c, b->c, a->d, b->d: removing a->c keeps a-b married through d.
  Dag g;
  const VarId a = g.addNode("a"), b = g.addNode("b"), c = g.addNode("c"), d = g.addNode("d");
  g.addArc(a, c);
  g.addArc(b, c);
  g.addArc(a, d);
  g.addArc(b, d);
  CompiledModel m = fullRecompile(g);
  IncrementalEngine engine(m);
  const MarkStep s = engine.stage(RemoveArc{a, c});
  ASSERT_EQ(s.links.size(), 1u);
  EXPECT_EQ(s.links[0].edge, makeEdge(a, c));
  EXPECT_TRUE(m.moral.hasEdge(a, b));
}

TEST(RemoveArc, AsiaScenarioKeepsOutsideClusters) {
  const CompiledModel before = fullRecompile(asia());
  CompiledModel m = before;
  const Dag& g = m.dag;
  IncrementalReport r;
  m = incrementalCompile(m, resolve(m, "remove-arc L E"), &r);
  EXPECT_EQ(checkAgainstFull(m), "");
  ASSERT_EQ(r.splices.size(), 1u);
  EXPECT_EQ(r.splices[0].variables, vs(g, "TLEBS"));
  for (const char* kept : {"AT", "EBD", "EX"}) {
    bool found = false;
    for (const auto& [id, c] : m.mpdTree.clusters()) found = found || (c.vars == vs(g, kept) && before.mpdTree.contains(id));
    EXPECT_TRUE(found) << kept;
  }
  EXPECT_EQ(clusterMultiset(m.mpdTree), sets(g, {"AT", "TE", "EBD", "BS", "SL", "EX"}));
}

TEST(RemoveNode, ExpandsAndAbsorbsLE) {
  CompiledModel m = fullRecompile(asia());
  const Dag g0 = m.dag;
  const auto mods = resolve(m, "remove-node D");
  ASSERT_EQ(mods.size(), 3u);
  EXPECT_EQ(mods[0], Modification(RemoveArc{id(g0, "E"), id(g0, "D")}));
  EXPECT_EQ(mods[1], Modification(RemoveArc{id(g0, "B"), id(g0, "D")}));
  EXPECT_EQ(mods[2], Modification(RemoveNode{id(g0, "D")}));

  const ClusterId tle = m.index.mpsOfClique(*m.junctionTree.familyHost(id(g0, "E")));
  IncrementalReport r;
  m = incrementalCompile(m, mods, &r);
  EXPECT_EQ(checkAgainstFull(m), "");
  ASSERT_EQ(r.splices.size(), 1u);
  EXPECT_EQ(r.splices[0].variables, vs(g0, "EBLS"));
  ASSERT_FALSE(r.splices[0].amalgamated.empty());
  bool leIntoTle = false;
  for (const Absorption& a : r.splices[0].amalgamated) leIntoTle = leIntoTle || a.into == tle;
  EXPECT_TRUE(leIntoTle);
  EXPECT_TRUE(m.mpdTree.contains(tle));
  EXPECT_EQ(m.mpdTree.vars(tle), vs(g0, "TLE"));
  EXPECT_TRUE(absorbNonMaximal(m.junctionTree).empty());
}

TEST(AddNode, SingletonHangsOffByEmptySeparator) {
  CompiledModel m = fullRecompile(asia());
  IncrementalEngine engine(m);
  const MarkStep s = engine.stage(AddNode{"Z"});
  ASSERT_TRUE(s.created.has_value());
  const VarId z = *s.created;
  const ClusterId mz = *m.mpdTree.familyHost(z);
  EXPECT_EQ(m.mpdTree.vars(mz), VarSet{z});
  EXPECT_TRUE(m.mpdTree.cluster(mz).marked);
  ASSERT_EQ(m.mpdTree.neighbors(mz).size(), 1u);
  EXPECT_TRUE(m.mpdTree.neighbors(mz).begin()->second.empty());
  EXPECT_EQ(markedSets(s), (std::set<VarSet>{VarSet{z}}));
}

TEST(AddArc, NewNodeWiredBetweenAAndX) {
  CompiledModel m = fullRecompile(asia());
  const Dag& g = m.dag;
  IncrementalEngine engine(m);
  const VarId z = *engine.stage(AddNode{"Z"}).created;
  const VarId a = id(g, "A"), x = id(g, "X");

  const MarkStep s1 = engine.stage(AddArc{a, z});
  const ClusterId mz = *m.mpdTree.familyHost(z);
  ASSERT_EQ(m.mpdTree.neighbors(mz).size(), 1u);
  EXPECT_EQ(m.mpdTree.neighbors(mz).begin()->second, VarSet{a});
  VarSet zs{z};
  EXPECT_EQ(markedSets(s1), (std::set<VarSet>{zs, vs(g, "AT")}));

  const MarkStep s2 = engine.stage(AddArc{z, x});
  EdgeSet added;
  for (const Link& l : s2.links) added.insert(l.edge);
  EXPECT_EQ(added, (EdgeSet{makeEdge(z, x), makeEdge(z, id(g, "E"))}));
  EXPECT_EQ(markedSets(s2), (std::set<VarSet>{zs, vs(g, "AT"), vs(g, "TLE"), vs(g, "EX")}));

  const auto splices = engine.recompileMarked();
  ASSERT_EQ(splices.size(), 1u);
  VarSet expected = vs(g, "ATLEX");
  expected.insert(z);
  EXPECT_EQ(splices[0].variables, expected);
  EXPECT_EQ(checkAgainstFull(m), "");
}

TEST(Marking, SingleArcRemovalMatchesIncompletenessClosure) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const Dag g = randomDag(12, 0.3, seed);
    const auto arcs = g.arcs();
    if (arcs.empty()) continue;
    const auto [p, c] = arcs[seed % arcs.size()];
    CompiledModel m = fullRecompile(g);
    const ClusterTree oldMpd = m.mpdTree;
    const ClusterId my = m.index.mpsOfClique(*m.junctionTree.familyHost(c));
    IncrementalEngine engine(m);
    const MarkStep s = engine.stage(RemoveArc{p, c});
    EXPECT_EQ(markedSets(s), oracle::incompletenessClosure(oldMpd, m.moral, my)) << "seed " << seed;
    ++checked;
  }
  EXPECT_GT(checked, 200);
}

TEST(Locality, UnmarkedClustersSurviveVerbatim) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const RandomCase c = randomCase(seed);
    CompiledModel m = fullRecompile(c.network);
    Dag scratch = m.dag;
    const auto mods = flatten(resolveEdits(scratch, c.script));
    IncrementalEngine engine(m);
    for (const Modification& mod : mods) engine.stage(mod);
    std::map<ClusterId, VarSet> unmarked;
    for (const auto& [id, cl] : m.junctionTree.clusters())
      if (!cl.marked) unmarked.emplace(id, cl.vars);
    const ClusterTree mpdBefore = m.mpdTree;
    engine.recompileMarked();
    for (const auto& [id, vars] : unmarked) {
      // Unmarked cliques are kept, possibly enlarged by absorbing a rebuilt subset.
      ASSERT_TRUE(m.junctionTree.contains(id)) << "seed " << seed;
      EXPECT_TRUE(isSubset(vars, m.junctionTree.vars(id))) << "seed " << seed;
    }
    double outside = 0;
    std::set<VarSet> now;
    for (const auto& [id, cl] : m.mpdTree.clusters()) now.insert(cl.vars);
    std::size_t kept = 0;
    for (const auto& [id, cl] : mpdBefore.clusters())
      if (!cl.marked && now.contains(cl.vars)) ++kept;
    if (!m.mpdTree.empty()) outside = static_cast<double>(kept) / static_cast<double>(m.mpdTree.size());
    EXPECT_GE(stability(mpdBefore, m.mpdTree) + 1e-12, outside) << "seed " << seed;
  }
}

TEST(BatchVersusSimple, SameDecomposition) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const RandomCase c = randomCase(seed);
    EXPECT_TRUE(mpdEqual(runBatch(c).mpdTree, runSimple(c).mpdTree)) << "seed " << seed;
  }
}

TEST(Engine, EmptyBatchLeavesModelUnchanged) {
  const CompiledModel before = fullRecompile(asia());
  const CompiledModel after = incrementalCompile(before, {});
  EXPECT_TRUE(mpdEqual(before.mpdTree, after.mpdTree));
  EXPECT_EQ(clusterMultiset(before.junctionTree), clusterMultiset(after.junctionTree));
  EXPECT_TRUE(validate(after).passed());
}

TEST(Engine, RemovingEveryNodeEmptiesTheModel) {
  CompiledModel m = fullRecompile(asia());
  std::string script;
  for (const char* n : {"A", "S", "T", "L", "B", "E", "X", "D"}) script += std::string("remove-node ") + n + "\n";
  m = incrementalCompile(m, resolve(m, script));
  EXPECT_TRUE(m.junctionTree.empty());
  EXPECT_TRUE(m.mpdTree.empty());
  EXPECT_TRUE(validate(m).passed());
}

TEST(Engine, GrowingFromEmpty) {
  CompiledModel m = fullRecompile(Dag{});
  m = incrementalCompile(m, resolve(m, "add-node a\nadd-node b\nadd-node c\n"));
  m = incrementalCompile(m, resolve(m, "add-arc a c\nadd-arc b c\n"));
  EXPECT_EQ(checkAgainstFull(m), "");
  EXPECT_EQ(m.mpdTree.size(), 1u);
}
