#pragma once

#include "bnic/cluster_tree.hpp"
#include "bnic/compile.hpp"
#include "bnic/graph.hpp"
#include "bnic/mpd.hpp"

namespace bnic {

/// The network together with every structure compiled from it. The family
/// map of `junctionTree` holds C_X, that of `mpdTree` holds M_X.
struct CompiledModel {
  Dag dag;
  UndirectedGraph moral;
  ClusterTree junctionTree;
  ClusterTree mpdTree;
  MpdIndex index;
  Triangulation triangulation;
};

/// From-scratch compilation: moralize, build the junction tree of a minimal
/// triangulation, aggregate it into the MPD tree.
inline CompiledModel fullRecompile(const Dag& g) {
  CompiledModel m;
  m.dag = g;
  m.moral = moralize(g);
  auto [jt, tri] = constructJoinTree(m.moral, g);
  auto [mpd, index] = aggregateCliques(jt, m.moral);
  m.junctionTree = std::move(jt);
  m.mpdTree = std::move(mpd);
  m.index = std::move(index);
  m.triangulation = std::move(tri);
  return m;
}

}  // namespace bnic
