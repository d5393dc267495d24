// Maximal prime subgraph decomposition: aggregate adjacent junction-tree
// cliques across separators that are incomplete in the moral graph.
#pragma once

#include <map>
#include <numeric>
#include <set>

#include "bnic/cluster_tree.hpp"
#include "bnic/graph.hpp"

namespace bnic {

/// Correspondence between MPD clusters and the junction-tree cliques they
/// aggregate. M_X is derived as the MPS holding C_X.
struct MpdIndex {
  std::map<ClusterId, std::set<ClusterId>> cliquesOf;  // MPS -> cliques
  std::map<ClusterId, ClusterId> mpsOf;                // clique -> MPS

  void attach(ClusterId clique, ClusterId mps) {
    cliquesOf[mps].insert(clique);
    mpsOf[clique] = mps;
  }

  void detachClique(ClusterId clique) {
    auto it = mpsOf.find(clique);
    if (it == mpsOf.end()) return;
    auto& set = cliquesOf[it->second];
    set.erase(clique);
    if (set.empty()) cliquesOf.erase(it->second);
    mpsOf.erase(it);
  }

  void eraseMps(ClusterId mps) {
    auto it = cliquesOf.find(mps);
    if (it == cliquesOf.end()) return;
    for (ClusterId c : it->second) mpsOf.erase(c);
    cliquesOf.erase(it);
  }

  /// Moves every clique of `from` under `into`.
  void mergeMps(ClusterId from, ClusterId into) {
    auto it = cliquesOf.find(from);
    if (it == cliquesOf.end()) return;
    const auto moved = it->second;
    cliquesOf.erase(it);
    for (ClusterId c : moved) attach(c, into);
  }

  ClusterId mpsOfClique(ClusterId clique) const {
    auto it = mpsOf.find(clique);
    if (it == mpsOf.end()) throw std::logic_error("clique " + std::to_string(raw(clique)) + " belongs to no MPS");
    return it->second;
  }

  std::optional<ClusterId> hostClique(VarId x, const ClusterTree& jt) const { return jt.familyHost(x); }

  std::optional<ClusterId> hostMps(VarId x, const ClusterTree& jt) const {
    auto c = jt.familyHost(x);
    if (!c) return std::nullopt;
    return mpsOfClique(*c);
  }
};

struct MpdResult {
  ClusterTree tree;
  MpdIndex index;
};

/// Merges adjacent clusters whose separator is incomplete in `gm` until all
/// separators are complete. Merged clusters keep the smaller id. Separators
/// are never altered by a merge, so the set of edges to contract is fixed up
/// front and the result does not depend on the order of contraction.
inline MpdResult aggregateCliques(const ClusterTree& jt, const UndirectedGraph& gm) {
  MpdResult out{jt, {}};
  for (const auto& [id, c] : jt.clusters()) out.index.attach(id, id);

  std::vector<TreeEdge> incomplete;
  for (const TreeEdge& e : jt.edges())
    if (!isComplete(gm, e.separator)) incomplete.push_back(e);

  std::map<ClusterId, ClusterId> alias;  // merged-away id -> surviving id
  auto resolve = [&](ClusterId x) {
    while (alias.contains(x)) x = alias.at(x);
    return x;
  };
  for (const TreeEdge& e : incomplete) {
    const ClusterId a = resolve(e.a), b = resolve(e.b);
    const ClusterId keep = std::min(a, b), gone = std::max(a, b);
    out.tree.mergeInto(gone, keep);
    out.index.mergeMps(gone, keep);
    alias[gone] = keep;
  }
  return out;
}

}  // namespace bnic
