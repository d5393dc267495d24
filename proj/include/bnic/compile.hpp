// From a moral graph to a junction tree: greedy min-fill triangulation,
// recursive thinning to a minimal triangulation, clique extraction and
// maximum-weight spanning tree assembly.
#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "bnic/cluster_tree.hpp"
#include "bnic/graph.hpp"

namespace bnic {

struct Triangulation {
  UndirectedGraph base;
  /// Elimination order. After thinning this is a perfect elimination order
  /// of base ∪ fill.
  std::vector<VarId> order;
  EdgeSet fill;

  UndirectedGraph triangulated() const {
    UndirectedGraph g = base;
    for (const auto& [a, b] : fill) g.addEdge(a, b);
    return g;
  }
};

namespace detail {

/// Dense scratch copy of an undirected graph for elimination.
class EliminationGraph {
 public:
  explicit EliminationGraph(const UndirectedGraph& g) {
    for (const auto& [v, ns] : g.adjacency()) {
      index_[v] = ids_.size();
      ids_.push_back(v);
    }
    n_ = ids_.size();
    adj_.assign(n_ * n_, 0);
    nbrs_.resize(n_);
    for (const auto& [v, ns] : g.adjacency())
      for (VarId u : ns) {
        adj_[index_[v] * n_ + index_[u]] = 1;
        nbrs_[index_[v]].push_back(index_[u]);
      }
  }

  std::size_t size() const { return n_; }
  VarId id(std::size_t i) const { return ids_[i]; }
  bool adjacent(std::size_t a, std::size_t b) const { return adj_[a * n_ + b] != 0; }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return nbrs_[i]; }

  std::size_t fillCount(std::size_t v) const {
    const auto& ns = nbrs_[v];
    std::size_t fill = 0;
    for (std::size_t i = 0; i < ns.size(); ++i)
      for (std::size_t j = i + 1; j < ns.size(); ++j)
        if (!adjacent(ns[i], ns[j])) ++fill;
    return fill;
  }

  /// Connects the neighbors of v pairwise, then detaches v. Returns the added pairs.
  std::vector<std::pair<std::size_t, std::size_t>> eliminate(std::size_t v) {
    std::vector<std::pair<std::size_t, std::size_t>> added;
    const auto ns = nbrs_[v];
    for (std::size_t i = 0; i < ns.size(); ++i)
      for (std::size_t j = i + 1; j < ns.size(); ++j)
        if (!adjacent(ns[i], ns[j])) {
          connect(ns[i], ns[j]);
          added.emplace_back(ns[i], ns[j]);
        }
    for (std::size_t u : ns) {
      adj_[u * n_ + v] = adj_[v * n_ + u] = 0;
      std::erase(nbrs_[u], v);
    }
    nbrs_[v].clear();
    return added;
  }

 private:
  void connect(std::size_t a, std::size_t b) {
    adj_[a * n_ + b] = adj_[b * n_ + a] = 1;
    nbrs_[a].push_back(b);
    nbrs_[b].push_back(a);
  }

  std::map<VarId, std::size_t> index_;
  std::vector<VarId> ids_;
  std::size_t n_ = 0;
  std::vector<std::uint8_t> adj_;
  std::vector<std::vector<std::size_t>> nbrs_;
};

}  // namespace detail

/// Greedy elimination by minimum fill-in; ties go to the smallest id.
inline Triangulation triangulateMinFill(const UndirectedGraph& g) {
  Triangulation t{g, {}, {}};
  detail::EliminationGraph eg(g);
  const std::size_t n = eg.size();
  std::vector<std::size_t> score(n);
  std::vector<bool> done(n, false);
  for (std::size_t i = 0; i < n; ++i) score[i] = eg.fillCount(i);

  t.order.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i] && (best == n || score[i] < score[best])) best = i;

    // Scores can change only within distance two of the eliminated vertex.
    std::vector<std::size_t> touched = eg.neighbors(best);
    for (std::size_t u : eg.neighbors(best))
      for (std::size_t w : eg.neighbors(u)) touched.push_back(w);

    for (const auto& [a, b] : eg.eliminate(best)) t.fill.insert(makeEdge(eg.id(a), eg.id(b)));
    done[best] = true;
    t.order.push_back(eg.id(best));

    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (std::size_t u : touched)
      if (!done[u]) score[u] = eg.fillCount(u);
  }
  return t;
}

/// Removes redundant fill edges until none can be dropped without losing
/// chordality. A fill edge {u,v} of a chordal graph is removable iff the
/// common neighborhood of u and v is complete.
inline Triangulation recursiveThinning(Triangulation t) {
  UndirectedGraph h = t.triangulated();
  if (!isChordal(h)) throw std::invalid_argument("recursiveThinning: triangulation is not chordal");
  for (bool removed = true; removed;) {
    removed = false;
    for (auto it = t.fill.begin(); it != t.fill.end(); ++it) {
      const auto [u, v] = *it;
      if (isComplete(h, intersect(h.neighbors(u), h.neighbors(v)))) {
        h.removeEdge(u, v);
        t.fill.erase(it);
        removed = true;
        break;
      }
    }
  }
  t.order = perfectEliminationOrder(h);
  return t;
}

/// Maximal cliques of a chordal graph, sorted. Along an MCS order a new
/// clique starts exactly where the count of earlier-visited neighbors fails
/// to grow.
inline std::vector<VarSet> extractCliques(const UndirectedGraph& g) {
  if (!isChordal(g)) throw std::invalid_argument("extractCliques: graph is not chordal");
  const auto order = maximumCardinalitySearch(g);
  std::vector<VarSet> cliques;
  VarSet visited;
  VarSet current;
  std::size_t prevLabel = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const VarId v = order[i];
    VarSet earlier;
    for (VarId n : g.neighbors(v))
      if (visited.contains(n)) earlier.insert(n);
    if (i > 0 && earlier.size() <= prevLabel) cliques.push_back(current);
    current = std::move(earlier);
    current.insert(v);
    prevLabel = current.size() - 1;
    visited.insert(v);
  }
  if (!order.empty()) cliques.push_back(current);
  std::sort(cliques.begin(), cliques.end());
  return cliques;
}

/// Maximum-weight spanning tree of the clique graph with weight |Ci ∩ Cj|.
/// Clusters take ids in the order given; equal weights prefer the smaller
/// id pair. Components are joined to cluster 0 by empty separators.
inline ClusterTree buildJoinTree(const std::vector<VarSet>& cliques) {
  ClusterTree tree;
  std::vector<ClusterId> ids;
  for (const VarSet& c : cliques) ids.push_back(tree.addCluster(c));
  const std::size_t k = cliques.size();
  if (k == 0) return tree;

  std::map<VarId, std::vector<std::size_t>> holders;
  for (std::size_t i = 0; i < k; ++i)
    for (VarId v : cliques[i]) holders[v].push_back(i);
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [v, hs] : holders)
    for (std::size_t a = 0; a < hs.size(); ++a)
      for (std::size_t b = a + 1; b < hs.size(); ++b) pairs.emplace(hs[a], hs[b]);

  struct Candidate {
    std::size_t weight, i, j;
  };
  std::vector<Candidate> cands;
  cands.reserve(pairs.size());
  for (const auto& [i, j] : pairs) cands.push_back({intersectionSize(cliques[i], cliques[j]), i, j});
  std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    return std::pair{x.i, x.j} < std::pair{y.i, y.j};
  });

  std::vector<std::size_t> root(k);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](std::size_t x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (const Candidate& c : cands) {
    const std::size_t ri = find(c.i), rj = find(c.j);
    if (ri == rj) continue;
    root[std::max(ri, rj)] = std::min(ri, rj);
    tree.link(ids[c.i], ids[c.j], intersect(cliques[c.i], cliques[c.j]));
  }
  for (std::size_t i = 1; i < k; ++i) {
    if (find(i) != find(0)) {
      root[find(i)] = find(0);
      tree.link(ids[0], ids[i], {});
    }
  }
  return tree;
}

/// Smallest cluster containing family(v), ties by id; nullopt if none.
inline std::optional<ClusterId> smallestContaining(const ClusterTree& tree, const VarSet& family) {
  std::optional<ClusterId> best;
  for (const auto& [id, c] : tree.clusters()) {
    if (!isSubset(family, c.vars)) continue;
    if (!best || c.vars.size() < tree.vars(*best).size()) best = id;
  }
  return best;
}

/// Hosts every variable whose family lies within the tree's vertex set in
/// the smallest containing cluster. Variables whose family reaches outside
/// the tree (induced subgraphs) are skipped.
inline ClusterTree assignFamilies(const Dag& g, ClusterTree tree) {
  VarSet covered;
  for (const auto& [id, c] : tree.clusters()) covered.insert(c.vars.begin(), c.vars.end());
  for (VarId v : covered) {
    if (!g.contains(v)) continue;
    const VarSet fam = g.family(v);
    if (!isSubset(fam, covered)) continue;
    const auto host = smallestContaining(tree, fam);
    if (!host)
      throw std::logic_error("assignFamilies: no cluster contains the family of '" + g.variables().name(v) + "'");
    tree.setFamilyHost(v, *host);
  }
  return tree;
}

/// Perfect elimination order of the chordal graph whose maximal cliques are
/// the clusters of `tree`: clusters in post-order from the lowest id, each
/// contributing the vertices not shared with its parent.
inline std::vector<VarId> eliminationOrderFromTree(const ClusterTree& tree) {
  std::vector<VarId> order;
  if (tree.empty()) return order;
  const ClusterId root = tree.clusters().begin()->first;
  std::vector<std::pair<ClusterId, std::optional<ClusterId>>> pre{{root, std::nullopt}};
  std::vector<std::pair<ClusterId, std::optional<ClusterId>>> visit;
  while (!pre.empty()) {
    const auto [c, parent] = pre.back();
    pre.pop_back();
    visit.push_back({c, parent});
    for (const auto& [n, sep] : tree.neighbors(c))
      if (n != parent) pre.push_back({n, c});
  }
  for (auto it = visit.rbegin(); it != visit.rend(); ++it) {
    const auto& [c, parent] = *it;
    for (VarId v : tree.vars(c))
      if (!parent || !tree.separator(c, *parent).contains(v)) order.push_back(v);
  }
  return order;
}

/// True iff every vertex's neighbors later in `order` are pairwise adjacent
/// and `order` lists each vertex of `h` exactly once.
inline bool isPerfectEliminationOrder(const UndirectedGraph& h, const std::vector<VarId>& order) {
  if (order.size() != h.vertexCount()) return false;
  std::map<VarId, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i)
    if (!h.hasVertex(order[i]) || !pos.emplace(order[i], i).second) return false;
  for (std::size_t i = 0; i < order.size(); ++i) {
    VarSet later;
    for (VarId n : h.neighbors(order[i]))
      if (pos.at(n) > i) later.insert(n);
    if (!isComplete(h, later)) return false;
  }
  return true;
}

struct JoinTreeResult {
  ClusterTree tree;
  Triangulation triangulation;
};

/// Triangulate, thin, extract cliques, assemble and host families.
inline JoinTreeResult constructJoinTree(const UndirectedGraph& gm, const Dag& g) {
  Triangulation tri = recursiveThinning(triangulateMinFill(gm));
  ClusterTree tree = assignFamilies(g, buildJoinTree(extractCliques(tri.triangulated())));
  return {std::move(tree), std::move(tri)};
}

}  // namespace bnic
