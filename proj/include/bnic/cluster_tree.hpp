// A tree of vertex-set clusters with separator-labelled edges. Used for both
// the junction tree and the maximal prime subgraph decomposition tree.
#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "bnic/graph.hpp"

namespace bnic {

struct Cluster {
  VarSet vars;
  bool marked = false;
};

struct TreeEdge {
  ClusterId a;
  ClusterId b;
  VarSet separator;
};

class ClusterTree {
 public:
  using Neighbors = std::map<ClusterId, VarSet>;

  ClusterId addCluster(VarSet vars, bool marked = false) {
    const ClusterId id{nextId_++};
    clusters_.emplace(id, Cluster{std::move(vars), marked});
    adj_[id];
    return id;
  }

  /// Inserts a cluster under a caller-chosen id; later fresh ids skip past it.
  void insertCluster(ClusterId id, VarSet vars, bool marked = false) {
    if (clusters_.contains(id)) throw std::invalid_argument("cluster id already in use");
    clusters_.emplace(id, Cluster{std::move(vars), marked});
    adj_[id];
    nextId_ = std::max(nextId_, raw(id) + 1);
  }

  /// Removes the cluster, its incident edges and any family entries on it.
  void removeCluster(ClusterId id) {
    require(id);
    for (const auto& [n, sep] : adj_.at(id)) adj_.at(n).erase(id);
    adj_.erase(id);
    clusters_.erase(id);
    std::erase_if(family_, [id](const auto& kv) { return kv.second == id; });
  }

  void link(ClusterId a, ClusterId b, VarSet separator) {
    require(a);
    require(b);
    if (a == b) throw std::invalid_argument("cluster self-link");
    adj_.at(a)[b] = separator;
    adj_.at(b)[a] = std::move(separator);
  }

  void unlink(ClusterId a, ClusterId b) {
    require(a);
    require(b);
    adj_.at(a).erase(b);
    adj_.at(b).erase(a);
  }

  bool contains(ClusterId id) const { return clusters_.contains(id); }
  bool adjacent(ClusterId a, ClusterId b) const {
    auto it = adj_.find(a);
    return it != adj_.end() && it->second.contains(b);
  }

  const Cluster& cluster(ClusterId id) const {
    require(id);
    return clusters_.at(id);
  }
  Cluster& cluster(ClusterId id) {
    require(id);
    return clusters_.at(id);
  }
  const VarSet& vars(ClusterId id) const { return cluster(id).vars; }

  const VarSet& separator(ClusterId a, ClusterId b) const {
    require(a);
    auto it = adj_.at(a).find(b);
    if (it == adj_.at(a).end()) throw std::invalid_argument("clusters are not adjacent");
    return it->second;
  }

  void setSeparator(ClusterId a, ClusterId b, VarSet sep) {
    if (!adjacent(a, b)) throw std::invalid_argument("clusters are not adjacent");
    adj_.at(a)[b] = sep;
    adj_.at(b)[a] = std::move(sep);
  }

  const Neighbors& neighbors(ClusterId id) const {
    require(id);
    return adj_.at(id);
  }

  const std::map<ClusterId, Cluster>& clusters() const noexcept { return clusters_; }
  std::size_t size() const noexcept { return clusters_.size(); }
  bool empty() const noexcept { return clusters_.empty(); }

  std::vector<ClusterId> ids() const {
    std::vector<ClusterId> out;
    out.reserve(clusters_.size());
    for (const auto& [id, c] : clusters_) out.push_back(id);
    return out;
  }

  /// Edges with a < b, ascending.
  std::vector<TreeEdge> edges() const {
    std::vector<TreeEdge> out;
    for (const auto& [a, ns] : adj_)
      for (const auto& [b, sep] : ns)
        if (a < b) out.push_back({a, b, sep});
    return out;
  }

  std::size_t edgeCount() const {
    std::size_t twice = 0;
    for (const auto& [a, ns] : adj_) twice += ns.size();
    return twice / 2;
  }

  /// Merges `from` into its neighbor `into`: vertex sets are united, the
  /// remaining edges of `from` move to `into` with their separators, and
  /// family entries follow.
  void mergeInto(ClusterId from, ClusterId into) {
    if (!adjacent(from, into)) throw std::invalid_argument("mergeInto: clusters are not adjacent");
    Cluster& dst = clusters_.at(into);
    const Cluster& src = clusters_.at(from);
    dst.vars.insert(src.vars.begin(), src.vars.end());
    dst.marked = dst.marked || src.marked;
    const Neighbors moved = adj_.at(from);
    for (const auto& [n, sep] : moved) {
      adj_.at(n).erase(from);
      if (n == into) continue;
      adj_.at(into)[n] = sep;
      adj_.at(n)[into] = sep;
    }
    adj_.erase(from);
    clusters_.erase(from);
    for (auto& [v, host] : family_)
      if (host == from) host = into;
  }

  std::vector<std::vector<ClusterId>> components() const {
    std::vector<std::vector<ClusterId>> out;
    std::set<ClusterId> seen;
    for (const auto& [root, c] : clusters_) {
      if (seen.contains(root)) continue;
      std::vector<ClusterId> comp;
      std::deque<ClusterId> queue{root};
      seen.insert(root);
      while (!queue.empty()) {
        const ClusterId x = queue.front();
        queue.pop_front();
        comp.push_back(x);
        for (const auto& [n, sep] : adj_.at(x))
          if (seen.insert(n).second) queue.push_back(n);
      }
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
    return out;
  }

  bool isTree() const { return components().size() <= 1 && edgeCount() + (empty() ? 0 : 1) == size(); }

  /// Cluster path from -> to, inclusive; empty if unreachable.
  std::vector<ClusterId> path(ClusterId from, ClusterId to) const {
    require(from);
    require(to);
    std::map<ClusterId, ClusterId> parent;
    std::deque<ClusterId> queue{from};
    parent[from] = from;
    while (!queue.empty()) {
      const ClusterId x = queue.front();
      queue.pop_front();
      if (x == to) break;
      for (const auto& [n, sep] : adj_.at(x))
        if (parent.emplace(n, x).second) queue.push_back(n);
    }
    if (!parent.contains(to)) return {};
    std::vector<ClusterId> out{to};
    while (out.back() != from) out.push_back(parent.at(out.back()));
    std::reverse(out.begin(), out.end());
    return out;
  }

  void setFamilyHost(VarId v, ClusterId host) {
    require(host);
    family_[v] = host;
  }
  std::optional<ClusterId> familyHost(VarId v) const {
    auto it = family_.find(v);
    if (it == family_.end()) return std::nullopt;
    return it->second;
  }
  void eraseFamily(VarId v) { family_.erase(v); }
  const std::map<VarId, ClusterId>& familyMap() const noexcept { return family_; }

  void clearMarks() {
    for (auto& [id, c] : clusters_) c.marked = false;
  }

  std::uint32_t nextId() const noexcept { return nextId_; }

 private:
  void require(ClusterId id) const {
    if (!clusters_.contains(id)) throw std::invalid_argument("unknown cluster id " + std::to_string(raw(id)));
  }

  std::map<ClusterId, Cluster> clusters_;
  std::map<ClusterId, Neighbors> adj_;
  std::map<VarId, ClusterId> family_;
  std::uint32_t nextId_ = 0;
};

struct Absorption {
  ClusterId absorbed;
  ClusterId into;
};

/// Merges every cluster that is a subset of an adjacent cluster into that
/// neighbor until all clusters are maximal. Equal neighbors collapse into the
/// smaller id. When `scope` is given only edges touching it are examined
/// (and clusters created by merges stay in scope).
inline std::vector<Absorption> absorbNonMaximal(ClusterTree& tree, std::optional<std::set<ClusterId>> scope = std::nullopt) {
  std::vector<Absorption> merges;
  for (bool changed = true; changed;) {
    changed = false;
    for (const TreeEdge& e : tree.edges()) {
      if (scope && !scope->contains(e.a) && !scope->contains(e.b)) continue;
      const VarSet& va = tree.vars(e.a);
      const VarSet& vb = tree.vars(e.b);
      std::optional<Absorption> m;
      if (isSubset(va, vb))
        m = va.size() == vb.size() ? Absorption{e.b, e.a} : Absorption{e.a, e.b};
      else if (isSubset(vb, va))
        m = Absorption{e.b, e.a};
      if (!m) continue;
      tree.mergeInto(m->absorbed, m->into);
      if (scope) scope->insert(m->into);
      merges.push_back(*m);
      changed = true;
      break;
    }
  }
  return merges;
}

}  // namespace bnic
