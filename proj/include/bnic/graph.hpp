// Variable identity, directed and undirected graphs, moralization and the
// elementary predicates shared by the compile pipeline and the incremental
// engine.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bnic {

enum class VarId : std::uint32_t {};
enum class ClusterId : std::uint32_t {};

constexpr std::uint32_t raw(VarId v) noexcept { return static_cast<std::uint32_t>(v); }
constexpr std::uint32_t raw(ClusterId c) noexcept { return static_cast<std::uint32_t>(c); }

inline std::ostream& operator<<(std::ostream& os, VarId v) { return os << 'v' << raw(v); }
inline std::ostream& operator<<(std::ostream& os, ClusterId c) { return os << 'c' << raw(c); }

using VarSet = std::set<VarId>;

/// Unordered vertex pair, stored with the smaller id first.
using Edge = std::pair<VarId, VarId>;
using EdgeSet = std::set<Edge>;

inline Edge makeEdge(VarId a, VarId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

inline bool isSubset(const VarSet& a, const VarSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline VarSet intersect(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

inline std::size_t intersectionSize(const VarSet& a, const VarSet& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

inline VarSet unite(const VarSet& a, const VarSet& b) {
  VarSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

/// Name <-> dense id map. Ids are handed out in creation order and never
/// reused, so a retired id stays invalid for the lifetime of the table.
class VariableTable {
 public:
  VarId add(std::string name) {
    if (name.empty()) throw std::invalid_argument("variable name must be non-empty");
    if (ids_.contains(name)) throw std::invalid_argument("duplicate variable name '" + name + "'");
    const VarId id{static_cast<std::uint32_t>(names_.size())};
    ids_.emplace(name, id);
    names_.push_back(std::move(name));
    alive_.push_back(true);
    ++live_;
    return id;
  }

  void retire(VarId v) {
    check(v);
    ids_.erase(names_[raw(v)]);
    alive_[raw(v)] = false;
    --live_;
  }

  bool contains(VarId v) const { return raw(v) < alive_.size() && alive_[raw(v)]; }

  std::optional<VarId> find(std::string_view name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  VarId id(std::string_view name) const {
    if (auto v = find(name)) return *v;
    throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
  }

  /// Retired ids keep their name so old traces stay printable.
  const std::string& name(VarId v) const {
    if (raw(v) >= names_.size()) throw std::out_of_range("variable id out of range");
    return names_[raw(v)];
  }

  std::size_t size() const noexcept { return live_; }
  std::uint32_t issued() const noexcept { return static_cast<std::uint32_t>(names_.size()); }

  std::vector<VarId> ids() const {
    std::vector<VarId> out;
    out.reserve(live_);
    for (std::uint32_t i = 0; i < alive_.size(); ++i)
      if (alive_[i]) out.push_back(VarId{i});
    return out;
  }

 private:
  void check(VarId v) const {
    if (!contains(v)) throw std::invalid_argument("unknown or retired variable id " + std::to_string(raw(v)));
  }

  std::vector<std::string> names_;
  std::vector<bool> alive_;
  std::map<std::string, VarId, std::less<>> ids_;
  std::size_t live_ = 0;
};

/// Directed acyclic graph over a variable table. Arcs remember their
/// insertion order so serialization and node-removal expansion are stable.
class Dag {
 public:
  const VariableTable& variables() const noexcept { return vars_; }

  VarId addNode(std::string name) {
    const VarId v = vars_.add(std::move(name));
    parents_[v];
    children_[v];
    return v;
  }

  void removeNode(VarId v) {
    requireNode(v);
    if (!parents_.at(v).empty() || !children_.at(v).empty())
      throw std::invalid_argument("cannot remove '" + vars_.name(v) + "': node still has incident arcs");
    parents_.erase(v);
    children_.erase(v);
    vars_.retire(v);
  }

  void addArc(VarId parent, VarId child) {
    requireNode(parent);
    requireNode(child);
    if (parent == child) throw std::invalid_argument("self-loop on '" + vars_.name(parent) + "'");
    if (hasArc(parent, child))
      throw std::invalid_argument("duplicate arc " + vars_.name(parent) + " -> " + vars_.name(child));
    if (reaches(child, parent))
      throw std::invalid_argument("arc " + vars_.name(parent) + " -> " + vars_.name(child) + " would create a cycle");
    parents_[child].insert(parent);
    children_[parent].insert(child);
    arcSeq_[{parent, child}] = nextSeq_++;
  }

  void removeArc(VarId parent, VarId child) {
    requireNode(parent);
    requireNode(child);
    if (!hasArc(parent, child))
      throw std::invalid_argument("no arc " + vars_.name(parent) + " -> " + vars_.name(child));
    parents_[child].erase(parent);
    children_[parent].erase(child);
    arcSeq_.erase({parent, child});
  }

  bool contains(VarId v) const { return vars_.contains(v); }

  bool hasArc(VarId parent, VarId child) const {
    auto it = children_.find(parent);
    return it != children_.end() && it->second.contains(child);
  }

  /// True iff a directed path from -> ... -> to exists (from == to counts).
  bool reaches(VarId from, VarId to) const {
    std::vector<VarId> stack{from};
    VarSet seen{from};
    while (!stack.empty()) {
      const VarId v = stack.back();
      stack.pop_back();
      if (v == to) return true;
      for (VarId c : children_.at(v))
        if (seen.insert(c).second) stack.push_back(c);
    }
    return false;
  }

  const VarSet& parents(VarId v) const {
    requireNode(v);
    return parents_.at(v);
  }
  const VarSet& children(VarId v) const {
    requireNode(v);
    return children_.at(v);
  }

  /// {v} ∪ parents(v)
  VarSet family(VarId v) const {
    VarSet f = parents(v);
    f.insert(v);
    return f;
  }

  std::vector<VarId> nodes() const { return vars_.ids(); }
  std::size_t size() const noexcept { return vars_.size(); }

  /// Arcs as (parent, child) in insertion order.
  std::vector<std::pair<VarId, VarId>> arcs() const {
    std::vector<std::pair<std::uint64_t, std::pair<VarId, VarId>>> seq;
    seq.reserve(arcSeq_.size());
    for (const auto& [arc, s] : arcSeq_) seq.push_back({s, arc});
    std::sort(seq.begin(), seq.end());
    std::vector<std::pair<VarId, VarId>> out;
    out.reserve(seq.size());
    for (const auto& [s, arc] : seq) out.push_back(arc);
    return out;
  }

  /// Incident arcs of v as (parent, child) in insertion order.
  std::vector<std::pair<VarId, VarId>> incidentArcs(VarId v) const {
    requireNode(v);
    std::vector<std::pair<VarId, VarId>> out;
    for (const auto& arc : arcs())
      if (arc.first == v || arc.second == v) out.push_back(arc);
    return out;
  }

  std::size_t arcCount() const noexcept { return arcSeq_.size(); }

 private:
  void requireNode(VarId v) const {
    if (!vars_.contains(v)) throw std::invalid_argument("unknown or retired variable id " + std::to_string(raw(v)));
  }

  VariableTable vars_;
  std::map<VarId, VarSet> parents_;
  std::map<VarId, VarSet> children_;
  std::map<std::pair<VarId, VarId>, std::uint64_t> arcSeq_;
  std::uint64_t nextSeq_ = 0;
};

/// Symmetric adjacency over a subset of variable ids. Houses the moral
/// graph, induced subgraphs of it, and triangulated graphs.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  explicit UndirectedGraph(const VarSet& vertices) {
    for (VarId v : vertices) adj_[v];
  }

  void addVertex(VarId v) { adj_[v]; }

  void removeVertex(VarId v) {
    auto it = adj_.find(v);
    if (it == adj_.end()) return;
    for (VarId n : it->second) adj_[n].erase(v);
    adj_.erase(it);
  }

  bool hasVertex(VarId v) const { return adj_.contains(v); }

  void addEdge(VarId a, VarId b) {
    if (a == b) throw std::invalid_argument("self-loop in undirected graph");
    require(a);
    require(b);
    adj_[a].insert(b);
    adj_[b].insert(a);
  }

  void removeEdge(VarId a, VarId b) {
    require(a);
    require(b);
    adj_[a].erase(b);
    adj_[b].erase(a);
  }

  bool hasEdge(VarId a, VarId b) const {
    auto it = adj_.find(a);
    return it != adj_.end() && it->second.contains(b);
  }

  const VarSet& neighbors(VarId v) const {
    auto it = adj_.find(v);
    if (it == adj_.end()) throw std::invalid_argument("vertex " + std::to_string(raw(v)) + " not in graph");
    return it->second;
  }

  VarSet vertices() const {
    VarSet out;
    for (const auto& [v, n] : adj_) out.insert(out.end(), v);
    return out;
  }

  const std::map<VarId, VarSet>& adjacency() const noexcept { return adj_; }

  std::size_t vertexCount() const noexcept { return adj_.size(); }

  std::size_t edgeCount() const {
    std::size_t twice = 0;
    for (const auto& [v, n] : adj_) twice += n.size();
    return twice / 2;
  }

  EdgeSet edges() const {
    EdgeSet out;
    for (const auto& [v, ns] : adj_)
      for (VarId n : ns)
        if (v < n) out.insert(out.end(), Edge{v, n});
    return out;
  }

  bool operator==(const UndirectedGraph&) const = default;

 private:
  void require(VarId v) const {
    if (!adj_.contains(v)) throw std::invalid_argument("vertex " + std::to_string(raw(v)) + " not in graph");
  }

  std::map<VarId, VarSet> adj_;
};

enum class LinkChange { Added, Deleted };

struct Link {
  Edge edge;
  LinkChange change;
  bool operator==(const Link&) const = default;
};

/// Moral links touched by one modification, in discovery order.
using LinkList = std::vector<Link>;

/// Edge {u,v} iff u->v, v->u, or u and v share a child.
inline UndirectedGraph moralize(const Dag& g) {
  UndirectedGraph m;
  for (VarId v : g.nodes()) m.addVertex(v);
  for (VarId v : g.nodes()) {
    const VarSet& ps = g.parents(v);
    for (VarId p : ps) m.addEdge(p, v);
    for (auto i = ps.begin(); i != ps.end(); ++i)
      for (auto j = std::next(i); j != ps.end(); ++j) m.addEdge(*i, *j);
  }
  return m;
}

inline UndirectedGraph inducedSubgraph(const UndirectedGraph& g, const VarSet& vs) {
  UndirectedGraph out;
  for (VarId v : vs) {
    if (!g.hasVertex(v)) throw std::invalid_argument("inducedSubgraph: vertex " + std::to_string(raw(v)) + " not in graph");
    out.addVertex(v);
  }
  for (VarId v : vs)
    for (VarId n : g.neighbors(v))
      if (v < n && vs.contains(n)) out.addEdge(v, n);
  return out;
}

inline bool isComplete(const UndirectedGraph& g, const VarSet& vs) {
  for (auto i = vs.begin(); i != vs.end(); ++i) {
    const VarSet& ni = g.neighbors(*i);
    for (auto j = std::next(i); j != vs.end(); ++j)
      if (!ni.contains(*j)) return false;
  }
  return true;
}

/// Maximum cardinality search. Returns vertices in visit order; ties go to
/// the smallest id. The reverse of this order is a perfect elimination
/// order iff the graph is chordal.
inline std::vector<VarId> maximumCardinalitySearch(const UndirectedGraph& g) {
  std::map<VarId, std::size_t> weight;
  // Ordered by (weight, inverted id) descending: heaviest first, then smallest id.
  std::set<std::pair<std::size_t, std::uint32_t>, std::greater<>> queue;
  auto key = [](std::size_t w, VarId v) { return std::pair{w, UINT32_MAX - raw(v)}; };
  for (const auto& [v, n] : g.adjacency()) {
    weight[v] = 0;
    queue.insert(key(0, v));
  }
  std::vector<VarId> order;
  order.reserve(weight.size());
  VarSet visited;
  while (!queue.empty()) {
    const auto top = *queue.begin();
    queue.erase(queue.begin());
    const VarId v{UINT32_MAX - top.second};
    order.push_back(v);
    visited.insert(v);
    for (VarId n : g.neighbors(v)) {
      if (visited.contains(n)) continue;
      auto& w = weight[n];
      queue.erase(key(w, n));
      ++w;
      queue.insert(key(w, n));
    }
  }
  return order;
}

/// Reverse MCS order; a perfect elimination order when g is chordal.
inline std::vector<VarId> perfectEliminationOrder(const UndirectedGraph& g) {
  auto order = maximumCardinalitySearch(g);
  std::reverse(order.begin(), order.end());
  return order;
}

struct ChordalityResult {
  bool chordal = true;
  /// A missing edge that elimination along the MCS order would have to add.
  std::optional<Edge> witness;
  explicit operator bool() const noexcept { return chordal; }
};

/// Zero-fill test over the MCS order: every vertex's earlier-visited
/// neighbors must be pairwise adjacent.
inline ChordalityResult isChordal(const UndirectedGraph& g) {
  const auto order = maximumCardinalitySearch(g);
  VarSet visited;
  for (VarId v : order) {
    std::vector<VarId> earlier;
    for (VarId n : g.neighbors(v))
      if (visited.contains(n)) earlier.push_back(n);
    for (std::size_t i = 0; i < earlier.size(); ++i)
      for (std::size_t j = i + 1; j < earlier.size(); ++j)
        if (!g.hasEdge(earlier[i], earlier[j])) return {false, makeEdge(earlier[i], earlier[j])};
    visited.insert(v);
  }
  return {};
}

}  // namespace bnic
