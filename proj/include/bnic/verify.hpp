// Independent validity checks over a CompiledModel, decomposition equality
// and a stability measure between two trees.
#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bnic/compile.hpp"
#include "bnic/model.hpp"
#include "bnic/mpd.hpp"

namespace bnic {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string diagnostic;
};

struct ValidityReport {
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }

  const CheckResult* firstFailure() const {
    for (const auto& c : checks)
      if (!c.passed) return &c;
    return nullptr;
  }

  const CheckResult& check(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw std::out_of_range("no check named " + std::string(name));
  }
};

namespace detail {

inline std::string describe(const VarSet& s) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (VarId v : s) {
    os << (first ? "" : ",") << raw(v);
    first = false;
  }
  os << '}';
  return os.str();
}

inline std::string treeShape(const ClusterTree& t) {
  if (t.isTree()) return {};
  std::ostringstream os;
  os << t.size() << " clusters, " << t.edgeCount() << " edges, " << t.components().size() << " components";
  return os.str();
}

/// For every vertex, the clusters holding it must induce a connected subtree.
inline std::string runningIntersection(const ClusterTree& t) {
  std::map<VarId, std::vector<ClusterId>> holders;
  for (const auto& [id, c] : t.clusters())
    for (VarId v : c.vars) holders[v].push_back(id);
  for (const auto& [v, hs] : holders) {
    const std::set<ClusterId> members(hs.begin(), hs.end());
    std::set<ClusterId> seen{hs.front()};
    std::vector<ClusterId> stack{hs.front()};
    while (!stack.empty()) {
      const ClusterId x = stack.back();
      stack.pop_back();
      for (const auto& [n, sep] : t.neighbors(x))
        if (members.contains(n) && seen.insert(n).second) stack.push_back(n);
    }
    if (seen.size() != members.size())
      return "clusters containing vertex " + std::to_string(raw(v)) + " are not connected";
  }
  return {};
}

inline std::string separatorsAreIntersections(const ClusterTree& t) {
  for (const TreeEdge& e : t.edges())
    if (e.separator != intersect(t.vars(e.a), t.vars(e.b)))
      return "separator " + describe(e.separator) + " between c" + std::to_string(raw(e.a)) + " and c" +
             std::to_string(raw(e.b)) + " is not their intersection";
  return {};
}

inline std::string familyCoverage(const Dag& g, const ClusterTree& t) {
  for (VarId v : g.nodes()) {
    const auto host = t.familyHost(v);
    if (!host) return "variable " + g.variables().name(v) + " has no host cluster";
    if (!t.contains(*host)) return "variable " + g.variables().name(v) + " hosted by missing cluster";
    if (!isSubset(g.family(v), t.vars(*host)))
      return "host of " + g.variables().name(v) + " does not contain its family";
  }
  for (const auto& [v, host] : t.familyMap())
    if (!g.contains(v)) return "retired variable " + std::to_string(raw(v)) + " still hosted";
  return {};
}

}  // namespace detail

/// Cluster and separator vertex-set multisets.
inline std::vector<VarSet> clusterMultiset(const ClusterTree& t) {
  std::vector<VarSet> out;
  for (const auto& [id, c] : t.clusters()) out.push_back(c.vars);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<VarSet> separatorMultiset(const ClusterTree& t) {
  std::vector<VarSet> out;
  for (const TreeEdge& e : t.edges()) out.push_back(e.separator);
  std::sort(out.begin(), out.end());
  return out;
}

/// Equality of MPD trees up to cluster and separator multisets.
inline bool mpdEqual(const ClusterTree& a, const ClusterTree& b) {
  return clusterMultiset(a) == clusterMultiset(b) && separatorMultiset(a) == separatorMultiset(b);
}

/// Share of the clusters of `now` whose vertex set also occurs in `before`.
inline double stability(const ClusterTree& before, const ClusterTree& now) {
  if (now.empty()) return before.empty() ? 1.0 : 0.0;
  std::set<VarSet> old;
  for (const auto& [id, c] : before.clusters()) old.insert(c.vars);
  std::size_t kept = 0;
  for (const auto& [id, c] : now.clusters())
    if (old.contains(c.vars)) ++kept;
  return static_cast<double>(kept) / static_cast<double>(now.size());
}

inline ValidityReport validate(const CompiledModel& m) {
  ValidityReport r;
  auto add = [&](std::string name, std::string failure) {
    const bool ok = failure.empty();
    r.checks.push_back({std::move(name), ok, std::move(failure)});
  };
  const ClusterTree& jt = m.junctionTree;
  const ClusterTree& mpd = m.mpdTree;

  add("moral-graph", m.moral == moralize(m.dag) ? "" : "moral graph differs from moralize(network)");

  std::string base;
  if (!(m.triangulation.base == m.moral)) base = "triangulation base differs from the moral graph";
  for (const auto& [a, b] : m.triangulation.fill) {
    if (!m.moral.hasVertex(a) || !m.moral.hasVertex(b)) base = "fill edge touches a missing vertex";
    else if (m.moral.hasEdge(a, b)) base = "fill edge duplicates a moral edge";
    if (!base.empty()) break;
  }
  add("triangulation-base", base);

  UndirectedGraph h;
  std::string chordal;
  if (base.empty()) {
    h = m.triangulation.triangulated();
    if (const auto c = isChordal(h); !c)
      chordal = "triangulated graph not chordal; missing " + std::to_string(raw(c.witness->first)) + "-" +
                std::to_string(raw(c.witness->second));
  } else {
    chordal = "skipped: invalid base";
  }
  add("triangulation-chordal", chordal);
  add("triangulation-order", chordal.empty() && !isPerfectEliminationOrder(h, m.triangulation.order)
                                 ? "order is not a perfect elimination order of the triangulated graph"
                                 : "");

  std::string minimal;
  if (chordal.empty()) {
    for (const auto& [a, b] : m.triangulation.fill) {
      UndirectedGraph probe = h;
      probe.removeEdge(a, b);
      if (isChordal(probe)) {
        minimal = "fill edge " + std::to_string(raw(a)) + "-" + std::to_string(raw(b)) + " is redundant";
        break;
      }
    }
  } else {
    minimal = "skipped: not chordal";
  }
  add("triangulation-minimal", minimal);

  add("jt-tree", detail::treeShape(jt));
  add("jt-running-intersection", detail::runningIntersection(jt));
  add("jt-separators", detail::separatorsAreIntersections(jt));

  std::string complete, maximal;
  if (chordal.empty()) {
    for (const auto& [id, c] : jt.clusters())
      if (!isComplete(h, c.vars)) {
        complete = "cluster c" + std::to_string(raw(id)) + " is not complete in the triangulated graph";
        break;
      }
    if (clusterMultiset(jt) != extractCliques(h)) maximal = "clusters are not the maximal cliques of the triangulated graph";
  } else {
    complete = maximal = "skipped: not chordal";
  }
  add("jt-cluster-complete", complete);
  add("jt-cluster-maximal", maximal);
  add("jt-family-coverage", detail::familyCoverage(m.dag, jt));

  add("mpd-tree", detail::treeShape(mpd));
  add("mpd-running-intersection", detail::runningIntersection(mpd));
  add("mpd-separators", detail::separatorsAreIntersections(mpd));
  std::string mpdComplete;
  for (const TreeEdge& e : mpd.edges())
    if (!isComplete(m.moral, e.separator)) {
      mpdComplete = "MPD separator " + detail::describe(e.separator) + " incomplete in the moral graph";
      break;
    }
  add("mpd-separator-complete", mpdComplete);
  add("mpd-family-coverage", detail::familyCoverage(m.dag, mpd));
  add("mpd-matches-aggregation",
      mpdEqual(mpd, aggregateCliques(jt, m.moral).tree) ? "" : "MPD tree differs from aggregating the junction tree");

  std::string index;
  {
    std::set<ClusterId> seen;
    for (const auto& [mps, cliques] : m.index.cliquesOf) {
      if (!mpd.contains(mps)) { index = "index names missing MPS"; break; }
      VarSet u;
      for (ClusterId c : cliques) {
        if (!jt.contains(c)) { index = "index names missing clique"; break; }
        if (!seen.insert(c).second) { index = "clique in two MPSs"; break; }
        if (m.index.mpsOf.count(c) == 0 || m.index.mpsOf.at(c) != mps) { index = "reverse map disagrees"; break; }
        u.insert(jt.vars(c).begin(), jt.vars(c).end());
      }
      if (!index.empty()) break;
      if (u != mpd.vars(mps)) { index = "MPS c" + std::to_string(raw(mps)) + " is not the union of its cliques"; break; }
    }
    if (index.empty() && (seen.size() != jt.size() || m.index.cliquesOf.size() != mpd.size()))
      index = "index does not partition the junction tree";
    if (index.empty())
      for (const auto& [v, c] : jt.familyMap()) {
        const auto mx = mpd.familyHost(v);
        if (!mx || m.index.mpsOf.count(c) == 0 || m.index.mpsOf.at(c) != *mx) {
          index = "M_X is not the MPS of C_X for variable " + std::to_string(raw(v));
          break;
        }
      }
  }
  add("mpd-index", index);
  return r;
}

}  // namespace bnic
