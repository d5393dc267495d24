// Incremental recompilation. Structural edits are applied to the network and
// the moral graph one at a time while the affected maximal prime subgraphs
// are marked; afterwards every connected marked subtree is retriangulated on
// its own induced moral subgraph and spliced back into the junction tree and
// the MPD tree. Everything outside the marked subtrees is left untouched.
#pragma once

#include <deque>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bnic/cluster_tree.hpp"
#include "bnic/compile.hpp"
#include "bnic/graph.hpp"
#include "bnic/model.hpp"
#include "bnic/mpd.hpp"

namespace bnic {

struct AddNode {
  std::string name;
  bool operator==(const AddNode&) const = default;
};
struct RemoveNode {
  VarId node;
  bool operator==(const RemoveNode&) const = default;
};
struct AddArc {
  VarId parent;
  VarId child;
  bool operator==(const AddArc&) const = default;
};
struct RemoveArc {
  VarId parent;
  VarId child;
  bool operator==(const RemoveArc&) const = default;
};

using Modification = std::variant<AddNode, RemoveNode, AddArc, RemoveArc>;

/// Outcome of the marking pass for one modification.
struct MarkStep {
  Modification mod;
  std::optional<VarId> created;      // id assigned by an AddNode
  LinkList links;                    // moral links added or deleted
  std::vector<ClusterId> marked;     // all marked MPSs after this step
  std::vector<VarSet> markedVars;    // their vertex sets at that point
};

/// One retriangulated marked subtree.
struct SpliceRecord {
  VarSet variables;
  std::vector<ClusterId> removedCliques;
  std::vector<ClusterId> removedMps;
  std::vector<ClusterId> addedCliques;  // surviving ids after amalgamation
  std::vector<ClusterId> addedMps;
  std::vector<Absorption> amalgamated;  // junction-tree merges into old clusters
};

struct IncrementalReport {
  std::vector<MarkStep> steps;
  std::vector<SpliceRecord> splices;

  std::size_t markedMpsCount() const { return steps.empty() ? 0 : steps.back().marked.size(); }
};

/// Operates in place on a CompiledModel. `stage` is the per-modification
/// marking pass; `recompileMarked` rebuilds the marked subtrees. Between the
/// two calls the model is intentionally inconsistent: the network and moral
/// graph are new, the trees are old with marks.
class IncrementalEngine {
 public:
  explicit IncrementalEngine(CompiledModel& model) : m_(model) {}

  IncrementalReport apply(std::span<const Modification> mods) {
    IncrementalReport report;
    for (const Modification& mod : mods) report.steps.push_back(stage(mod));
    report.splices = recompileMarked();
    return report;
  }

  MarkStep stage(const Modification& mod) {
    MarkStep step{mod, {}, {}, {}, {}};
    std::visit([&](const auto& m) { applyToDag(m, step); }, mod);
    step.links = modifyMoralGraph(mod);
    std::visit([&](const auto& m) { dispatch(m, step); }, mod);
    for (const auto& [id, c] : m_.mpdTree.clusters())
      if (c.marked) {
        step.marked.push_back(id);
        step.markedVars.push_back(c.vars);
      }
    return step;
  }

  /// Brings the moral graph in line with a modification the network already
  /// reflects. Returns the touched links.
  LinkList modifyMoralGraph(const Modification& mod) {
    LinkList links;
    UndirectedGraph& gm = m_.moral;
    const Dag& g = m_.dag;
    if (const auto* add = std::get_if<AddNode>(&mod)) {
      gm.addVertex(g.variables().id(add->name));
    } else if (const auto* rm = std::get_if<RemoveNode>(&mod)) {
      gm.removeVertex(rm->node);
    } else if (const auto* arc = std::get_if<AddArc>(&mod)) {
      const VarId x = arc->parent, y = arc->child;
      touch(makeEdge(x, y));
      links.push_back({makeEdge(x, y), LinkChange::Added});
      gm.addEdge(x, y);
      for (VarId z : g.parents(y)) {
        if (z == x || gm.hasEdge(x, z)) continue;
        touch(makeEdge(x, z));
        gm.addEdge(x, z);
        links.push_back({makeEdge(x, z), LinkChange::Added});
      }
    } else if (const auto* arc = std::get_if<RemoveArc>(&mod)) {
      const VarId x = arc->parent, y = arc->child;
      auto dropIfUnjustified = [&](VarId a, VarId b) {
        if (!gm.hasEdge(a, b) || moralEdgeJustified(a, b)) return;
        touch(makeEdge(a, b));
        gm.removeEdge(a, b);
        links.push_back({makeEdge(a, b), LinkChange::Deleted});
      };
      dropIfUnjustified(x, y);
      for (VarId z : g.parents(y))
        if (z != x) dropIfUnjustified(x, z);
    }
    return links;
  }

  /// Marks `my` and spreads across every separator that contains both ends
  /// of a deleted link.
  void markRemoveLink(const LinkList& links, ClusterId my, std::optional<ClusterId> caller) {
    mark(my);
    const auto neighbors = m_.mpdTree.neighbors(my);
    for (const auto& [mk, sep] : neighbors) {
      if (mk == caller) continue;
      const bool hit = std::any_of(links.begin(), links.end(), [&](const Link& l) {
        return l.change == LinkChange::Deleted && sep.contains(l.edge.first) && sep.contains(l.edge.second);
      });
      if (hit) markRemoveLink(links, mk, my);
    }
  }

  /// Strips x from `mx`, marks it and follows every separator holding x.
  /// The junction-tree cliques and separators of each visited MPS lose x too.
  void markRemoveNode(VarId x, ClusterId mx, std::optional<ClusterId> caller) {
    m_.mpdTree.cluster(mx).vars.erase(x);
    for (ClusterId c : cliquesOf(mx)) {
      m_.junctionTree.cluster(c).vars.erase(x);
      const auto neighbors = m_.junctionTree.neighbors(c);
      for (const auto& [n, sep] : neighbors)
        if (sep.contains(x)) {
          VarSet s = sep;
          s.erase(x);
          m_.junctionTree.setSeparator(c, n, std::move(s));
        }
    }
    mark(mx);
    const auto neighbors = m_.mpdTree.neighbors(mx);
    for (const auto& [mz, sep] : neighbors) {
      if (mz == caller || !sep.contains(x)) continue;
      VarSet s = sep;
      s.erase(x);
      m_.mpdTree.setSeparator(mx, mz, std::move(s));
      markRemoveNode(x, mz, mx);
    }
  }

  /// New marked singleton clique and MPS, hung off the lowest-id MPS (and
  /// its lowest-id clique) by an empty separator.
  void addNode(VarId x) {
    std::optional<ClusterId> target;
    if (!m_.mpdTree.empty()) target = m_.mpdTree.clusters().begin()->first;
    const ClusterId c = m_.junctionTree.addCluster({x}, true);
    m_.mpdTree.insertCluster(c, {x}, true);
    m_.index.attach(c, c);
    if (target) linkCoupled(c, *target, {});
    m_.junctionTree.setFamilyHost(x, c);
    m_.mpdTree.setFamilyHost(x, c);
  }

  /// For each added link, marks the MPSs between M_Y (host of the child's
  /// family) and the nearest MPS holding the other endpoint. An empty
  /// separator on that path with an unmarked end is cut and replaced by a
  /// direct edge carrying the endpoint.
  void markAddLink(const LinkList& links, VarId child) {
    const ClusterId my = hostMps(child);
    mark(my);
    for (const Link& link : links) {
      if (link.change != LinkChange::Added) continue;
      for (VarId e : {link.edge.first, link.edge.second}) {
        if (m_.mpdTree.vars(my).contains(e)) continue;
        const ClusterId mx = nearestContaining(e, my);
        std::vector<ClusterId> path = m_.mpdTree.path(mx, my);
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
          const ClusterId p = path[i], q = path[i + 1];
          const bool bothMarked = m_.mpdTree.cluster(p).marked && m_.mpdTree.cluster(q).marked;
          if (!m_.mpdTree.separator(p, q).empty() || bothMarked) continue;
          unlinkCoupled(p, q);
          linkCoupled(mx, my, {e});
          path = {mx, my};
          break;
        }
        for (ClusterId m : path) mark(m);
      }
    }
  }

  /// Retriangulates each connected marked subtree and splices the result
  /// into both trees.
  std::vector<SpliceRecord> recompileMarked() {
    std::vector<SpliceRecord> records;
    const auto comps = markedComponents();
    checkMarkingClosure(comps);
    for (const auto& comp : comps) records.push_back(rebuild(comp));
    rejoinFragments();
    m_.triangulation.base = m_.moral;
    m_.triangulation.order = eliminationOrderFromTree(m_.junctionTree);
    if (!m_.junctionTree.isTree() || !m_.mpdTree.isTree())
      throw std::logic_error("incremental splice left a forest");
    touched_.clear();
    return records;
  }

 private:
  // --- marking -----------------------------------------------------------

  void applyToDag(const AddNode& m, MarkStep& step) { step.created = m_.dag.addNode(m.name); }
  void applyToDag(const RemoveNode& m, MarkStep&) { m_.dag.removeNode(m.node); }
  void applyToDag(const AddArc& m, MarkStep&) { m_.dag.addArc(m.parent, m.child); }
  void applyToDag(const RemoveArc& m, MarkStep&) { m_.dag.removeArc(m.parent, m.child); }

  void dispatch(const AddNode&, MarkStep& step) { addNode(*step.created); }

  void dispatch(const RemoveNode& m, MarkStep&) {
    const VarId x = m.node;
    markRemoveNode(x, hostMps(x), std::nullopt);
    m_.junctionTree.eraseFamily(x);
    m_.mpdTree.eraseFamily(x);
    m_.triangulation.base.removeVertex(x);
    std::erase_if(m_.triangulation.fill, [x](const Edge& e) { return e.first == x || e.second == x; });
  }

  void dispatch(const RemoveArc& m, MarkStep& step) {
    const ClusterId my = hostMps(m.child);
    markRemoveLink(step.links, my, std::nullopt);
    // Batch mode only: a link whose arc was added earlier in the same batch
    // need not lie in M_Y. Seed the search where the link actually lives.
    for (const Link& l : step.links) {
      const VarSet& vy = m_.mpdTree.vars(my);
      if (vy.contains(l.edge.first) && vy.contains(l.edge.second)) continue;
      for (const auto& [id, c] : m_.mpdTree.clusters())
        if (c.vars.contains(l.edge.first) && c.vars.contains(l.edge.second)) {
          markRemoveLink(step.links, id, std::nullopt);
          break;
        }
    }
  }

  void dispatch(const AddArc& m, MarkStep& step) { markAddLink(step.links, m.child); }

  bool moralEdgeJustified(VarId a, VarId b) const {
    const Dag& g = m_.dag;
    if (g.hasArc(a, b) || g.hasArc(b, a)) return true;
    return intersectionSize(g.children(a), g.children(b)) > 0;
  }

  void touch(const Edge& e) { touched_.try_emplace(e, m_.moral.hasEdge(e.first, e.second)); }

  void mark(ClusterId mps) {
    m_.mpdTree.cluster(mps).marked = true;
    for (ClusterId c : cliquesOf(mps)) m_.junctionTree.cluster(c).marked = true;
  }

  std::vector<ClusterId> cliquesOf(ClusterId mps) const {
    auto it = m_.index.cliquesOf.find(mps);
    if (it == m_.index.cliquesOf.end()) return {};
    return {it->second.begin(), it->second.end()};
  }

  ClusterId hostMps(VarId x) const {
    const auto c = m_.junctionTree.familyHost(x);
    if (!c) throw std::logic_error("variable '" + m_.dag.variables().name(x) + "' has no host clique");
    return m_.index.mpsOfClique(*c);
  }

  /// Closest MPS to `from` containing x; equidistant candidates resolve to the lowest id.
  ClusterId nearestContaining(VarId x, ClusterId from) const {
    std::vector<ClusterId> level{from};
    std::set<ClusterId> seen{from};
    while (!level.empty()) {
      std::optional<ClusterId> hit;
      for (ClusterId c : level)
        if (m_.mpdTree.vars(c).contains(x) && (!hit || c < *hit)) hit = c;
      if (hit) return *hit;
      std::vector<ClusterId> next;
      for (ClusterId c : level)
        for (const auto& [n, sep] : m_.mpdTree.neighbors(c))
          if (seen.insert(n).second) next.push_back(n);
      level = std::move(next);
    }
    throw std::logic_error("no MPS contains variable '" + m_.dag.variables().name(x) + "'");
  }

  /// The unique junction-tree edge realizing the MPD edge p-q, as (clique of p, clique of q).
  std::pair<ClusterId, ClusterId> jtEdgeBetween(ClusterId p, ClusterId q) const {
    for (ClusterId c : cliquesOf(p))
      for (const auto& [n, sep] : m_.junctionTree.neighbors(c))
        if (m_.index.mpsOfClique(n) == q) return {c, n};
    throw std::logic_error("MPD edge has no junction-tree counterpart");
  }

  ClusterId representativeClique(ClusterId mps, const VarSet& sep) const {
    const auto cs = cliquesOf(mps);
    if (cs.empty()) throw std::logic_error("MPS without cliques");
    for (ClusterId c : cs)
      if (isSubset(sep, m_.junctionTree.vars(c))) return c;
    return cs.front();
  }

  void linkCoupled(ClusterId p, ClusterId q, const VarSet& sep) {
    m_.mpdTree.link(p, q, sep);
    m_.junctionTree.link(representativeClique(p, sep), representativeClique(q, sep), sep);
  }

  void unlinkCoupled(ClusterId p, ClusterId q) {
    const auto [a, b] = jtEdgeBetween(p, q);
    m_.junctionTree.unlink(a, b);
    m_.mpdTree.unlink(p, q);
  }

  // --- splicing ----------------------------------------------------------

  std::vector<std::vector<ClusterId>> markedComponents() const {
    std::vector<std::vector<ClusterId>> out;
    std::set<ClusterId> seen;
    for (const auto& [root, c] : m_.mpdTree.clusters()) {
      if (!c.marked || seen.contains(root)) continue;
      std::vector<ClusterId> comp;
      std::deque<ClusterId> queue{root};
      seen.insert(root);
      while (!queue.empty()) {
        const ClusterId x = queue.front();
        queue.pop_front();
        comp.push_back(x);
        for (const auto& [n, sep] : m_.mpdTree.neighbors(x))
          if (m_.mpdTree.cluster(n).marked && seen.insert(n).second) queue.push_back(n);
      }
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
    return out;
  }

  /// Every moral pair that changed in this batch must be confined to marked
  /// MPSs, and a pair that now exists must fall inside one marked subtree.
  void checkMarkingClosure(const std::vector<std::vector<ClusterId>>& comps) const {
    for (const auto& [e, before] : touched_) {
      const bool now = m_.moral.hasEdge(e.first, e.second);
      if (now == before) continue;
      for (const auto& [id, c] : m_.mpdTree.clusters())
        if (!c.marked && c.vars.contains(e.first) && c.vars.contains(e.second))
          throw std::logic_error("marking missed an MPS holding a changed moral link");
      if (!now) continue;
      const bool covered = std::any_of(comps.begin(), comps.end(), [&](const auto& comp) {
        bool a = false, b = false;
        for (ClusterId m : comp) {
          a = a || m_.mpdTree.vars(m).contains(e.first);
          b = b || m_.mpdTree.vars(m).contains(e.second);
        }
        return a && b;
      });
      if (!covered) throw std::logic_error("added moral link spans two marked subtrees");
    }
  }

  struct Boundary {
    ClusterId inner;  // marked MPS
    ClusterId outer;  // unmarked neighbor
    VarSet separator;
  };

  /// Walks the marked subtree from `ci` without revisiting `cj`, collecting
  /// every separator that leads to an unmarked MPS.
  void collectBoundary(ClusterId ci, std::optional<ClusterId> cj, std::vector<Boundary>& out) const {
    for (const auto& [ck, sep] : m_.mpdTree.neighbors(ci)) {
      if (ck == cj) continue;
      if (m_.mpdTree.cluster(ck).marked)
        collectBoundary(ck, ci, out);
      else
        out.push_back({ci, ck, sep});
    }
  }

  /// Cluster among `candidates` with C ⊇ sep maximizing |C ∩ other|; ties
  /// go to the smaller cluster, then the lower id.
  static std::optional<ClusterId> connectTarget(const ClusterTree& tree, const std::vector<ClusterId>& candidates,
                                                const VarSet& sep, const VarSet& other) {
    std::optional<ClusterId> best;
    std::size_t bestOverlap = 0;
    for (ClusterId c : candidates) {
      const VarSet& v = tree.vars(c);
      if (!isSubset(sep, v)) continue;
      const std::size_t overlap = intersectionSize(v, other);
      if (!best || overlap > bestOverlap ||
          (overlap == bestOverlap && v.size() < tree.vars(*best).size())) {
        best = c;
        bestOverlap = overlap;
      }
    }
    return best;
  }

  SpliceRecord rebuild(const std::vector<ClusterId>& comp) {
    SpliceRecord rec;
    ClusterTree& jt = m_.junctionTree;
    ClusterTree& mpd = m_.mpdTree;

    for (ClusterId m : comp) {
      rec.variables.insert(mpd.vars(m).begin(), mpd.vars(m).end());
      rec.removedMps.push_back(m);
      for (ClusterId c : cliquesOf(m)) rec.removedCliques.push_back(c);
    }
    std::sort(rec.removedCliques.begin(), rec.removedCliques.end());

    const UndirectedGraph sub = inducedSubgraph(m_.moral, rec.variables);
    auto [t, tri] = constructJoinTree(sub, m_.dag);
    auto [tm, tIndex] = aggregateCliques(t, sub);

    std::vector<Boundary> boundary;
    collectBoundary(comp.front(), std::nullopt, boundary);

    // Splice in the fresh structures under new global ids.
    std::map<ClusterId, ClusterId> gid;
    for (const auto& [id, c] : t.clusters()) gid[id] = jt.addCluster(c.vars);
    for (const TreeEdge& e : t.edges()) jt.link(gid.at(e.a), gid.at(e.b), e.separator);
    for (const auto& [id, c] : tm.clusters()) mpd.insertCluster(gid.at(id), c.vars);
    for (const TreeEdge& e : tm.edges()) mpd.link(gid.at(e.a), gid.at(e.b), e.separator);
    for (const auto& [clique, mps] : tIndex.mpsOf) m_.index.attach(gid.at(clique), gid.at(mps));
    std::vector<ClusterId> newMps;
    for (const auto& [id, c] : tm.clusters()) newMps.push_back(gid.at(id));

    // With nothing left to rebuild the outer neighbors are rejoined later.
    if (t.empty()) boundary.clear();

    std::vector<Absorption> jtAmalgamate, mpdAmalgamate;
    for (const Boundary& b : boundary) {
      const auto target = connectTarget(mpd, newMps, b.separator, mpd.vars(b.outer));
      if (!target) throw std::logic_error("boundary separator not covered by any rebuilt MPS");
      const auto [innerClique, outerClique] = jtEdgeBetween(b.inner, b.outer);
      (void)innerClique;
      const auto clique = connectTarget(jt, cliquesOf(*target), b.separator, jt.vars(outerClique));
      if (!clique) throw std::logic_error("boundary separator not covered by any rebuilt clique");
      mpd.link(b.outer, *target, b.separator);
      jt.link(outerClique, *clique, b.separator);
      if (b.separator == mpd.vars(*target)) mpdAmalgamate.push_back({*target, b.outer});
      if (b.separator == jt.vars(*clique)) jtAmalgamate.push_back({*clique, outerClique});
    }

    // Families hosted in the outdated part move into the new subtree.
    std::vector<VarId> rehost;
    const std::set<ClusterId> dead(rec.removedCliques.begin(), rec.removedCliques.end());
    for (const auto& [v, host] : jt.familyMap())
      if (dead.contains(host)) rehost.push_back(v);

    for (ClusterId c : rec.removedCliques) {
      jt.removeCluster(c);
      m_.index.detachClique(c);
    }
    for (ClusterId m : comp) {
      mpd.removeCluster(m);
      m_.index.eraseMps(m);
    }

    for (VarId v : rehost) {
      const auto local = t.familyHost(v);
      if (!local) throw std::logic_error("family of '" + m_.dag.variables().name(v) + "' not inside rebuilt subtree");
      const ClusterId c = gid.at(*local);
      jt.setFamilyHost(v, c);
      mpd.setFamilyHost(v, m_.index.mpsOfClique(c));
    }

    for (const Absorption& a : jtAmalgamate) {
      if (!jt.contains(a.absorbed)) continue;
      const ClusterId owner = m_.index.mpsOfClique(a.absorbed);
      const bool mpsGoesToo = std::any_of(mpdAmalgamate.begin(), mpdAmalgamate.end(),
                                          [&](const Absorption& m) { return m.absorbed == owner && m.into == m_.index.mpsOfClique(a.into); });
      if (!mpsGoesToo) throw std::logic_error("clique amalgamated without its MPS");
      jt.mergeInto(a.absorbed, a.into);
      m_.index.detachClique(a.absorbed);
      rec.amalgamated.push_back(a);
    }
    for (const Absorption& a : mpdAmalgamate) {
      if (!mpd.contains(a.absorbed)) continue;
      mpd.mergeInto(a.absorbed, a.into);
      m_.index.mergeMps(a.absorbed, a.into);
    }

    // Catch-all for maximality around the splice.
    std::set<ClusterId> scope;
    for (const auto& [id, c] : t.clusters())
      if (jt.contains(gid.at(id))) scope.insert(gid.at(id));
    for (const Absorption& a : absorbNonMaximal(jt, scope)) {
      if (m_.index.mpsOfClique(a.absorbed) != m_.index.mpsOfClique(a.into))
        throw std::logic_error("non-maximal clique straddles two MPSs");
      m_.index.detachClique(a.absorbed);
      rec.amalgamated.push_back(a);
    }
    std::set<ClusterId> mpdScope;
    for (ClusterId m : newMps)
      if (mpd.contains(m)) mpdScope.insert(m);
    for (const Absorption& a : absorbNonMaximal(mpd, mpdScope)) m_.index.mergeMps(a.absorbed, a.into);

    for (const auto& [id, c] : t.clusters())
      if (jt.contains(gid.at(id))) rec.addedCliques.push_back(gid.at(id));
    for (ClusterId m : newMps)
      if (mpd.contains(m)) rec.addedMps.push_back(m);

    std::erase_if(m_.triangulation.fill, [&](const Edge& e) {
      return rec.variables.contains(e.first) && rec.variables.contains(e.second);
    });
    m_.triangulation.fill.insert(tri.fill.begin(), tri.fill.end());
    return rec;
  }

  /// Rejoins MPD fragments (and their junction-tree counterparts) by empty
  /// separators to the lowest-id MPS.
  void rejoinFragments() {
    const auto comps = m_.mpdTree.components();
    for (std::size_t i = 1; i < comps.size(); ++i) linkCoupled(comps[0].front(), comps[i].front(), {});
  }

  CompiledModel& m_;
  std::map<Edge, bool> touched_;  // moral pair -> present before this batch
};

/// Applies `mods` as one batch and returns the updated model.
inline CompiledModel incrementalCompile(CompiledModel model, std::span<const Modification> mods,
                                        IncrementalReport* report = nullptr) {
  IncrementalEngine engine(model);
  auto r = engine.apply(mods);
  if (report) *report = std::move(r);
  return model;
}

}  // namespace bnic
