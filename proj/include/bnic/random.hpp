// Seeded generators for networks and edit scripts.
#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "bnic/graph.hpp"
#include "bnic/io.hpp"

namespace bnic {

using Rng = std::mt19937_64;

struct RandomDagOptions {
  std::size_t nodes = 10;
  double arcProbability = 0.2;
  std::size_t maxParents = 4;
};

/// Draws a random topological order, then each earlier node becomes a parent
/// with `arcProbability` until `maxParents` is reached. Node names are v0, v1, ...
inline Dag randomDag(const RandomDagOptions& opt, Rng& rng) {
  Dag g;
  std::vector<VarId> ids;
  for (std::size_t i = 0; i < opt.nodes; ++i) ids.push_back(g.addNode("v" + std::to_string(i)));
  std::vector<std::size_t> order(opt.nodes);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution coin(opt.arcProbability);
  for (std::size_t j = 1; j < order.size(); ++j) {
    std::vector<std::size_t> earlier(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(j));
    std::shuffle(earlier.begin(), earlier.end(), rng);
    std::size_t parents = 0;
    for (std::size_t i : earlier) {
      if (parents == opt.maxParents) break;
      if (coin(rng)) {
        g.addArc(ids[i], ids[order[j]]);
        ++parents;
      }
    }
  }
  return g;
}

inline Dag randomDag(std::size_t nodes, double arcProbability, std::uint64_t seed) {
  Rng rng(seed);
  return randomDag({nodes, arcProbability, 4}, rng);
}

struct RandomScriptOptions {
  std::size_t edits = 5;
  bool arcsOnly = false;  // only add-arc / remove-arc
};

namespace detail {

inline bool tryAddArc(Dag& g, Rng& rng, std::vector<ScriptLine>& out) {
  const std::vector<VarId> nodes = g.nodes();
  if (nodes.size() < 2) return false;
  std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
  for (int attempt = 0; attempt < 64; ++attempt) {
    VarId a = nodes[pick(rng)], b = nodes[pick(rng)];
    if (a == b || g.hasArc(a, b) || g.hasArc(b, a)) continue;
    if (g.reaches(b, a)) std::swap(a, b);
    g.addArc(a, b);
    out.push_back({EditKind::AddArc, g.variables().name(a), g.variables().name(b), 0});
    return true;
  }
  return false;
}

inline bool tryRemoveArc(Dag& g, Rng& rng, std::vector<ScriptLine>& out) {
  const auto arcs = g.arcs();
  if (arcs.empty()) return false;
  const auto [p, c] = arcs[std::uniform_int_distribution<std::size_t>(0, arcs.size() - 1)(rng)];
  out.push_back({EditKind::RemoveArc, g.variables().name(p), g.variables().name(c), 0});
  g.removeArc(p, c);
  return true;
}

}  // namespace detail

/// A valid edit sequence for `g` (which is advanced along it). Mixed scripts
/// weigh arc edits 35/35 and node edits 15/15; impossible draws are redrawn.
inline std::vector<ScriptLine> randomScript(Dag& g, const RandomScriptOptions& opt, Rng& rng) {
  std::vector<ScriptLine> out;
  std::discrete_distribution<int> kind = opt.arcsOnly ? std::discrete_distribution<int>{1, 1, 0, 0}
                                                      : std::discrete_distribution<int>{35, 35, 15, 15};
  std::size_t fresh = 0;
  std::size_t guard = 0;
  while (out.size() < opt.edits && guard++ < 64 * (opt.edits + 1)) {
    switch (kind(rng)) {
      case 0:
        detail::tryAddArc(g, rng, out);
        break;
      case 1:
        detail::tryRemoveArc(g, rng, out);
        break;
      case 2: {
        std::string name;
        do name = "n" + std::to_string(fresh++);
        while (g.variables().find(name));
        g.addNode(name);
        out.push_back({EditKind::AddNode, name, {}, 0});
        break;
      }
      case 3: {
        const auto nodes = g.nodes();
        if (nodes.empty()) break;
        const VarId x = nodes[std::uniform_int_distribution<std::size_t>(0, nodes.size() - 1)(rng)];
        out.push_back({EditKind::RemoveNode, g.variables().name(x), {}, 0});
        for (const auto& [p, c] : g.incidentArcs(x)) g.removeArc(p, c);
        g.removeNode(x);
        break;
      }
    }
  }
  return out;
}

}  // namespace bnic
