#pragma once

#include <algorithm>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "bnic/bnic.hpp"

namespace bnic::test {

/// The chest-clinic network. Ids: A0 S1 T2 L3 B4 E5 X6 D7.
inline Dag asia() {
  Dag g;
  for (const char* n : {"A", "S", "T", "L", "B", "E", "X", "D"}) g.addNode(n);
  auto arc = [&](const char* p, const char* c) { g.addArc(g.variables().id(p), g.variables().id(c)); };
  arc("A", "T");
  arc("S", "L");
  arc("S", "B");
  arc("T", "E");
  arc("L", "E");
  arc("E", "X");
  arc("E", "D");
  arc("B", "D");
  return g;
}

inline VarId id(const Dag& g, std::string_view name) { return g.variables().id(name); }

/// Single-letter names: "TLE" -> {T, L, E}.
inline VarSet vs(const Dag& g, std::string_view letters) {
  VarSet out;
  for (char c : letters) out.insert(g.variables().id(std::string(1, c)));
  return out;
}

inline std::vector<VarSet> sets(const Dag& g, std::initializer_list<std::string_view> groups) {
  std::vector<VarSet> out;
  for (auto s : groups) out.push_back(vs(g, s));
  std::sort(out.begin(), out.end());
  return out;
}

inline Edge edge(const Dag& g, std::string_view a, std::string_view b) { return makeEdge(id(g, a), id(g, b)); }

inline std::string dataFile(const std::string& name) { return std::string(BNIC_DATA_DIR) + "/" + name; }

}  // namespace bnic::test
