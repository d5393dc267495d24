// Text formats: network files, edit scripts, tree listings and DOT export.
#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bnic/graph.hpp"
#include "bnic/incremental.hpp"
#include "bnic/model.hpp"

namespace bnic {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

/// Splits text into (line number, whitespace tokens), dropping comments,
/// blank lines and a trailing CR.
inline std::vector<std::pair<std::size_t, std::vector<std::string>>> tokenize(std::string_view text) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> out;
  std::size_t lineNo = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    ++lineNo;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream is(line);
    std::vector<std::string> tokens;
    for (std::string tok; is >> tok;) tokens.push_back(tok);
    if (!tokens.empty()) out.emplace_back(lineNo, std::move(tokens));
    if (end == text.size()) break;
  }
  return out;
}

inline VarId lookup(const Dag& g, const std::string& name, std::size_t line) {
  if (auto v = g.variables().find(name)) return *v;
  throw ParseError(line, "unknown variable '" + name + "'");
}

}  // namespace detail

inline std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// `node <name>` and `arc <parent> <child>` lines; `#` starts a comment.
inline Dag parseNetwork(std::string_view text) {
  Dag g;
  for (const auto& [line, tok] : detail::tokenize(text)) {
    try {
      if (tok[0] == "node" && tok.size() == 2) {
        g.addNode(tok[1]);
      } else if (tok[0] == "arc" && tok.size() == 3) {
        g.addArc(detail::lookup(g, tok[1], line), detail::lookup(g, tok[2], line));
      } else {
        throw ParseError(line, "expected 'node <name>' or 'arc <parent> <child>'");
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(line, e.what());
    }
  }
  return g;
}

inline std::string writeNetwork(const Dag& g) {
  std::ostringstream os;
  const auto& vars = g.variables();
  for (VarId v : g.nodes()) os << "node " << vars.name(v) << '\n';
  for (const auto& [p, c] : g.arcs()) os << "arc " << vars.name(p) << ' ' << vars.name(c) << '\n';
  return os.str();
}

enum class EditKind { AddNode, RemoveNode, AddArc, RemoveArc, Compile };

struct ScriptLine {
  EditKind kind;
  std::string first;
  std::string second;
  std::size_t line = 0;
};

inline std::string describe(const ScriptLine& s) {
  switch (s.kind) {
    case EditKind::AddNode: return "add-node " + s.first;
    case EditKind::RemoveNode: return "remove-node " + s.first;
    case EditKind::AddArc: return "add-arc " + s.first + " " + s.second;
    case EditKind::RemoveArc: return "remove-arc " + s.first + " " + s.second;
    case EditKind::Compile: return "compile";
  }
  return {};
}

inline std::vector<ScriptLine> parseEditScript(std::string_view text) {
  std::vector<ScriptLine> out;
  for (const auto& [line, tok] : detail::tokenize(text)) {
    const std::string& cmd = tok[0];
    if (cmd == "compile" && tok.size() == 1)
      out.push_back({EditKind::Compile, {}, {}, line});
    else if (cmd == "add-node" && tok.size() == 2)
      out.push_back({EditKind::AddNode, tok[1], {}, line});
    else if (cmd == "remove-node" && tok.size() == 2)
      out.push_back({EditKind::RemoveNode, tok[1], {}, line});
    else if (cmd == "add-arc" && tok.size() == 3)
      out.push_back({EditKind::AddArc, tok[1], tok[2], line});
    else if (cmd == "remove-arc" && tok.size() == 3)
      out.push_back({EditKind::RemoveArc, tok[1], tok[2], line});
    else
      throw ParseError(line, "unrecognized edit '" + cmd + "'");
  }
  return out;
}

/// Groups script lines into flush batches. Every `compile` closes a batch;
/// edits left after the last one form a final batch.
inline std::vector<std::vector<ScriptLine>> splitBatches(const std::vector<ScriptLine>& script) {
  std::vector<std::vector<ScriptLine>> out;
  std::vector<ScriptLine> pending;
  for (const ScriptLine& s : script) {
    if (s.kind == EditKind::Compile) {
      out.push_back(std::move(pending));
      pending.clear();
    } else {
      pending.push_back(s);
    }
  }
  if (!pending.empty()) out.push_back(std::move(pending));
  return out;
}

struct ResolvedEdit {
  ScriptLine source;
  std::vector<Modification> mods;
};

/// Resolves names against the network as it will be at each position and
/// expands `remove-node` into removal of every incident arc first. `g` is
/// advanced through the edits, so pass a copy.
inline std::vector<ResolvedEdit> resolveEdits(Dag& g, const std::vector<ScriptLine>& lines) {
  std::vector<ResolvedEdit> out;
  for (const ScriptLine& s : lines) {
    ResolvedEdit r{s, {}};
    try {
      switch (s.kind) {
        case EditKind::AddNode:
          g.addNode(s.first);
          r.mods.push_back(AddNode{s.first});
          break;
        case EditKind::RemoveNode: {
          const VarId x = detail::lookup(g, s.first, s.line);
          for (const auto& [p, c] : g.incidentArcs(x)) {
            g.removeArc(p, c);
            r.mods.push_back(RemoveArc{p, c});
          }
          g.removeNode(x);
          r.mods.push_back(RemoveNode{x});
          break;
        }
        case EditKind::AddArc: {
          const VarId p = detail::lookup(g, s.first, s.line), c = detail::lookup(g, s.second, s.line);
          g.addArc(p, c);
          r.mods.push_back(AddArc{p, c});
          break;
        }
        case EditKind::RemoveArc: {
          const VarId p = detail::lookup(g, s.first, s.line), c = detail::lookup(g, s.second, s.line);
          g.removeArc(p, c);
          r.mods.push_back(RemoveArc{p, c});
          break;
        }
        case EditKind::Compile:
          break;
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(s.line, e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<Modification> flatten(const std::vector<ResolvedEdit>& edits) {
  std::vector<Modification> out;
  for (const auto& e : edits) out.insert(out.end(), e.mods.begin(), e.mods.end());
  return out;
}

inline std::string formatVars(const VariableTable& vars, const VarSet& s) {
  std::string out;
  for (VarId v : s) {
    if (!out.empty()) out += ' ';
    out += vars.name(v);
  }
  return out;
}

inline std::string describe(const VariableTable& vars, const Modification& mod) {
  struct {
    const VariableTable& vars;
    std::string operator()(const AddNode& m) const { return "add-node " + m.name; }
    std::string operator()(const RemoveNode& m) const { return "remove-node " + vars.name(m.node); }
    std::string operator()(const AddArc& m) const { return "add-arc " + vars.name(m.parent) + " " + vars.name(m.child); }
    std::string operator()(const RemoveArc& m) const {
      return "remove-arc " + vars.name(m.parent) + " " + vars.name(m.child);
    }
  } visitor{vars};
  return std::visit(visitor, mod);
}

inline std::string formatTree(const VariableTable& vars, const ClusterTree& t, std::string_view title) {
  std::ostringstream os;
  os << title << ": " << t.size() << " clusters\n";
  for (const auto& [id, c] : t.clusters()) os << "  c" << raw(id) << " {" << formatVars(vars, c.vars) << "}\n";
  for (const TreeEdge& e : t.edges())
    os << "  c" << raw(e.a) << " -- c" << raw(e.b) << " [" << formatVars(vars, e.separator) << "]\n";
  return os.str();
}

inline std::string formatModel(const CompiledModel& m) {
  const auto& vars = m.dag.variables();
  std::ostringstream os;
  const std::size_t moralAdded = m.moral.edgeCount() - [&] {
    std::size_t skeleton = 0;
    for (const auto& [p, c] : m.dag.arcs()) skeleton += m.moral.hasEdge(p, c) ? 1 : 0;
    return skeleton;
  }();
  os << "network: " << m.dag.size() << " variables, " << m.dag.arcCount() << " arcs\n";
  os << "moral graph: " << m.moral.edgeCount() << " edges (" << moralAdded << " from moralization)\n";
  os << "triangulation: " << m.triangulation.fill.size() << " fill edges";
  for (const auto& [a, b] : m.triangulation.fill) os << ' ' << vars.name(a) << '-' << vars.name(b);
  os << '\n';
  os << formatTree(vars, m.junctionTree, "junction tree");
  os << formatTree(vars, m.mpdTree, "mpd tree");
  return os.str();
}

namespace detail {
inline std::string dotQuote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}
}  // namespace detail

inline std::string dagToDot(const Dag& g) {
  std::ostringstream os;
  os << "digraph network {\n";
  for (VarId v : g.nodes()) os << "  " << detail::dotQuote(g.variables().name(v)) << ";\n";
  for (const auto& [p, c] : g.arcs())
    os << "  " << detail::dotQuote(g.variables().name(p)) << " -> " << detail::dotQuote(g.variables().name(c)) << ";\n";
  os << "}\n";
  return os.str();
}

inline std::string graphToDot(const VariableTable& vars, const UndirectedGraph& g, std::string_view name) {
  std::ostringstream os;
  os << "graph " << name << " {\n";
  for (VarId v : g.vertices()) os << "  " << detail::dotQuote(vars.name(v)) << ";\n";
  for (const auto& [a, b] : g.edges())
    os << "  " << detail::dotQuote(vars.name(a)) << " -- " << detail::dotQuote(vars.name(b)) << ";\n";
  os << "}\n";
  return os.str();
}

/// Clusters as boxes, separators as edge labels; marked clusters are filled.
inline std::string treeToDot(const VariableTable& vars, const ClusterTree& t, std::string_view name) {
  std::ostringstream os;
  os << "graph " << name << " {\n  node [shape=box];\n";
  for (const auto& [id, c] : t.clusters()) {
    os << "  c" << raw(id) << " [label=" << detail::dotQuote(formatVars(vars, c.vars));
    if (c.marked) os << ", style=filled, fillcolor=lightgray";
    os << "];\n";
  }
  for (const TreeEdge& e : t.edges())
    os << "  c" << raw(e.a) << " -- c" << raw(e.b) << " [label=" << detail::dotQuote(formatVars(vars, e.separator))
       << "];\n";
  os << "}\n";
  return os.str();
}

}  // namespace bnic
