// Command-line driver: compile, apply, bench. Exit codes: 0 ok, 1 usage or
// parse error, 2 verification failure.
#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bnic/bench.hpp"
#include "bnic/incremental.hpp"
#include "bnic/io.hpp"
#include "bnic/model.hpp"
#include "bnic/random.hpp"
#include "bnic/verify.hpp"

namespace bnic {

inline constexpr std::uint64_t kDefaultSeed = 42;

namespace detail {

inline void writeText(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out << text;
}

inline void dumpDot(const std::filesystem::path& dir, const std::string& prefix, const CompiledModel& m) {
  std::filesystem::create_directories(dir);
  const auto& vars = m.dag.variables();
  writeText(dir / (prefix + "network.dot"), dagToDot(m.dag));
  writeText(dir / (prefix + "moral.dot"), graphToDot(vars, m.moral, "moral"));
  writeText(dir / (prefix + "junction-tree.dot"), treeToDot(vars, m.junctionTree, "junction_tree"));
  writeText(dir / (prefix + "mpd-tree.dot"), treeToDot(vars, m.mpdTree, "mpd_tree"));
}

inline std::string formatLinks(const VariableTable& vars, const LinkList& links) {
  std::string out;
  for (const Link& l : links) {
    if (!out.empty()) out += ' ';
    out += l.change == LinkChange::Added ? '+' : '-';
    out += vars.name(l.edge.first) + "-" + vars.name(l.edge.second);
  }
  return out.empty() ? "none" : out;
}

inline std::uint64_t defaultSeed() {
  if (const char* env = std::getenv("BNIC_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw CLI::ValidationError("BNIC_SEED", "not an unsigned integer: " + std::string(env));
    }
  }
  return kDefaultSeed;
}

struct ApplyOptions {
  std::string network, script, dotDir;
  bool verify = false, trace = false;
};

inline int runCompile(const std::string& network, const std::string& dotDir, std::ostream& out) {
  const CompiledModel m = fullRecompile(parseNetwork(readFile(network)));
  out << formatModel(m);
  if (!dotDir.empty()) dumpDot(dotDir, "", m);
  return 0;
}

inline int runApply(const ApplyOptions& opt, std::ostream& out) {
  CompiledModel m = fullRecompile(parseNetwork(readFile(opt.network)));
  const auto script = parseEditScript(readFile(opt.script));
  const auto batches = splitBatches(script);
  if (opt.verify) verifyAgainstFull(m, "initial compile");

  std::size_t flushNo = 0;
  for (const auto& batch : batches) {
    ++flushNo;
    Dag scratch = m.dag;
    const auto edits = resolveEdits(scratch, batch);
    const ClusterTree before = m.mpdTree;
    IncrementalEngine engine(m);
    IncrementalReport report;
    for (const ResolvedEdit& e : edits) {
      if (opt.trace) out << "  " << describe(e.source) << '\n';
      for (const Modification& mod : e.mods) {
        report.steps.push_back(engine.stage(mod));
        if (!opt.trace) continue;
        const MarkStep& s = report.steps.back();
        const auto& vars = m.dag.variables();
        out << "    " << describe(vars, mod) << ": links " << formatLinks(vars, s.links) << "; marked";
        for (const VarSet& c : s.markedVars) out << " {" << formatVars(vars, c) << '}';
        out << '\n';
      }
    }
    const std::string prefix = "flush" + std::to_string(flushNo) + "-";
    if (!opt.dotDir.empty()) dumpDot(opt.dotDir, prefix + "marked-", m);
    report.splices = engine.recompileMarked();

    const auto& vars = m.dag.variables();
    out << "flush " << flushNo << ": " << batch.size() << " edits, " << report.steps.size() << " modifications, "
        << report.markedMpsCount() << " marked MPSs\n";
    for (const SpliceRecord& s : report.splices) out << "  retriangulated {" << formatVars(vars, s.variables) << "}\n";
    out << "  stability " << stability(before, m.mpdTree) << '\n';
    if (!opt.dotDir.empty()) dumpDot(opt.dotDir, prefix, m);
    if (opt.verify) verifyAgainstFull(m, "flush " + std::to_string(flushNo));
  }
  out << formatModel(m);
  return 0;
}

}  // namespace detail

/// Entry point shared by the executable and the tests.
inline int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Incremental compilation of Bayesian-network structure", "bnic"};
  app.require_subcommand(1);

  std::string network, dotDir;
  auto* compile = app.add_subcommand("compile", "Compile a network and print its trees");
  compile->add_option("network", network, "Network file")->required();
  compile->add_option("--dot", dotDir, "Directory for DOT files");

  detail::ApplyOptions applyOpt;
  auto* apply = app.add_subcommand("apply", "Compile a network, then replay an edit script incrementally");
  apply->add_option("network", applyOpt.network, "Network file")->required();
  apply->add_option("script", applyOpt.script, "Edit script")->required();
  apply->add_flag("--verify", applyOpt.verify, "Check every flush against a full recompile");
  apply->add_flag("--trace", applyOpt.trace, "Print links and marked MPSs per modification");
  apply->add_option("--dot", applyOpt.dotDir, "Directory for per-flush DOT snapshots");

  std::string benchNet, benchScript, csvFile;
  std::vector<std::uint64_t> randomArgs;
  int reps = 5;
  auto* bench = app.add_subcommand("bench", "Time incremental against full recompilation per edit");
  bench->add_option("network", benchNet, "Network file (ignored with --random)");
  bench->add_option("script", benchScript, "Edit script");
  bench->add_option("--random", randomArgs, "N E [SEED]: random network of N nodes and E single-arc edits")
      ->expected(2, 3);
  bench->add_option("--csv", csvFile, "Also write the report as CSV");
  bench->add_option("--repetitions", reps, "Timed runs per edit")->check(CLI::Range(1, 1000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*compile) return detail::runCompile(network, dotDir, out);
    if (*apply) return detail::runApply(applyOpt, out);

    Dag net;
    std::vector<ScriptLine> script;
    if (!randomArgs.empty()) {
      Rng rng(randomArgs.size() == 3 ? randomArgs[2] : detail::defaultSeed());
      const std::size_t n = randomArgs[0];
      net = randomDag({n, n > 1 ? 2.0 / static_cast<double>(n - 1) : 0.0, 4}, rng);
      Dag scratch = net;
      script = randomScript(scratch, {randomArgs[1], true}, rng);
    } else {
      if (benchNet.empty() || benchScript.empty()) {
        err << "bench: need <network> <script> or --random N E [SEED]\n";
        return 1;
      }
      net = parseNetwork(readFile(benchNet));
      script = parseEditScript(readFile(benchScript));
    }
    const BenchReport report = runBench(net, script, {reps, true});
    out << report.table();
    if (!csvFile.empty()) detail::writeText(csvFile, report.csv());
    return 0;
  } catch (const VerificationError& e) {
    err << "verification failed: " << e.what() << '\n';
    return 2;
  } catch (const CLI::Error& e) {
    err << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace bnic
