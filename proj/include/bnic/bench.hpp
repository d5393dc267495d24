// Per-edit timing of incremental recompilation against full recompilation.
#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bnic/incremental.hpp"
#include "bnic/io.hpp"
#include "bnic/model.hpp"
#include "bnic/verify.hpp"

namespace bnic {

class VerificationError : public std::runtime_error {
 public:
  explicit VerificationError(const std::string& what) : std::runtime_error(what) {}
};

/// validate() on `m` plus decomposition equality with a from-scratch
/// recompile of its network. Throws VerificationError naming the first failure.
inline void verifyAgainstFull(const CompiledModel& m, const std::string& context) {
  const ValidityReport r = validate(m);
  if (const CheckResult* f = r.firstFailure())
    throw VerificationError(context + ": check '" + f->name + "' failed: " + f->diagnostic);
  if (!mpdEqual(m.mpdTree, fullRecompile(m.dag).mpdTree))
    throw VerificationError(context + ": check 'mpd-equal-full' failed: MPD tree differs from full recompilation");
}

struct BenchRow {
  std::string edit;
  double incrementalMs = 0;
  double fullMs = 0;
  double speedup = 0;  // fullMs / incrementalMs
  double stability = 0;
  std::size_t markedMps = 0;
  bool verified = false;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  std::string table() const {
    std::ostringstream os;
    char buf[160];
    std::size_t width = 4;
    for (const auto& r : rows) width = std::max(width, r.edit.size());
    std::snprintf(buf, sizeof buf, "%-*s %12s %12s %9s %9s %7s %8s\n", static_cast<int>(width), "edit",
                  "incr_ms", "full_ms", "speedup", "stability", "marked", "verified");
    os << buf;
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "%-*s %12.4f %12.4f %9.2f %9.3f %7zu %8s\n", static_cast<int>(width),
                    r.edit.c_str(), r.incrementalMs, r.fullMs, r.speedup, r.stability, r.markedMps,
                    r.verified ? "yes" : "no");
      os << buf;
    }
    return os.str();
  }

  std::string csv() const {
    std::ostringstream os;
    os << "edit,incremental_ms,full_ms,speedup,stability,marked_mps,verified\n";
    for (const auto& r : rows)
      os << '"' << r.edit << "\"," << r.incrementalMs << ',' << r.fullMs << ',' << r.speedup << ','
         << r.stability << ',' << r.markedMps << ',' << (r.verified ? 1 : 0) << '\n';
    return os.str();
  }
};

inline double median(std::vector<double> xs) {
  if (xs.empty()) return 0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2;
}

struct BenchOptions {
  int repetitions = 5;
  bool verify = true;
};

/// One row per non-`compile` line, each edit flushed on its own against the
/// model left by the previous one. Verification runs outside the timed region.
inline BenchReport runBench(const Dag& network, const std::vector<ScriptLine>& script, const BenchOptions& opt = {}) {
  using Clock = std::chrono::steady_clock;
  auto ms = [](Clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };
  const int reps = std::max(1, opt.repetitions);

  BenchReport report;
  CompiledModel current = fullRecompile(network);
  for (const ScriptLine& line : script) {
    if (line.kind == EditKind::Compile) continue;
    Dag scratch = current.dag;
    const auto mods = flatten(resolveEdits(scratch, {line}));

    std::vector<double> incr, full;
    CompiledModel result;
    IncrementalReport ir;
    for (int r = 0; r < reps; ++r) {
      CompiledModel work = current;
      const auto t0 = Clock::now();
      IncrementalEngine engine(work);
      ir = engine.apply(mods);
      incr.push_back(ms(Clock::now() - t0));
      if (r == 0) result = std::move(work);
    }
    for (int r = 0; r < reps; ++r) {
      const auto t0 = Clock::now();
      const CompiledModel fresh = fullRecompile(result.dag);
      full.push_back(ms(Clock::now() - t0));
    }

    BenchRow row;
    row.edit = describe(line);
    row.incrementalMs = median(incr);
    row.fullMs = median(full);
    row.speedup = row.fullMs / std::max(row.incrementalMs, 1e-9);
    row.stability = stability(current.mpdTree, result.mpdTree);
    row.markedMps = ir.markedMpsCount();
    if (opt.verify) {
      verifyAgainstFull(result, "after '" + row.edit + "'");
      row.verified = true;
    }
    report.rows.push_back(std::move(row));
    current = std::move(result);
  }
  return report;
}

}  // namespace bnic
