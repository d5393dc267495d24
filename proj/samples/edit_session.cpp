// Compiles a small network, edits it in one batch and prints what changed.
#include <iostream>

#include "bnic/bnic.hpp"

int main() {
  using namespace bnic;
  const Dag network = parseNetwork(
      "node A\nnode S\nnode T\nnode L\nnode B\nnode E\nnode X\nnode D\n"
      "arc A T\narc S L\narc S B\narc T E\narc L E\narc E X\narc E D\narc B D\n");
  CompiledModel model = fullRecompile(network);
  std::cout << formatTree(model.dag.variables(), model.mpdTree, "before");

  Dag scratch = model.dag;
  const auto edits = resolveEdits(scratch, parseEditScript("remove-arc L E\nadd-node Z\nadd-arc Z X\n"));
  IncrementalReport report;
  model = incrementalCompile(std::move(model), flatten(edits), &report);

  const auto& vars = model.dag.variables();
  for (const SpliceRecord& s : report.splices) std::cout << "retriangulated {" << formatVars(vars, s.variables) << "}\n";
  std::cout << formatTree(vars, model.mpdTree, "after");
  std::cout << (validate(model).passed() && mpdEqual(model.mpdTree, fullRecompile(model.dag).mpdTree) ? "consistent\n"
                                                                                                      : "INCONSISTENT\n");
}
