/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_DFG_HPP
#define MINIALLO_DFG_HPP

#include "miniallo/ir.hpp"
#include "miniallo/layout.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace miniallo {

struct DfgNode {
  std::string func;
  std::string name;
  TensorType type;
  PartitionType part;
  Role role = Role::Local;
  std::string label() const { return func + ":" + name; }
};

// Hierarchical dataflow graph: one node per function-scoped memory, with
// explicit caller-operand -> callee-param and callee-result -> caller edges.
struct HierDFG {
  std::vector<DfgNode> nodes;
  std::vector<std::vector<int>> preds, succs;

  // -1 when absent.
  int find(const std::string &func, const std::string &name) const;
  int find(const std::string &label) const;
  // Throws on an unknown node.
  std::pair<std::vector<int>, std::vector<int>> neighbors(int node) const;
  std::pair<std::vector<std::string>, std::vector<std::string>>
  neighbors(const std::string &label) const;
  bool hasEdge(int from, int to) const;
  bool isCross(int a, int b) const { return nodes[a].func != nodes[b].func; }

  LayoutGraph layoutGraph() const;
  // Graphviz text with `func:name` node labels.
  std::string dump() const;

  void addEdge(int from, int to);

private:
  std::map<std::string, int> index_;
  friend HierDFG buildDfg(const Module &m);
};

HierDFG buildDfg(const Module &m);

// Runs layout propagation from `func:mem` toward `target` and writes the
// resulting partition types back into the module. Returns the update count.
int propagateLayout(Module &m, const std::string &func, const std::string &mem,
                    const PartitionType &target);

// Propagates stream storage from `func:mem` across function boundaries with
// the two-point lattice {memory, stream}. Returns the names touched.
std::vector<std::string> propagateStream(Module &m, const std::string &func,
                                         const std::string &mem,
                                         const Storage &storage);

} // namespace miniallo

#endif // MINIALLO_DFG_HPP
