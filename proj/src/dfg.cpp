/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/dfg.hpp"

#include <algorithm>
#include <sstream>

namespace miniallo {

int HierDFG::find(const std::string &func, const std::string &name) const {
  return find(func + ":" + name);
}

int HierDFG::find(const std::string &label) const {
  auto it = index_.find(label);
  return it == index_.end() ? -1 : it->second;
}

std::pair<std::vector<int>, std::vector<int>>
HierDFG::neighbors(int node) const {
  if (node < 0 || node >= static_cast<int>(nodes.size()))
    throw Error("unknown dataflow node " + std::to_string(node));
  return {preds[node], succs[node]};
}

std::pair<std::vector<std::string>, std::vector<std::string>>
HierDFG::neighbors(const std::string &label) const {
  int n = find(label);
  if (n < 0)
    throw Error("unknown dataflow node '" + label + "'");
  std::pair<std::vector<std::string>, std::vector<std::string>> out;
  for (int p : preds[n])
    out.first.push_back(nodes[p].label());
  for (int s : succs[n])
    out.second.push_back(nodes[s].label());
  return out;
}

bool HierDFG::hasEdge(int from, int to) const {
  auto &s = succs[from];
  return std::find(s.begin(), s.end(), to) != s.end();
}

void HierDFG::addEdge(int from, int to) {
  if (from < 0 || to < 0 || from == to || hasEdge(from, to))
    return;
  succs[from].push_back(to);
  preds[to].push_back(from);
}

LayoutGraph HierDFG::layoutGraph() const {
  LayoutGraph g;
  for (auto &n : nodes) {
    g.func.push_back(n.func);
    g.type.push_back(n.part);
  }
  g.preds = preds;
  g.succs = succs;
  return g;
}

std::string HierDFG::dump() const {
  std::ostringstream os;
  os << "digraph hdfg {\n";
  for (auto &n : nodes)
    os << "  \"" << n.label() << "\" [shape=box, xlabel=\"" << n.type.str()
       << "\"];\n";
  for (size_t a = 0; a < nodes.size(); ++a)
    for (int b : succs[a])
      os << "  \"" << nodes[a].label() << "\" -> \"" << nodes[b].label()
         << "\"" << (isCross(static_cast<int>(a), b) ? " [style=dashed]" : "")
         << ";\n";
  os << "}\n";
  return os.str();
}

HierDFG buildDfg(const Module &m) {
  HierDFG g;
  auto addNode = [&](const Func &f, const Memory &mem) {
    DfgNode n;
    n.func = f.name;
    n.name = mem.name;
    n.type = mem.type;
    n.part = mem.part;
    n.role = mem.role;
    g.index_[n.label()] = static_cast<int>(g.nodes.size());
    g.nodes.push_back(std::move(n));
  };
  for (auto &f : m.funcs) {
    if (f.isTemplate())
      continue;
    for (auto &p : f.params)
      addNode(f, p);
    for (auto &l : f.locals)
      addNode(f, l);
  }
  g.preds.assign(g.nodes.size(), {});
  g.succs.assign(g.nodes.size(), {});

  for (auto &f : m.funcs) {
    if (f.isTemplate())
      continue;
    walk(f.body, [&](const Stmt &s) {
      if (s.kind == StmtKind::Store || s.kind == StmtKind::Fill) {
        int dst = g.find(f.name, s.array);
        std::vector<const Expr *> loads;
        collectLoads(s.value, loads);
        for (auto &i : s.idx)
          collectLoads(i, loads);
        for (auto *l : loads)
          g.addEdge(g.find(f.name, l->name), dst);
      } else if (s.kind == StmtKind::Call) {
        const Func *callee = m.find(s.callee);
        if (!callee)
          return true;
        for (size_t i = 0; i < s.args.size() && i < callee->params.size();
             ++i)
          g.addEdge(g.find(f.name, s.args[i].name),
                    g.find(callee->name, callee->params[i].name));
        if (!s.result.empty() && !callee->result.empty())
          g.addEdge(g.find(callee->name, callee->result),
                    g.find(f.name, s.result));
      }
      return true;
    });
  }
  return g;
}

int propagateLayout(Module &m, const std::string &func, const std::string &mem,
                    const PartitionType &target) {
  HierDFG g = buildDfg(m);
  int n = g.find(func, mem);
  if (n < 0)
    throw Error("unknown memory '" + func + ":" + mem + "'");
  PropagateResult r = propagate(g.layoutGraph(), n, target);
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    if (r.types[i] == g.nodes[i].part)
      continue;
    Memory *mm = m.get(g.nodes[i].func).findMem(g.nodes[i].name);
    mm->part = r.types[i];
  }
  return r.updates;
}

std::vector<std::string> propagateStream(Module &m, const std::string &func,
                                         const std::string &mem,
                                         const Storage &storage) {
  HierDFG g = buildDfg(m);
  int n = g.find(func, mem);
  if (n < 0)
    throw Error("unknown memory '" + func + ":" + mem + "'");
  // Two-point lattice on a unit shape: none = memory, complete = stream.
  LayoutGraph lg = g.layoutGraph();
  for (size_t i = 0; i < lg.type.size(); ++i) {
    const Memory *mm = m.get(g.nodes[i].func).findMem(g.nodes[i].name);
    lg.type[i] = PartitionType::none({1});
    if (mm->storage.kind == StorageKind::Stream)
      lg.type[i].dims[0] = PartitionBase::bottom();
  }
  PartitionType stream = PartitionType::none({1});
  stream.dims[0] = PartitionBase::bottom();
  PropagateResult r = propagate(lg, n, stream);
  std::vector<std::string> touched;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    if (r.types[i] == lg.type[i])
      continue;
    Memory *mm = m.get(g.nodes[i].func).findMem(g.nodes[i].name);
    mm->storage = storage;
    touched.push_back(g.nodes[i].label());
  }
  return touched;
}

} // namespace miniallo
