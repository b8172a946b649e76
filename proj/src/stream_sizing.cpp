/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/stream_sizing.hpp"
#include "miniallo/analysis.hpp"
#include "stage_model.hpp"

#include <algorithm>
#include <numeric>

namespace miniallo {

//===----------------------------------------------------------------------===//
// Rate equations
//===----------------------------------------------------------------------===//

void RateSpec::validate() const {
  if (cSrc < 1 || iiSrc < 1 || cDst < 1 || iiDst < 1 || v < 1)
    throw Error("rate spec fields must be positive");
}

int64_t fProd(int64_t t, const RateSpec &r) {
  return std::min(r.cSrc * (t / r.iiSrc), r.v);
}

int64_t fCon(int64_t t, const RateSpec &r) {
  return std::min(r.cDst * (t / r.iiDst), fProd(t, r));
}

int64_t doneTime(const RateSpec &r) {
  r.validate();
  // Both sides reach v no later than this bound.
  int64_t hi = ((r.v + r.cSrc - 1) / r.cSrc) * r.iiSrc +
               ((r.v + r.cDst - 1) / r.cDst) * r.iiDst;
  int64_t lo = 0;
  while (lo < hi) {
    int64_t mid = lo + (hi - lo) / 2;
    if (fCon(mid, r) >= r.v)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

int64_t fifoDepth(const RateSpec &r) {
  int64_t done = doneTime(r);
  int64_t d = 1;
  for (int64_t t = 0; t <= done; ++t)
    d = std::max(d, fProd(t, r) - fCon(t, r) + 1);
  return d;
}

std::vector<int64_t> propagateIi(const std::vector<int64_t> &ii,
                                 const std::vector<StageEdge> &edges) {
  size_t n = ii.size();
  std::vector<int> indeg(n, 0);
  for (auto &e : edges) {
    if (e.src < 0 || e.dst < 0 || static_cast<size_t>(e.src) >= n ||
        static_cast<size_t>(e.dst) >= n)
      throw Error("stage edge out of range");
    e.rate.validate();
    ++indeg[e.dst];
  }
  std::vector<int> order;
  std::vector<int> deg = indeg;
  for (size_t i = 0; i < n; ++i)
    if (deg[i] == 0)
      order.push_back(static_cast<int>(i));
  for (size_t k = 0; k < order.size(); ++k)
    for (auto &e : edges)
      if (e.src == order[k] && --deg[e.dst] == 0)
        order.push_back(e.dst);
  if (order.size() != n)
    throw Error("stage graph has a cycle");
  std::vector<int64_t> out = ii;
  for (int s : order) {
    if (indeg[s] == 0)
      continue;
    int64_t best = 0;
    for (auto &e : edges)
      if (e.dst == s) {
        int64_t num = out[e.src] * e.rate.cDst;
        best = std::max(best, (num + e.rate.cSrc - 1) / e.rate.cSrc);
      }
    out[s] = std::max<int64_t>(best, 1);
  }
  return out;
}

//===----------------------------------------------------------------------===//
// Streams of a module
//===----------------------------------------------------------------------===//

static RateSpec rateOf(int64_t v, int64_t tp, int64_t tc) {
  RateSpec r;
  r.v = std::max<int64_t>(v, 1);
  tp = std::max<int64_t>(tp, 1);
  tc = std::max<int64_t>(tc, 1);
  int64_t g = std::gcd(r.v, tp);
  r.cSrc = r.v / g;
  r.iiSrc = tp / g;
  g = std::gcd(r.v, tc);
  r.cDst = r.v / g;
  r.iiDst = tc / g;
  return r;
}

std::vector<StreamEdge> analyzeStreams(const Module &m) {
  std::vector<StreamEdge> out;
  for (auto &f : m.funcs) {
    if (f.isTemplate() || !f.attrs.count("dataflow"))
      continue;
    bool any = false;
    for (auto &mem : f.locals)
      any |= mem.storage.kind == StorageKind::Stream;
    if (!any)
      continue;
    std::vector<std::map<std::string, StageTiming>> stages;
    for (size_t k = 0; k < f.body.size(); ++k)
      stages.push_back(stageTimings(m, f, k));
    for (auto &mem : f.locals) {
      if (mem.storage.kind != StorageKind::Stream)
        continue;
      StreamEdge e;
      e.func = f.name;
      e.memory = mem.name;
      e.depth = mem.storage.depth;
      StageTiming prod, con;
      for (size_t k = 0; k < stages.size(); ++k) {
        auto it = stages[k].find(mem.name);
        if (it == stages[k].end())
          continue;
        const StageTiming &t = it->second;
        if (t.writes && e.producer < 0) {
          e.producer = static_cast<int>(k);
          prod = t;
        }
        if (t.reads && e.consumer < 0) {
          e.consumer = static_cast<int>(k);
          con = t;
        }
      }
      if (e.producer < 0 || e.consumer < 0)
        continue;
      e.rate = rateOf(prod.writes, prod.lastWrite + 1, con.lastRead + 1);
      out.push_back(e);
    }
  }
  return out;
}

// Sets the depth on a stream and on every callee parameter it reaches.
static void setDepth(Module &m, const std::string &func, const std::string &mem,
                     int64_t depth, int guard = 0) {
  Func &f = m.get(func);
  Memory *x = f.findMem(mem);
  if (!x || !x->storage.isStream() || guard > 64)
    return;
  x->storage.depth = depth;
  std::vector<std::pair<std::string, std::string>> next;
  walk(f.body, [&](const Stmt &s) {
    if (s.kind != StmtKind::Call)
      return true;
    const Func *c = m.find(s.callee);
    if (!c)
      return true;
    for (size_t k = 0; k < s.args.size() && k < c->params.size(); ++k)
      if (s.args[k].name == mem && s.args[k].prefix.empty())
        next.emplace_back(c->name, c->params[k].name);
    if (s.result == mem && !c->result.empty())
      next.emplace_back(c->name, c->result);
    return true;
  });
  for (auto &[g, p] : next)
    setDepth(m, g, p, depth, guard + 1);
}

std::vector<StreamEdge> sizeStreams(Module &m) {
  std::vector<StreamEdge> edges = analyzeStreams(m);
  for (auto &e : edges) {
    if (e.depth > 0)
      continue;
    e.depth = fifoDepth(e.rate);
    e.sized = true;
    setDepth(m, e.func, e.memory, e.depth);
  }
  // Stream arrays without a depth get a double buffer.
  for (auto &f : m.funcs)
    for (auto &mem : f.locals)
      if (mem.storage.kind == StorageKind::StreamArray &&
          mem.storage.depth == 0)
        mem.storage.depth = 2;
  for (auto &f : m.funcs)
    for (auto &p : f.params)
      if (p.storage.kind == StorageKind::StreamArray && p.storage.depth == 0)
        p.storage.depth = 2;
  return edges;
}

} // namespace miniallo
