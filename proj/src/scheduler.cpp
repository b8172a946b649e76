/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/schedule.hpp"
#include "prims.hpp"

#include <algorithm>
#include <atomic>

namespace miniallo {

//===----------------------------------------------------------------------===//
// Records
//===----------------------------------------------------------------------===//

std::string primKindStr(PrimKind k) {
  switch (k) {
  case PrimKind::Split:
    return "split";
  case PrimKind::Reorder:
    return "reorder";
  case PrimKind::Fuse:
    return "fuse";
  case PrimKind::Unroll:
    return "unroll";
  case PrimKind::Pipeline:
    return "pipeline";
  case PrimKind::Unfold:
    return "unfold";
  case PrimKind::BufferAt:
    return "buffer_at";
  case PrimKind::ReuseAt:
    return "reuse_at";
  case PrimKind::Partition:
    return "partition";
  case PrimKind::Relay:
    return "relay";
  case PrimKind::Compose:
    return "compose";
  }
  return "?";
}

bool isComputeKind(PrimKind k) {
  switch (k) {
  case PrimKind::Split:
  case PrimKind::Reorder:
  case PrimKind::Fuse:
  case PrimKind::Unroll:
  case PrimKind::Pipeline:
  case PrimKind::Unfold:
    return true;
  default:
    return false;
  }
}

static std::string joinInts(const std::vector<int> &v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

static std::string modeStr(PartKind k) {
  switch (k) {
  case PartKind::Bottom:
    return "complete";
  case PartKind::Cyclic:
    return "cyclic";
  case PartKind::Block:
    return "block";
  case PartKind::Top:
    return "none";
  }
  return "?";
}

std::string PrimitiveRecord::str() const {
  std::string s = primKindStr(kind) + " " + func;
  switch (kind) {
  case PrimKind::Split:
    s += ":" + loops[0] + " " + std::to_string(factor);
    break;
  case PrimKind::Reorder:
  case PrimKind::Fuse:
    for (auto &l : loops)
      s += " " + l;
    break;
  case PrimKind::Unroll:
    s += ":" + loops[0] + " " + std::to_string(factor);
    break;
  case PrimKind::Pipeline:
    s += ":" + loops[0] + " ii=" + std::to_string(ii);
    break;
  case PrimKind::Unfold:
    s += ":" + loops[0] + " axis=" + joinInts(axes) + " as " + asName;
    break;
  case PrimKind::BufferAt:
  case PrimKind::ReuseAt:
    s += ":" + array + " " + loops[0] + " as " + asName;
    break;
  case PrimKind::Partition:
    s += ":" + array + " " + modeStr(mode) + " dim=" + joinInts(axes);
    if (factor)
      s += " factor=" + std::to_string(factor);
    break;
  case PrimKind::Relay:
    s += ":" + array + " " + dst;
    if (axis >= 0)
      s += " axis=" + std::to_string(axis);
    s += " depth=" + std::to_string(depth);
    break;
  case PrimKind::Compose:
    s += " " + dst;
    if (!asName.empty())
      s += " id=" + asName;
    break;
  }
  return s;
}

//===----------------------------------------------------------------------===//
// Shared helpers
//===----------------------------------------------------------------------===//

ExprP ixInt(int64_t v) { return withType(mkInt(v), ElemType::index()); }

ExprP ixBin(const std::string &op, ExprP a, ExprP b) {
  return withType(mkBin(op, std::move(a), std::move(b)), ElemType::index());
}

ExprP ixCmp(const std::string &op, ExprP a, ExprP b) {
  return withType(mkBin(op, std::move(a), std::move(b)), ElemType::uintTy(1));
}

std::set<std::string> loopVars(const Func &f) {
  std::set<std::string> out;
  walk(f.body, [&](const Stmt &s) {
    if (s.kind == StmtKind::For)
      out.insert(s.var);
    return true;
  });
  return out;
}

std::set<std::string> loopLabels(const Func &f) { return labelsIn(f.body); }

std::set<std::string> labelsIn(const std::vector<Stmt> &body) {
  std::set<std::string> out;
  walk(body, [&](const Stmt &s) {
    if (s.kind == StmtKind::For)
      out.insert(s.label);
    return true;
  });
  return out;
}

std::string freshName(const std::set<std::string> &used,
                      const std::string &base) {
  std::string n = base;
  for (int k = 1; used.count(n); ++k)
    n = base + "_" + std::to_string(k);
  return n;
}

std::string freshMemName(const Func &f, const std::string &base) {
  std::set<std::string> used = loopVars(f);
  for (auto &p : f.params)
    used.insert(p.name);
  for (auto &l : f.locals)
    used.insert(l.name);
  return freshName(used, base);
}

std::vector<Stmt> *parentBody(std::vector<Stmt> &body, const Stmt *target) {
  for (auto &s : body) {
    if (&s == target)
      return &body;
    if (auto *p = parentBody(s.body, target))
      return p;
  }
  return nullptr;
}

bool touches(const std::vector<Stmt> &body, const std::string &mem) {
  std::vector<std::string> reads, writes;
  accessedArrays(body, reads, writes);
  return std::find(reads.begin(), reads.end(), mem) != reads.end() ||
         std::find(writes.begin(), writes.end(), mem) != writes.end();
}

Func &targetFunc(Module &m, const PrimitiveRecord &r) {
  Func *f = m.find(r.func);
  if (!f)
    throw Error(primKindStr(r.kind) + ": unknown function '" + r.func + "'");
  return *f;
}

//===----------------------------------------------------------------------===//
// Application and replay
//===----------------------------------------------------------------------===//

void applyPrimitive(Module &m, const PrimitiveRecord &r) {
  if (r.kind == PrimKind::Compose)
    return;
  Func &f = targetFunc(m, r);
  // Records on a template wait until the template has instances.
  if (f.isTemplate())
    return;
  switch (r.kind) {
  case PrimKind::Split:
    primSplit(m, r);
    break;
  case PrimKind::Reorder:
    primReorder(m, r);
    break;
  case PrimKind::Fuse:
    primFuse(m, r);
    break;
  case PrimKind::Unroll:
    primUnroll(m, r);
    break;
  case PrimKind::Pipeline:
    primPipeline(m, r);
    break;
  case PrimKind::Unfold:
    primUnfold(m, r);
    break;
  case PrimKind::BufferAt:
    primBufferAt(m, r);
    break;
  case PrimKind::ReuseAt:
    primReuseAt(m, r);
    break;
  case PrimKind::Partition:
    primPartition(m, r);
    break;
  case PrimKind::Relay:
    primRelay(m, r);
    break;
  case PrimKind::Compose:
    break;
  }
}

Module replay(const Module &pristine,
              const std::vector<PrimitiveRecord> &records) {
  Module m = pristine;
  for (auto &r : records) {
    try {
      applyPrimitive(m, r);
    } catch (Error &e) {
      throw Error("replaying '" + r.str() + "': " + e.what(), e.loc(),
                  e.file());
    }
  }
  return m;
}

int nextOrigin() {
  static std::atomic<int> counter{0};
  return ++counter;
}

//===----------------------------------------------------------------------===//
// Schedule
//===----------------------------------------------------------------------===//

Schedule customize(const Module &m, const std::string &func) {
  if (!m.find(func))
    throw Error("customize: unknown function '" + func + "'");
  Schedule s;
  s.pristine = m;
  s.program_ = m;
  s.func = func;
  s.origin = nextOrigin();
  return s;
}

const Module &Schedule::program() {
  if (stale) {
    program_ = replay(pristine, records);
    stale = false;
  }
  return program_;
}

static std::pair<std::string, std::string> splitQualified(
    const std::string &name, const std::string &dflt) {
  auto c = name.find(':');
  if (c == std::string::npos)
    return {dflt, name};
  return {name.substr(0, c), name.substr(c + 1)};
}

std::pair<std::string, std::string>
Schedule::resolveMemory(const std::string &name) const {
  auto it = handles.find(name);
  if (it != handles.end() && it->second.kind != Handle::PeGrid &&
      it->second.kind != Handle::Loop)
    return {it->second.func, it->second.name};
  return splitQualified(name, func);
}

std::pair<std::string, std::string>
Schedule::resolveLoop(const std::string &name) const {
  auto it = handles.find(name);
  if (it != handles.end() &&
      (it->second.kind == Handle::Loop || it->second.kind == Handle::PeGrid))
    return {it->second.func, it->second.name};
  return splitQualified(name, func);
}

void Schedule::apply(PrimitiveRecord r) {
  const Module &cur = program();
  Module next = cur;
  applyPrimitive(next, r);
  if (r.origin == 0)
    r.origin = origin;
  program_ = std::move(next);
  records.push_back(std::move(r));
}

static void sameFunc(const std::string &a, const std::string &b,
                     const char *what) {
  if (a != b)
    throw Error(std::string(what) + ": loops belong to different functions");
}

void Schedule::split(const std::string &loop, int64_t factor) {
  PrimitiveRecord r;
  r.kind = PrimKind::Split;
  auto [f, l] = resolveLoop(loop);
  r.func = f;
  r.loops = {l};
  r.factor = factor;
  apply(r);
}

void Schedule::reorder(const std::vector<std::string> &loops) {
  PrimitiveRecord r;
  r.kind = PrimKind::Reorder;
  for (auto &n : loops) {
    auto [f, l] = resolveLoop(n);
    if (r.func.empty())
      r.func = f;
    sameFunc(r.func, f, "reorder");
    r.loops.push_back(l);
  }
  if (r.loops.empty())
    throw Error("reorder: no loops given");
  apply(r);
}

void Schedule::fuse(const std::vector<std::string> &loops) {
  PrimitiveRecord r;
  r.kind = PrimKind::Fuse;
  for (auto &n : loops) {
    auto [f, l] = resolveLoop(n);
    if (r.func.empty())
      r.func = f;
    sameFunc(r.func, f, "fuse");
    r.loops.push_back(l);
  }
  if (r.loops.size() < 2)
    throw Error("fuse: at least two loops are required");
  apply(r);
}

void Schedule::unroll(const std::string &loop, int64_t factor) {
  PrimitiveRecord r;
  r.kind = PrimKind::Unroll;
  auto [f, l] = resolveLoop(loop);
  r.func = f;
  r.loops = {l};
  r.factor = factor;
  apply(r);
}

void Schedule::pipeline(const std::string &loop, int64_t ii) {
  PrimitiveRecord r;
  r.kind = PrimKind::Pipeline;
  auto [f, l] = resolveLoop(loop);
  r.func = f;
  r.loops = {l};
  r.ii = ii;
  apply(r);
}

std::string Schedule::unfold(const std::string &band,
                             const std::vector<int> &axes,
                             const std::string &as) {
  PrimitiveRecord r;
  r.kind = PrimKind::Unfold;
  auto [f, l] = resolveLoop(band);
  r.func = f;
  r.loops = {l};
  r.axes = axes;
  r.asName = as.empty() ? l : as;
  apply(r);
  handles[r.asName] = {Handle::PeGrid, f, l};
  return r.asName;
}

std::string Schedule::bufferAt(const std::string &array,
                               const std::string &loop,
                               const std::string &as) {
  PrimitiveRecord r;
  r.kind = PrimKind::BufferAt;
  auto [fa, a] = resolveMemory(array);
  auto [fl, l] = resolveLoop(loop);
  if (loop.find(':') == std::string::npos && !handles.count(loop))
    fl = fa;
  sameFunc(fa, fl, "buffer_at");
  r.func = fa;
  r.array = a;
  r.loops = {l};
  r.asName = as.empty() ? "buf_" + a : as;
  apply(r);
  handles[r.asName] = {Handle::Buffer, fa, r.asName};
  return r.asName;
}

std::string Schedule::reuseAt(const std::string &array,
                              const std::string &loop,
                              const std::string &as) {
  PrimitiveRecord r;
  r.kind = PrimKind::ReuseAt;
  auto [fa, a] = resolveMemory(array);
  auto [fl, l] = resolveLoop(loop);
  if (loop.find(':') == std::string::npos && !handles.count(loop))
    fl = fa;
  sameFunc(fa, fl, "reuse_at");
  r.func = fa;
  r.array = a;
  r.loops = {l};
  r.asName = as.empty() ? a + "_reuse" : as;
  apply(r);
  handles[r.asName] = {Handle::Buffer, fa, r.asName};
  return r.asName;
}

void Schedule::partition(const std::string &array, PartKind mode,
                         const std::vector<int> &dims, int64_t factor) {
  PrimitiveRecord r;
  r.kind = PrimKind::Partition;
  auto [f, a] = resolveMemory(array);
  r.func = f;
  r.array = a;
  r.mode = mode;
  r.axes = dims;
  r.factor = factor;
  apply(r);
}

void Schedule::relay(const std::string &array, const std::string &dst,
                     int axis, int64_t depth) {
  PrimitiveRecord r;
  r.kind = PrimKind::Relay;
  auto [f, a] = resolveMemory(array);
  r.func = f;
  r.array = a;
  auto it = handles.find(dst);
  if (it != handles.end() && it->second.kind == Handle::PeGrid) {
    r.func = it->second.func;
    r.dst = "pe:" + it->second.name;
  } else {
    r.dst = dst;
  }
  r.axis = axis;
  r.depth = depth;
  apply(r);
}

} // namespace miniallo
