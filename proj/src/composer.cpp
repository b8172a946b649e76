/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/composer.hpp"
#include "miniallo/dfg.hpp"
#include "miniallo/verify.hpp"

#include <algorithm>
#include <set>

namespace miniallo {

std::string conflictKindStr(Conflict::Kind k) {
  switch (k) {
  case Conflict::ComputeOnSameOp:
    return "compute-on-same-op";
  case Conflict::LayoutContradiction:
    return "layout-contradiction";
  case Conflict::RelayDuplicate:
    return "relay-duplicate";
  }
  return "?";
}

std::string Conflict::str() const {
  return conflictKindStr(kind) + " conflict at " + location + ": '" +
         incoming.str() + "' against '" + existing.str() + "'";
}

class Composer {
public:
  static void compose(Schedule &top, const Schedule &sub,
                      const std::string &id);
  static void unify(Schedule &top);
  static const Module &build(Schedule &s, std::vector<StreamEdge> *edges);
};

//===----------------------------------------------------------------------===//
// Remapping
//===----------------------------------------------------------------------===//

namespace {

std::set<std::string> scopeOf(const Module &m, const std::string &root) {
  auto r = reachable(m, root);
  return {r.begin(), r.end()};
}

std::string originIn(const Module &m, const std::string &name) {
  const Func *f = m.find(name);
  return f ? f->origin() : name;
}

// Counterparts of `name` (a function of the sub-schedule) among `scope`:
// the function itself when present, otherwise every function of the same
// origin.
std::vector<std::string> counterparts(const Module &top, const Module &sub,
                                      const std::string &name,
                                      const std::set<std::string> &scope) {
  if (scope.count(name))
    return {name};
  std::string o = originIn(sub, name);
  std::vector<std::string> out;
  for (auto &n : scope) {
    const Func *f = top.find(n);
    if (f && !f->isTemplate() && f->origin() == o)
      out.push_back(n);
  }
  return out;
}

bool overlaps(const std::vector<std::string> &a,
              const std::vector<std::string> &b) {
  for (auto &x : a)
    if (std::find(b.begin(), b.end(), x) != b.end())
      return true;
  return false;
}

void checkConflicts(const std::vector<PrimitiveRecord> &existing,
                    const PrimitiveRecord &in) {
  for (auto &e : existing) {
    if (e.func != in.func || e.origin == in.origin)
      continue;
    if (isComputeKind(e.kind) && isComputeKind(in.kind) &&
        overlaps(e.loops, in.loops)) {
      std::string loc = in.func;
      for (auto &l : in.loops)
        if (std::find(e.loops.begin(), e.loops.end(), l) != e.loops.end()) {
          loc += ":" + l;
          break;
        }
      throw ConflictError({Conflict::ComputeOnSameOp, e, in, loc});
    }
    if (e.kind == PrimKind::Relay && in.kind == PrimKind::Relay &&
        e.array == in.array)
      throw ConflictError(
          {Conflict::RelayDuplicate, e, in, in.func + ":" + in.array});
  }
}

} // namespace

void Composer::compose(Schedule &top, const Schedule &sub,
                       const std::string &id) {
  const Module &tm = top.program();
  const Module &sm = sub.pristine;
  std::string base = originIn(sm, sub.func);

  std::vector<std::string> targets;
  if (!id.empty()) {
    std::string inst = base + "_" + id;
    const Func *f = tm.find(inst);
    if (!f || f->origin() != base)
      throw Error("compose: unknown instance id '" + id + "' for '" + base +
                  "'");
    targets.push_back(inst);
  } else {
    for (auto &f : tm.funcs)
      if (!f.isTemplate() && f.name != base && f.origin() == base)
        targets.push_back(f.name);
    if (targets.empty()) {
      if (!tm.find(sub.func))
        throw Error("compose: unknown function '" + sub.func + "'");
      targets.push_back(sub.func);
    }
  }

  int origin = nextOrigin();
  std::vector<PrimitiveRecord> incoming;
  std::set<std::string> seen;
  auto add = [&](PrimitiveRecord r) {
    r.origin = origin;
    if (seen.insert(r.str()).second)
      incoming.push_back(std::move(r));
  };
  std::map<std::string, Handle> handles;

  for (auto &t : targets) {
    std::set<std::string> scope = scopeOf(tm, t);
    std::map<std::string, std::vector<std::string>> mapped;
    auto map = [&](const std::string &f) {
      auto it = mapped.find(f);
      if (it != mapped.end())
        return it->second;
      std::vector<std::string> out;
      if (f == sub.func || f == base)
        out = {t};
      else
        out = counterparts(tm, sm, f, scope);
      if (out.empty() && tm.find(f))
        out = {f};
      if (out.empty())
        throw Error("compose: function '" + f + "' of schedule '" +
                    sub.func + "' has no counterpart under '" + t + "'");
      return mapped[f] = out;
    };
    for (auto &r : sub.records) {
      if (r.kind == PrimKind::Compose) {
        add(r);
        continue;
      }
      for (auto &f : map(r.func)) {
        PrimitiveRecord c = r;
        c.func = f;
        if (c.kind == PrimKind::Relay && c.dst.rfind("pe:", 0) != 0) {
          auto d = counterparts(tm, sm, c.dst, scopeOf(tm, f));
          if (d.size() == 1)
            c.dst = d[0];
        }
        add(std::move(c));
      }
    }
    for (auto &[name, h] : sub.handles)
      for (auto &f : map(h.func)) {
        Handle c = h;
        c.func = f;
        handles[f + "." + name] = c;
        if (targets.size() == 1)
          handles[name] = c;
      }
  }

  for (auto &r : incoming)
    checkConflicts(top.records, r);

  PrimitiveRecord marker;
  marker.kind = PrimKind::Compose;
  marker.func = top.func;
  marker.dst = sub.func;
  marker.asName = id;
  marker.origin = origin;
  top.records.push_back(marker);
  for (auto &r : incoming)
    top.records.push_back(std::move(r));
  for (auto &[n, h] : handles)
    top.handles.emplace(n, h);
  top.stale = true;
}

//===----------------------------------------------------------------------===//
// Interface unification
//===----------------------------------------------------------------------===//

namespace {

PrimitiveRecord lastPartition(const std::vector<PrimitiveRecord> &records,
                              const std::string &func,
                              const std::string &array) {
  for (auto it = records.rbegin(); it != records.rend(); ++it)
    if (it->kind == PrimKind::Partition && it->func == func &&
        it->array == array)
      return *it;
  PrimitiveRecord r;
  r.kind = PrimKind::Partition;
  r.func = func;
  r.array = array;
  r.mode = PartKind::Top;
  return r;
}

} // namespace

void Composer::unify(Schedule &top) {
  Module m = top.program();
  const Module before = m;
  for (auto &r : top.records) {
    if (r.kind != PrimKind::Partition)
      continue;
    const Func *f = m.find(r.func);
    if (!f || f->isTemplate())
      continue;
    const Memory *mem = f->findMem(r.array);
    if (!mem)
      continue;
    try {
      propagateLayout(m, r.func, r.array, mem->part);
    } catch (Error &) {
      throw ConflictError({Conflict::LayoutContradiction, r, r,
                           r.func + ":" + r.array});
    }
  }

  // Record every change so that replay reproduces it.
  std::vector<PrimitiveRecord> added;
  for (auto &f : m.funcs) {
    if (f.isTemplate())
      continue;
    const Func &old = before.get(f.name);
    auto note = [&](const Memory &mem) {
      const Memory *o = old.findMem(mem.name);
      if (!o || o->part == mem.part)
        return;
      for (size_t d = 0; d < mem.part.dims.size(); ++d) {
        const PartitionBase &b = mem.part.dims[d];
        if (b.kind == PartKind::Top)
          continue;
        PrimitiveRecord r;
        r.kind = PrimKind::Partition;
        r.func = f.name;
        r.array = mem.name;
        r.mode = b.kind;
        r.factor = b.factor;
        r.axes = {static_cast<int>(d)};
        r.origin = top.origin;
        added.push_back(r);
      }
    };
    for (auto &p : f.params)
      note(p);
    for (auto &l : f.locals)
      note(l);
  }

  // Every call site must pass arrays the callee can address.
  for (auto &f : m.funcs) {
    if (f.isTemplate())
      continue;
    walk(f.body, [&](const Stmt &s) {
      if (s.kind != StmtKind::Call)
        return true;
      const Func *c = m.find(s.callee);
      if (!c)
        return true;
      for (size_t k = 0; k < s.args.size() && k < c->params.size(); ++k) {
        const Memory *a = f.findMem(s.args[k].name);
        const Memory &p = c->params[k];
        if (!a || !s.args[k].prefix.empty() ||
            a->part.shape != p.part.shape)
          continue;
        if (!callCompatible(p.part, a->part))
          throw ConflictError(
              {Conflict::LayoutContradiction,
               lastPartition(top.records, c->name, p.name),
               lastPartition(top.records, f.name, a->name),
               f.name + ":" + a->name + " -> " + c->name + ":" + p.name});
      }
      return true;
    });
  }

  if (added.empty())
    return;
  for (auto &r : added)
    top.records.push_back(r);
  top.program_ = replay(top.pristine, top.records);
  top.stale = false;
}

//===----------------------------------------------------------------------===//
// Build
//===----------------------------------------------------------------------===//

const Module &Composer::build(Schedule &s, std::vector<StreamEdge> *edges) {
  s.program();
  unify(s);

  Module sized = s.program_;
  std::vector<StreamEdge> found = sizeStreams(sized);
  bool changed = false;
  for (auto &r : s.records) {
    if (r.kind != PrimKind::Relay || r.depth != 0)
      continue;
    if (r.dst.rfind("pe:", 0) == 0) {
      r.depth = 2;
      changed = true;
      continue;
    }
    for (auto &e : found)
      if (e.func == r.func && e.memory == r.array && e.sized) {
        r.depth = e.depth;
        changed = true;
      }
  }
  if (changed) {
    s.program_ = replay(s.pristine, s.records);
    s.stale = false;
  }

  auto diags = verify(s.program_);
  if (!diags.empty()) {
    std::string msg = "build failed: " + diags[0].str();
    if (diags.size() > 1)
      msg += " (and " + std::to_string(diags.size() - 1) + " more)";
    throw Error(msg, diags[0].loc);
  }
  if (edges) {
    Module copy = s.program_;
    *edges = sizeStreams(copy);
    for (auto &e : *edges)
      for (auto &f : found)
        if (f.func == e.func && f.memory == e.memory)
          e.sized = f.sized;
  }
  return s.program_;
}

void compose(Schedule &top, const Schedule &sub, const std::string &id) {
  Composer::compose(top, sub, id);
}

void unifyInterfaces(Schedule &top) { Composer::unify(top); }

const Module &build(Schedule &s, std::vector<StreamEdge> *edges) {
  return Composer::build(s, edges);
}

} // namespace miniallo
