/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/analysis.hpp"
#include "prims.hpp"

#include <algorithm>

namespace miniallo {

namespace {

// Moves loop-scoped locals from one label to another.
void rescope(Func &f, const std::string &from, const std::string &to) {
  for (auto &l : f.locals)
    if (l.scope == from)
      l.scope = to;
}

// Loop header fields that reorder permutes.
struct Header {
  std::string var, label, band;
  int64_t extent;
  LoopAttrs attrs;
  std::map<std::string, std::string> tags;
  Loc loc;
};

Header headerOf(const Stmt &s) {
  return {s.var, s.label, s.band, s.extent, s.attrs, s.tags, s.loc};
}

void setHeader(Stmt &s, const Header &h) {
  s.var = h.var;
  s.label = h.label;
  s.band = h.band;
  s.extent = h.extent;
  s.attrs = h.attrs;
  s.tags = h.tags;
  s.loc = h.loc;
}

// Follows single-loop bodies downward from `top`.
std::vector<Stmt *> perfectChain(Stmt *top) {
  std::vector<Stmt *> chain{top};
  while (chain.back()->body.size() == 1 &&
         chain.back()->body[0].kind == StmtKind::For)
    chain.push_back(&chain.back()->body[0]);
  return chain;
}

} // namespace

void primSplit(Module &m, const PrimitiveRecord &r) {
  Func &f = targetFunc(m, r);
  Stmt *L = findLoop(f, r.loops[0]);
  int64_t factor = r.factor;
  if (factor < 1)
    throw Error("split: illegal factor " + std::to_string(factor));
  if (L->extent % factor != 0)
    throw Error("split: factor " + std::to_string(factor) +
                " is non-divisible into extent " + std::to_string(L->extent) +
                " of loop '" + L->label + "'");
  std::set<std::string> vars = loopVars(f);
  for (auto &p : f.params)
    vars.insert(p.name);
  for (auto &l : f.locals)
    vars.insert(l.name);
  std::string ov = freshName(vars, L->var + "_outer");
  vars.insert(ov);
  std::string iv = freshName(vars, L->var + "_inner");
  std::set<std::string> labels = loopLabels(f);
  std::string ol = freshName(labels, L->label + ".outer");
  labels.insert(ol);
  std::string il = freshName(labels, L->label + ".inner");

  std::vector<Stmt> body = std::move(L->body);
  substVarsIn(body, {{L->var, ixBin("+", ixBin("*", mkVar(ov), ixInt(factor)),
                                   mkVar(iv))}});
  Stmt inner = mkFor(iv, factor, std::move(body), il);
  inner.band = L->band;
  inner.attrs = L->attrs;
  inner.loc = L->loc;

  std::string oldLabel = L->label;
  L->var = ov;
  L->label = ol;
  L->extent /= factor;
  L->attrs = {};
  L->body.clear();
  L->body.push_back(std::move(inner));
  rescope(f, oldLabel, il);
}

void primReorder(Module &m, const PrimitiveRecord &r) {
  Func &f = targetFunc(m, r);
  std::vector<Stmt *> named;
  for (auto &n : r.loops) {
    Stmt *s = findLoop(f, n);
    if (std::find(named.begin(), named.end(), s) != named.end())
      throw Error("reorder: loop '" + n + "' named twice");
    named.push_back(s);
  }
  if (named.size() == 1)
    return;
  // Outermost named loop: the one whose chain contains all others.
  std::vector<Stmt *> chain;
  for (Stmt *cand : named) {
    auto c = perfectChain(cand);
    bool all = std::all_of(named.begin(), named.end(), [&](Stmt *s) {
      return std::find(c.begin(), c.end(), s) != c.end();
    });
    if (all) {
      chain = c;
      break;
    }
  }
  if (chain.empty())
    throw Error("reorder: loops are not in one perfect loop nest");
  std::vector<size_t> pos;
  for (Stmt *s : named)
    pos.push_back(static_cast<size_t>(
        std::find(chain.begin(), chain.end(), s) - chain.begin()));
  std::vector<size_t> slots = pos;
  std::sort(slots.begin(), slots.end());
  std::vector<Header> hs;
  for (Stmt *s : named)
    hs.push_back(headerOf(*s));
  std::set<std::string> moved;
  for (auto &h : hs)
    moved.insert(h.label);
  for (size_t k = 0; k < slots.size(); ++k)
    setHeader(*chain[slots[k]], hs[k]);
  // Per-iteration locals of a moved loop now live in the deepest slot.
  const std::string &deepest = chain[slots.back()]->label;
  for (auto &l : f.locals)
    if (moved.count(l.scope))
      l.scope = deepest;
}

void primFuse(Module &m, const PrimitiveRecord &r) {
  Func &f = targetFunc(m, r);
  std::vector<Stmt *> ls;
  for (auto &n : r.loops)
    ls.push_back(findLoop(f, n));
  for (size_t k = 0; k + 1 < ls.size(); ++k) {
    Stmt *a = ls[k];
    if (a->body.size() != 1 || &a->body[0] != ls[k + 1])
      throw Error("fuse: loops '" + a->label + "' and '" + ls[k + 1]->label +
                  "' are not adjacent in a perfect nest");
  }
  std::string var, label;
  int64_t extent = 1;
  LoopAttrs attrs;
  for (Stmt *s : ls) {
    var += s->var + "_";
    label += s->label + "_";
    extent *= s->extent;
    if (s->attrs.pipeline)
      attrs.pipeline = s->attrs.pipeline;
    if (s->attrs.unroll)
      attrs.unroll = s->attrs.unroll;
  }
  std::set<std::string> vars = loopVars(f);
  for (auto &p : f.params)
    vars.insert(p.name);
  for (auto &l : f.locals)
    vars.insert(l.name);
  var = freshName(vars, var + "fused");
  label = freshName(loopLabels(f), label + "fused");

  std::map<std::string, ExprP> sub;
  int64_t stride = 1;
  for (size_t k = ls.size(); k-- > 0;) {
    ExprP e = mkVar(var);
    if (stride > 1)
      e = ixBin("//", e, ixInt(stride));
    if (k > 0)
      e = ixBin("%", e, ixInt(ls[k]->extent));
    sub[ls[k]->var] = e;
    stride *= ls[k]->extent;
  }
  std::vector<Stmt> body = std::move(ls.back()->body);
  substVarsIn(body, sub);
  std::vector<std::string> oldLabels;
  for (Stmt *s : ls)
    oldLabels.push_back(s->label);
  Stmt *top = ls[0];
  std::string band = top->band;
  Loc loc = top->loc;
  auto tags = top->tags;
  *top = mkFor(var, extent, std::move(body), label);
  top->band = band;
  top->attrs = attrs;
  top->loc = loc;
  top->tags = tags;
  for (auto &o : oldLabels)
    rescope(f, o, label);
}

void primUnroll(Module &m, const PrimitiveRecord &r) {
  Func &f = targetFunc(m, r);
  Stmt *L = findLoop(f, r.loops[0]);
  if (r.factor < 1)
    throw Error("unroll: illegal factor " + std::to_string(r.factor));
  if (r.factor > L->extent)
    throw Error("unroll: factor " + std::to_string(r.factor) +
                " exceeds trip count " + std::to_string(L->extent) +
                " of loop '" + L->label + "'");
  if (r.factor == 1)
    return;
  L->attrs.unroll = static_cast<int>(r.factor);
}

void primPipeline(Module &m, const PrimitiveRecord &r) {
  Func &f = targetFunc(m, r);
  Stmt *L = findLoop(f, r.loops[0]);
  if (r.ii < 1)
    throw Error("pipeline: initiation interval must be >= 1");
  L->attrs.pipeline = static_cast<int>(r.ii);
}

//===----------------------------------------------------------------------===//
// unfold
//===----------------------------------------------------------------------===//

void primUnfold(Module &m, const PrimitiveRecord &r) {
  Func &f = targetFunc(m, r);
  const std::string &band = r.loops[0];
  std::vector<Stmt *> bandLoops;
  walkMut(f.body, [&](Stmt &s) {
    if (s.kind == StmtKind::For && (s.band == band || s.label == band))
      bandLoops.push_back(&s);
    return true;
  });
  if (bandLoops.empty())
    throw Error("unfold: unknown band '" + band + "' in function '" + f.name +
                "'");
  for (size_t k = 0; k + 1 < bandLoops.size(); ++k)
    if (bandLoops[k]->body.size() != 1 ||
        &bandLoops[k]->body[0] != bandLoops[k + 1])
      throw Error("unfold: band '" + band + "' is not a perfect loop band");
  std::vector<int> axes = r.axes;
  if (axes.empty())
    for (size_t k = 0; k < bandLoops.size(); ++k)
      axes.push_back(static_cast<int>(k));
  std::sort(axes.begin(), axes.end());
  for (size_t k = 0; k < axes.size(); ++k)
    if (axes[k] != static_cast<int>(k) ||
        axes[k] >= static_cast<int>(bandLoops.size()))
      throw Error("unfold: axes must be the leading loops of band '" + band +
                  "'");
  std::vector<Stmt *> U(bandLoops.begin(),
                        bandLoops.begin() + static_cast<long>(axes.size()));
  std::vector<Stmt> &B = U.back()->body;

  // Enclosing loop variables cannot cross into the PE functions.
  std::set<std::string> uvars;
  for (Stmt *u : U)
    uvars.insert(u->var);
  std::vector<Stmt *> path = loopPath(f, U[0]);
  {
    std::vector<std::string> used;
    mapExprs(B, [&](const ExprP &e) {
      collectVars(e, used);
      return e;
    });
    for (size_t k = 0; k + 1 < path.size(); ++k)
      if (std::find(used.begin(), used.end(), path[k]->var) != used.end())
        throw Error("unfold: body references enclosing loop '" +
                    path[k]->label + "'");
  }

  // Locals owned by the band move into each PE.
  std::set<std::string> inner = labelsIn(B);
  std::set<std::string> ulabels;
  for (Stmt *u : U)
    ulabels.insert(u->label);
  std::vector<Memory> moved;
  std::set<std::string> movedNames;
  for (auto &l : f.locals)
    if (inner.count(l.scope) || ulabels.count(l.scope)) {
      moved.push_back(l);
      movedNames.insert(l.name);
    }

  // Dependence checks: stores to shared memories must be distinct per PE.
  std::set<std::string> written;
  walk(B, [&](const Stmt &s) {
    if ((s.kind == StmtKind::Store || s.kind == StmtKind::Fill) &&
        !movedNames.count(s.array))
      written.insert(s.array);
    if (s.kind == StmtKind::Call)
      for (auto &a : s.args)
        if (!movedNames.count(a.name))
          written.insert(a.name);
    return true;
  });
  std::map<std::string, std::vector<std::vector<ExprP>>> storeIdx;
  walk(B, [&](const Stmt &s) {
    if (s.kind == StmtKind::Fill && written.count(s.array))
      throw Error("unfold: every PE writes all of '" + s.array + "'");
    if (s.kind == StmtKind::Call)
      for (auto &a : s.args)
        if (written.count(a.name))
          throw Error("unfold: '" + a.name +
                      "' is passed to a call inside the unfolded band");
    if (s.kind != StmtKind::Store || !written.count(s.array))
      return true;
    std::vector<std::string> vs;
    for (auto &i : s.idx)
      collectVars(i, vs);
    for (auto &u : uvars)
      if (std::find(vs.begin(), vs.end(), u) == vs.end())
        throw Error("unfold: store to '" + s.array +
                    "' carries a dependence across unfolded loop '" + u +
                    "'");
    storeIdx[s.array].push_back(s.idx);
    return true;
  });
  std::vector<std::string> reads, writes;
  accessedArrays(B, reads, writes);
  mapExprs(B, [&](const ExprP &e) {
    std::vector<const Expr *> loads;
    collectLoads(e, loads);
    for (auto *l : loads) {
      auto it = storeIdx.find(l->name);
      if (it == storeIdx.end())
        continue;
      bool match = false;
      for (auto &si : it->second) {
        bool eq = si.size() == l->args.size();
        for (size_t d = 0; eq && d < si.size(); ++d)
          eq = exprEqual(si[d], l->args[d]);
        match = match || eq;
      }
      if (!match)
        throw Error("unfold: read of '" + l->name +
                    "' carries a dependence across unfolded loops");
    }
    return e;
  });

  // Shared memories become PE parameters, in parent declaration order.
  std::vector<const Memory *> shared;
  auto usedIn = [&](const std::string &n) {
    return std::find(reads.begin(), reads.end(), n) != reads.end() ||
           std::find(writes.begin(), writes.end(), n) != writes.end();
  };
  for (auto &p : f.params)
    if (usedIn(p.name))
      shared.push_back(&p);
  for (auto &l : f.locals)
    if (!movedNames.count(l.name) && usedIn(l.name))
      shared.push_back(&l);

  for (auto &l : moved) {
    // Accesses outside the band would observe per-PE copies.
    std::vector<Stmt> *pb = parentBody(f.body, U[0]);
    bool elsewhere = false;
    for (auto &s : *pb)
      if (&s != U[0] && touches({s}, l.name))
        elsewhere = true;
    for (size_t k = 0; k + 1 < path.size(); ++k) {
      std::vector<Stmt> *b = parentBody(f.body, path[k]);
      for (auto &s : *b)
        if (&s != path[k] && touches({s}, l.name))
          elsewhere = true;
    }
    if (elsewhere)
      throw Error("unfold: local '" + l.name +
                  "' is shared with code outside the band");
  }

  std::vector<int64_t> ext;
  for (Stmt *u : U)
    ext.push_back(u->extent);
  int64_t count = 1;
  for (auto e : ext)
    count *= e;

  std::vector<Func> pes;
  std::vector<Stmt> calls;
  for (int64_t n = 0; n < count; ++n) {
    std::vector<int64_t> idx(ext.size());
    int64_t rem = n;
    for (size_t d = ext.size(); d-- > 0;) {
      idx[d] = rem % ext[d];
      rem /= ext[d];
    }
    std::string suffix;
    for (auto v : idx)
      suffix += "_" + std::to_string(v);
    std::string name = "kernel" + suffix;
    if (m.find(name))
      name = f.name + "_kernel" + suffix;
    if (m.find(name))
      throw Error("unfold: function '" + name + "' already exists");

    Func pe;
    pe.name = name;
    pe.loc = f.loc;
    for (auto *mem : shared) {
      Memory p = *mem;
      p.role = Role::Param;
      p.scope.clear();
      pe.params.push_back(p);
    }
    for (auto &l : moved) {
      Memory c = l;
      if (ulabels.count(c.scope))
        c.scope.clear();
      pe.locals.push_back(c);
    }
    pe.body = B;
    std::map<std::string, ExprP> sub;
    for (size_t d = 0; d < U.size(); ++d)
      sub[U[d]->var] = ixInt(idx[d]);
    substVarsIn(pe.body, sub);
    std::string is;
    for (size_t d = 0; d < idx.size(); ++d)
      is += (d ? "," : "") + std::to_string(idx[d]);
    pe.attrs["pe_of"] = f.name + ":" + band;
    pe.attrs["pe_index"] = is;

    std::vector<CallArg> args;
    for (auto *mem : shared)
      args.push_back({mem->name, {}});
    Stmt call = mkCall(name, std::move(args));
    call.loc = U[0]->loc;
    calls.push_back(std::move(call));
    pes.push_back(std::move(pe));
  }

  std::vector<Stmt> *pb = parentBody(f.body, U[0]);
  size_t at = static_cast<size_t>(U[0] - pb->data());
  pb->erase(pb->begin() + static_cast<long>(at));
  pb->insert(pb->begin() + static_cast<long>(at), calls.begin(), calls.end());
  f.locals.erase(std::remove_if(f.locals.begin(), f.locals.end(),
                                [&](const Memory &l) {
                                  return movedNames.count(l.name) > 0;
                                }),
                 f.locals.end());

  std::string parent = f.name;
  auto it = std::find_if(m.funcs.begin(), m.funcs.end(),
                         [&](const Func &g) { return g.name == parent; });
  m.funcs.insert(it, std::make_move_iterator(pes.begin()),
                 std::make_move_iterator(pes.end()));
}

} // namespace miniallo
