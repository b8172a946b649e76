/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/analysis.hpp"
#include "miniallo/dfg.hpp"
#include "prims.hpp"

#include <algorithm>

namespace miniallo {

namespace {

std::string idxStr(const std::vector<int64_t> &v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

//===----------------------------------------------------------------------===//
// PE grid
//===----------------------------------------------------------------------===//

struct PeInfo {
  Func *fn = nullptr;
  std::vector<int64_t> index;
  size_t initPos = 0;
  std::string initVar;
  int64_t extent = 0;
  std::string src;
  std::vector<Affine> srcIdx; // in terms of initVar
};

std::vector<int64_t> parseIndex(const std::string &s) {
  std::vector<int64_t> out;
  size_t i = 0;
  while (i < s.size()) {
    size_t j = s.find(',', i);
    if (j == std::string::npos)
      j = s.size();
    out.push_back(std::stoll(s.substr(i, j - i)));
    i = j + 1;
  }
  return out;
}

// Renames `from` to `to` in an affine form.
Affine renamed(Affine a, const std::string &from, const std::string &to) {
  auto it = a.coef.find(from);
  if (it != a.coef.end()) {
    int64_t c = it->second;
    a.coef.erase(it);
    a.coef[to] += c;
  }
  return a;
}

bool sameAffine(const Affine &a, const Affine &b) {
  return a.coef == b.coef && a.constant == b.constant;
}

void analyzePe(PeInfo &pe, const std::string &buf) {
  Func &g = *pe.fn;
  const Memory *bm = g.findMem(buf);
  if (!bm || bm->role == Role::Param)
    throw Error("relay: '" + buf + "' is not a buffer of PE '" + g.name + "'");
  if (bm->type.rank() != 1)
    throw Error("relay: buffer '" + buf + "' must have rank 1");
  bool found = false;
  for (size_t k = 0; k < g.body.size(); ++k) {
    const Stmt &s = g.body[k];
    if (s.kind != StmtKind::For || s.body.size() != 1)
      continue;
    const Stmt &st = s.body[0];
    if (st.kind != StmtKind::Store || st.array != buf || st.update ||
        st.idx.size() != 1 || st.idx[0]->kind != ExprKind::Var ||
        st.idx[0]->name != s.var || st.value->kind != ExprKind::Load)
      continue;
    pe.initPos = k;
    pe.initVar = s.var;
    pe.extent = s.extent;
    pe.src = st.value->name;
    for (auto &i : st.value->args) {
      auto a = toAffine(i);
      if (!a)
        throw Error("relay: non-affine load feeding '" + buf + "'");
      pe.srcIdx.push_back(renamed(*a, s.var, "#t"));
    }
    found = true;
    break;
  }
  if (!found)
    throw Error("relay: no copy loop fills '" + buf + "' in PE '" + g.name +
                "'");
  if (bm->type.shape[0] != pe.extent)
    throw Error("relay: copy loop does not cover '" + buf + "'");
}

// Finds the loop whose variable indexes every load of `buf`.
Stmt *computeLoop(Func &g, const std::string &buf, size_t initPos) {
  std::string var;
  bool bad = false;
  for (size_t k = 0; k < g.body.size(); ++k) {
    if (k == initPos)
      continue;
    walk({g.body[k]}, [&](const Stmt &s) {
      if ((s.kind == StmtKind::Store || s.kind == StmtKind::Fill) &&
          s.array == buf)
        bad = true;
      if (s.kind == StmtKind::Call)
        for (auto &a : s.args)
          if (a.name == buf)
            bad = true;
      std::vector<const Expr *> loads;
      auto scan = [&](const ExprP &e) {
        if (e)
          collectLoads(e, loads);
      };
      scan(s.value);
      scan(s.cond);
      for (auto &i : s.idx)
        scan(i);
      for (auto *l : loads) {
        if (l->name != buf)
          continue;
        if (l->args.size() != 1 || l->args[0]->kind != ExprKind::Var) {
          bad = true;
          continue;
        }
        if (var.empty())
          var = l->args[0]->name;
        else if (var != l->args[0]->name)
          bad = true;
      }
      return true;
    });
  }
  if (bad || var.empty())
    throw Error("relay: accesses to '" + buf + "' in PE '" + g.name +
                "' are not a single streaming loop");
  Stmt *loop = nullptr;
  walkMut(g.body, [&](Stmt &s) {
    if (s.kind == StmtKind::For && s.var == var && !loop)
      loop = &s;
    return true;
  });
  if (!loop)
    throw Error("relay: no loop over '" + var + "' in PE '" + g.name + "'");
  return loop;
}

void relayPe(Module &m, const PrimitiveRecord &r) {
  Func &parent = targetFunc(m, r);
  std::string parentName = parent.name;
  std::string band = r.dst.substr(3);
  std::string tag = parentName + ":" + band;
  std::vector<PeInfo> pes;
  for (auto &g : m.funcs) {
    auto it = g.attrs.find("pe_of");
    if (it != g.attrs.end() && it->second == tag) {
      PeInfo p;
      p.fn = &g;
      p.index = parseIndex(g.attrs.at("pe_index"));
      pes.push_back(std::move(p));
    }
  }
  if (pes.empty())
    throw Error("relay: no PE grid for band '" + band + "' in '" +
                parentName + "'");
  size_t rank = pes[0].index.size();
  if (rank > 2)
    throw Error("relay: PE grids of rank > 2 are not supported");
  int axis = r.axis < 0 ? 0 : r.axis;
  if (axis >= static_cast<int>(rank))
    throw Error("relay: axis " + std::to_string(axis) + " out of range");
  std::vector<int64_t> gext(rank, 0);
  for (auto &p : pes)
    for (size_t d = 0; d < rank; ++d)
      gext[d] = std::max(gext[d], p.index[d] + 1);
  int other = rank == 2 ? 1 - axis : -1;
  int64_t gp = gext[axis];
  int64_t go = other >= 0 ? gext[other] : 1;
  auto oOf = [&](const PeInfo &p) { return other >= 0 ? p.index[other] : 0; };
  auto pOf = [&](const PeInfo &p) { return p.index[axis]; };

  for (auto &p : pes)
    analyzePe(p, r.array);
  const PeInfo *base = nullptr, *next = nullptr;
  for (auto &p : pes) {
    if (p.src != pes[0].src || p.extent != pes[0].extent ||
        p.srcIdx.size() != pes[0].srcIdx.size())
      throw Error("relay: PEs fill '" + r.array + "' from different sources");
    if (oOf(p) == 0 && pOf(p) == 0)
      base = &p;
    if (oOf(p) == 1 && pOf(p) == 0)
      next = &p;
  }
  if (!base)
    throw Error("relay: PE grid has no origin PE");
  // Source index of PE (o, p) must be base + o * delta.
  std::vector<int64_t> delta(base->srcIdx.size(), 0);
  if (next)
    for (size_t d = 0; d < delta.size(); ++d) {
      Affine diff = next->srcIdx[d];
      for (auto &[v, c] : base->srcIdx[d].coef) {
        diff.coef[v] -= c;
        if (diff.coef[v] == 0)
          diff.coef.erase(v);
      }
      diff.constant -= base->srcIdx[d].constant;
      if (!diff.isConstant())
        throw Error("relay: PE rows read '" + base->src +
                    "' with different strides");
      delta[d] = diff.constant;
    }
  for (auto &p : pes)
    for (size_t d = 0; d < delta.size(); ++d) {
      Affine want = base->srcIdx[d];
      want.constant += oOf(p) * delta[d];
      if (!sameAffine(want, p.srcIdx[d]))
        throw Error("relay: PE '" + p.fn->name + "' does not read the data "
                    "forwarded along axis " + std::to_string(axis));
    }

  const Func *pf = m.find(parentName);
  std::string srcParam = base->src;
  const Memory *srcMem = base->fn->findMem(srcParam);
  if (!srcMem || srcMem->role != Role::Param)
    throw Error("relay: '" + srcParam + "' is not a PE parameter");
  // Source name in the parent, taken from the call site of the origin PE.
  std::string srcParent;
  size_t srcPos = 0;
  for (size_t k = 0; k < base->fn->params.size(); ++k)
    if (base->fn->params[k].name == srcParam)
      srcPos = k;
  walk(pf->body, [&](const Stmt &s) {
    if (s.kind == StmtKind::Call && s.callee == base->fn->name)
      srcParent = s.args[srcPos].name;
    return true;
  });
  if (srcParent.empty())
    throw Error("relay: PE '" + base->fn->name + "' is never called");
  ElemType elem = srcMem->type.elem;
  int64_t E = base->extent;

  std::string fifo = freshMemName(*pf, srcParent + "_fifo");
  std::string drain = freshMemName(*pf, srcParent + "_drain");
  std::vector<int64_t> fshape =
      other >= 0 ? std::vector<int64_t>{go, gp + 1} : std::vector<int64_t>{gp + 1};
  auto fidx = [&](ExprP o, ExprP p) {
    std::vector<ExprP> v;
    if (other >= 0)
      v.push_back(std::move(o));
    v.push_back(std::move(p));
    return v;
  };
  Memory fm;
  fm.name = fifo;
  fm.type = {elem, fshape};
  fm.part = PartitionType::none(fshape);
  fm.storage = {StorageKind::StreamArray, r.depth};
  fm.role = Role::Local;

  // Rewrite each PE.
  std::map<std::string, std::vector<size_t>> removedArgs;
  for (auto &p : pes) {
    Func &g = *p.fn;
    g.body.erase(g.body.begin() + static_cast<long>(p.initPos));
    Stmt *loop = computeLoop(g, r.array, g.body.size() + 1);
    std::string reg = freshMemName(g, r.array + "_reg");
    ExprP o = ixInt(oOf(p)), pp = ixInt(pOf(p));
    ExprP regLoad = withType(mkLoad(reg, {}), elem);
    mapExprs(loop->body, [&](const ExprP &e) {
      return rewriteLoads(e, [&](const Expr &l) -> ExprP {
        return l.name == r.array ? regLoad : nullptr;
      });
    });
    Stmt in = mkStore(reg, {}, withType(mkLoad(fifo, fidx(o, pp)), elem));
    Stmt out = mkStore(fifo, fidx(o, ixInt(pOf(p) + 1)), regLoad);
    loop->body.insert(loop->body.begin(), std::move(in));
    loop->body.push_back(std::move(out));

    Memory rm;
    rm.name = reg;
    rm.type = {elem, {}};
    rm.part = PartitionType::none({});
    rm.role = Role::Local;
    g.locals.erase(std::remove_if(g.locals.begin(), g.locals.end(),
                                  [&](const Memory &l) {
                                    return l.name == r.array;
                                  }),
                   g.locals.end());
    g.locals.push_back(rm);

    std::vector<std::string> reads, writes;
    accessedArrays(g.body, reads, writes);
    std::vector<size_t> gone;
    std::vector<Memory> keep;
    for (size_t k = 0; k < g.params.size(); ++k) {
      const std::string &n = g.params[k].name;
      bool used = std::find(reads.begin(), reads.end(), n) != reads.end() ||
                  std::find(writes.begin(), writes.end(), n) != writes.end();
      if (used)
        keep.push_back(g.params[k]);
      else
        gone.push_back(k);
    }
    Memory fp = fm;
    fp.name = freshName([&] {
      std::set<std::string> u;
      for (auto &k : keep)
        u.insert(k.name);
      for (auto &l : g.locals)
        u.insert(l.name);
      return u;
    }(), fifo);
    fp.role = Role::Param;
    if (fp.name != fifo)
      renameArraysIn(g.body, {{fifo, fp.name}});
    keep.push_back(fp);
    g.params = std::move(keep);
    removedArgs[g.name] = gone;
  }

  // Parent: fifo declaration, feed and drain loops, call arguments.
  Func &P = m.get(parentName);
  std::vector<Stmt> *callList = nullptr;
  size_t firstCall = SIZE_MAX, lastCall = 0;
  walkMut(P.body, [&](Stmt &s) {
    if (s.kind != StmtKind::Call)
      return true;
    auto it = removedArgs.find(s.callee);
    if (it == removedArgs.end())
      return true;
    auto &gone = it->second;
    std::vector<CallArg> args;
    for (size_t k = 0; k < s.args.size(); ++k)
      if (std::find(gone.begin(), gone.end(), k) == gone.end())
        args.push_back(s.args[k]);
    args.push_back({fifo, {}});
    s.args = std::move(args);
    return true;
  });
  for (auto &p : pes) {
    Stmt *call = nullptr;
    walkMut(P.body, [&](Stmt &s) {
      if (s.kind == StmtKind::Call && s.callee == p.fn->name)
        call = &s;
      return true;
    });
    std::vector<Stmt> *lst = parentBody(P.body, call);
    if (callList && lst != callList)
      throw Error("relay: PE calls are not in one statement list");
    callList = lst;
    size_t at = static_cast<size_t>(call - lst->data());
    firstCall = std::min(firstCall, at);
    lastCall = std::max(lastCall, at);
  }

  P.locals.push_back(fm);
  Memory dm;
  dm.name = drain;
  dm.type = {elem, {go}};
  dm.part = PartitionType::none({go});
  dm.role = Role::Local;
  P.locals.push_back(dm);

  std::set<std::string> used = loopVars(P);
  for (auto &p : P.params)
    used.insert(p.name);
  for (auto &l : P.locals)
    used.insert(l.name);
  std::string kv = freshName(used, fifo + "_k");
  used.insert(kv);
  std::string ov = freshName(used, fifo + "_o");
  std::set<std::string> labels = loopLabels(P);
  std::string lk = freshName(labels, "load_" + srcParent);
  labels.insert(lk);
  std::string lo = freshName(labels, "load_" + srcParent + "_o");
  labels.insert(lo);
  std::string dk = freshName(labels, "drain_" + srcParent);
  labels.insert(dk);
  std::string dlo = freshName(labels, "drain_" + srcParent + "_o");

  std::vector<ExprP> sidx;
  for (size_t d = 0; d < base->srcIdx.size(); ++d) {
    Affine a = renamed(base->srcIdx[d], "#t", kv);
    if (delta[d])
      a.coef[ov] += delta[d];
    sidx.push_back(withType(fromAffine(a), ElemType::index()));
  }
  Stmt feed = mkStore(fifo, fidx(mkVar(ov), ixInt(0)),
                      withType(mkLoad(srcParent, sidx), elem));
  Stmt feedO = mkFor(ov, go, {}, lo);
  feedO.body.push_back(std::move(feed));
  Stmt feedK = mkFor(kv, E, {}, lk);
  feedK.body.push_back(std::move(feedO));

  Stmt dr = mkStore(drain, {mkVar(ov)},
                    withType(mkLoad(fifo, fidx(mkVar(ov), ixInt(gp))), elem));
  Stmt drO = mkFor(ov, go, {}, dlo);
  drO.body.push_back(std::move(dr));
  Stmt drK = mkFor(kv, E, {}, dk);
  drK.body.push_back(std::move(drO));

  callList->insert(callList->begin() + static_cast<long>(lastCall) + 1,
                   std::move(drK));
  callList->insert(callList->begin() + static_cast<long>(firstCall),
                   std::move(feedK));
  P.attrs["dataflow"] = "1";
}

//===----------------------------------------------------------------------===//
// Function-to-function streams
//===----------------------------------------------------------------------===//

// Moves reads of `p` that do not depend on inner loops in front of those
// loops, so each element is read once.
void hoistInvariantReads(Func &g, const std::string &p) {
  std::vector<std::string> enclosing;
  std::function<void(std::vector<Stmt> &, const std::string &)> visit =
      [&](std::vector<Stmt> &body, const std::string &scope) {
        for (size_t k = 0; k < body.size(); ++k) {
          Stmt &s = body[k];
          if (s.kind != StmtKind::For) {
            if (s.kind == StmtKind::If)
              visit(s.body, scope);
            continue;
          }
          // Loads of p directly under s (no guard in between) whose
          // indices only use enclosing loop variables.
          std::vector<ExprP> cands;
          std::function<void(const std::vector<Stmt> &)> scan =
              [&](const std::vector<Stmt> &b) {
                for (auto &t : b) {
                  if (t.kind == StmtKind::If)
                    continue;
                  std::vector<const Expr *> loads;
                  for (auto &i : t.idx)
                    collectLoads(i, loads);
                  if (t.value)
                    collectLoads(t.value, loads);
                  for (auto *l : loads) {
                    if (l->name != p)
                      continue;
                    std::vector<std::string> vs;
                    for (auto &a : l->args)
                      collectVars(a, vs);
                    bool inv = std::all_of(vs.begin(), vs.end(), [&](auto &v) {
                      return std::find(enclosing.begin(), enclosing.end(),
                                       v) != enclosing.end();
                    });
                    if (!inv)
                      continue;
                    auto le = std::make_shared<Expr>(*l);
                    bool dup = std::any_of(
                        cands.begin(), cands.end(),
                        [&](const ExprP &c) { return exprEqual(c, le); });
                    if (!dup)
                      cands.push_back(le);
                  }
                  scan(t.body);
                }
              };
          scan(s.body);
          std::vector<Stmt> pre;
          for (auto &c : cands) {
            std::string reg = freshMemName(g, p + "_reg");
            Memory rm;
            rm.name = reg;
            rm.type = {c->type, {}};
            rm.part = PartitionType::none({});
            rm.role = Role::Local;
            rm.scope = scope;
            g.locals.push_back(rm);
            ExprP regLoad = withType(mkLoad(reg, {}), c->type);
            mapExprs(s.body, [&](const ExprP &e) {
              return rewriteLoads(e, [&](const Expr &l) -> ExprP {
                auto le = std::make_shared<Expr>(l);
                return exprEqual(le, c) ? regLoad : nullptr;
              });
            });
            Stmt st = mkStore(reg, {}, c);
            st.loc = s.loc;
            pre.push_back(std::move(st));
          }
          enclosing.push_back(s.var);
          visit(s.body, s.label);
          enclosing.pop_back();
          if (!pre.empty()) {
            body.insert(body.begin() + static_cast<long>(k), pre.begin(),
                        pre.end());
            k += pre.size();
          }
        }
      };
  visit(g.body, "");
}

bool writesParam(const Module &m, const Func &g, const std::string &p,
                 int depth = 0) {
  bool w = false;
  walk(g.body, [&](const Stmt &s) {
    if ((s.kind == StmtKind::Store || s.kind == StmtKind::Fill) &&
        s.array == p)
      w = true;
    if (s.kind == StmtKind::Call && depth < 64) {
      const Func *c = m.find(s.callee);
      if (s.result == p)
        w = true;
      for (size_t k = 0; c && k < s.args.size() && k < c->params.size(); ++k)
        if (s.args[k].name == p && writesParam(m, *c, c->params[k].name,
                                               depth + 1))
          w = true;
    }
    return true;
  });
  return w;
}

void relayFunc(Module &m, const PrimitiveRecord &r) {
  Func &f = targetFunc(m, r);
  Memory *X = f.findMem(r.array);
  if (!X)
    throw Error("relay: unknown memory '" + r.array + "'");
  if (X->role == Role::Param)
    throw Error("relay: '" + r.array + "' is a parameter of '" + f.name + "'");
  if (X->storage.isStream())
    throw Error("relay: '" + r.array + "' is already a stream");
  const Func *dst = m.find(r.dst);
  if (!dst)
    throw Error("relay: unknown destination '" + r.dst + "'");

  std::vector<const Stmt *> producers, consumers;
  std::vector<std::string> consumerParams;
  bool direct = false;
  walk(f.body, [&](const Stmt &s) {
    if ((s.kind == StmtKind::Store || s.kind == StmtKind::Fill) &&
        s.array == X->name)
      direct = true;
    std::vector<const Expr *> loads;
    if (s.value)
      collectLoads(s.value, loads);
    if (s.cond)
      collectLoads(s.cond, loads);
    for (auto &i : s.idx)
      collectLoads(i, loads);
    for (auto *l : loads)
      if (l->name == X->name)
        direct = true;
    if (s.kind != StmtKind::Call)
      return true;
    const Func *c = m.find(s.callee);
    if (!c)
      throw Error("relay: unknown callee '" + s.callee + "'");
    if (s.result == X->name) {
      producers.push_back(&s);
      return true;
    }
    for (size_t k = 0; k < s.args.size(); ++k) {
      if (s.args[k].name != X->name)
        continue;
      if (!s.args[k].prefix.empty())
        throw Error("relay: '" + X->name + "' is passed in slices");
      if (writesParam(m, *c, c->params[k].name))
        producers.push_back(&s);
      else {
        consumers.push_back(&s);
        consumerParams.push_back(c->params[k].name);
      }
    }
    return true;
  });
  if (direct)
    throw Error("relay: '" + X->name + "' is accessed directly in '" +
                f.name + "'");
  if (producers.size() != 1)
    throw Error("relay: '" + X->name + "' needs exactly one producer, found " +
                std::to_string(producers.size()));
  if (consumers.size() != 1)
    throw Error("relay: '" + X->name + "' has " +
                std::to_string(consumers.size()) +
                (consumers.empty() ? " consumers" : " multiple consumers"));
  if (consumers[0]->callee != dst->name)
    throw Error("relay: destination '" + dst->name +
                "' is not the consumer of '" + X->name + "'");

  hoistInvariantReads(m.get(dst->name), consumerParams[0]);

  auto pt = accessTraceIn(m, f, {*producers[0]}, X->name);
  auto ct = accessTraceIn(m, f, {*consumers[0]}, X->name);
  if (pt && ct) {
    for (auto &a : *pt)
      if (!a.write)
        throw Error("relay: producer of '" + X->name + "' also reads it");
    for (auto &a : *ct)
      if (a.write)
        throw Error("relay: consumer of '" + X->name + "' also writes it");
    size_t n = std::min(pt->size(), ct->size());
    for (size_t k = 0; k < n; ++k)
      if ((*pt)[k].idx != (*ct)[k].idx)
        throw Error("relay: out-of-order access on '" + X->name +
                    "': element " + std::to_string(k) + " is written as " +
                    idxStr((*pt)[k].idx) + " but read as " +
                    idxStr((*ct)[k].idx));
    if (pt->size() != ct->size())
      throw Error("relay: '" + X->name + "' is written " +
                  std::to_string(pt->size()) + " times but read " +
                  std::to_string(ct->size()) + " times");
  } else {
    logInfo("relay: access order of '" + X->name +
            "' is not static; checked at simulation");
  }

  Storage st{StorageKind::Stream, r.depth};
  X->storage = st;
  std::string fname = f.name, xname = X->name;
  propagateStream(m, fname, xname, st);
  m.get(fname).attrs["dataflow"] = "1";
}

} // namespace

void primRelay(Module &m, const PrimitiveRecord &r) {
  if (r.depth < 0)
    throw Error("relay: depth must be >= 0");
  if (r.dst.rfind("pe:", 0) == 0)
    relayPe(m, r);
  else
    relayFunc(m, r);
}

} // namespace miniallo
