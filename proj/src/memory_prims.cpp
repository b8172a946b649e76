/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/analysis.hpp"
#include "miniallo/dfg.hpp"
#include "prims.hpp"

#include <algorithm>
#include <climits>

namespace miniallo {

namespace {

struct AccessSite {
  std::vector<ExprP> idx;
  bool write = false;
  bool read = false;
};

// Collects every access to `mem` under `body`; rejects calls that pass it.
std::vector<AccessSite> accessesOf(const std::vector<Stmt> &body,
                                   const std::string &mem, const char *prim) {
  std::vector<AccessSite> out;
  auto loads = [&](const ExprP &e) {
    std::vector<const Expr *> ls;
    collectLoads(e, ls);
    for (auto *l : ls)
      if (l->name == mem)
        out.push_back({l->args, false, true});
  };
  walk(body, [&](const Stmt &s) {
    for (auto &i : s.idx)
      loads(i);
    if (s.value)
      loads(s.value);
    if (s.cond)
      loads(s.cond);
    if (s.kind == StmtKind::Store && s.array == mem)
      out.push_back({s.idx, true, s.update});
    if (s.kind == StmtKind::Fill && s.array == mem)
      throw Error(std::string(prim) + ": '" + mem +
                  "' is filled as a whole under the loop");
    if (s.kind == StmtKind::Call)
      for (auto &a : s.args) {
        for (auto &p : a.prefix)
          loads(p);
        if (a.name == mem)
          throw Error(std::string(prim) + ": '" + mem +
                      "' is passed to a call under the loop");
      }
    if (s.kind == StmtKind::Call && s.result == mem)
      throw Error(std::string(prim) + ": '" + mem +
                  "' receives a call result under the loop");
    return true;
  });
  return out;
}

// Rewrites every load and store of `mem` in `body` through `fn`.
void rewriteAccesses(
    std::vector<Stmt> &body, const std::string &mem, const std::string &to,
    const std::function<std::vector<ExprP>(const std::vector<ExprP> &)> &fn) {
  mapExprs(body, [&](const ExprP &e) {
    return rewriteLoads(e, [&](const Expr &l) -> ExprP {
      if (l.name != mem)
        return nullptr;
      return withType(mkLoad(to, fn(l.args), l.loc), l.type);
    });
  });
  walkMut(body, [&](Stmt &s) {
    if (s.kind == StmtKind::Store && s.array == mem) {
      s.array = to;
      s.idx = fn(s.idx);
    }
    return true;
  });
}

std::map<std::string, int64_t> loopExtents(const std::vector<Stmt> &body) {
  std::map<std::string, int64_t> out;
  walk(body, [&](const Stmt &s) {
    if (s.kind == StmtKind::For)
      out[s.var] = s.extent;
    return true;
  });
  return out;
}

// Nest of copy loops over `ext`, one variable per entry.
Stmt copyNest(const std::vector<std::string> &vars,
              const std::vector<int64_t> &ext, Stmt leaf,
              const std::set<std::string> &usedLabels) {
  Stmt cur = std::move(leaf);
  for (size_t d = vars.size(); d-- > 0;) {
    std::vector<Stmt> b;
    b.push_back(std::move(cur));
    cur = mkFor(vars[d], ext[d], std::move(b),
                freshName(usedLabels, "L_" + vars[d]));
  }
  return cur;
}

} // namespace

//===----------------------------------------------------------------------===//
// buffer_at
//===----------------------------------------------------------------------===//

void primBufferAt(Module &m, const PrimitiveRecord &r) {
  Func &f = targetFunc(m, r);
  Stmt *L = findLoop(f, r.loops[0]);
  const Memory *xp = f.findMem(r.array);
  if (!xp)
    throw Error("buffer_at: unknown memory '" + r.array + "'");
  if (xp->storage.isStream())
    throw Error("buffer_at: '" + r.array + "' is a stream");
  Memory X = *xp;
  if (X.type.rank() == 0)
    throw Error("buffer_at: '" + r.array + "' is a scalar");
  auto sites = accessesOf(L->body, X.name, "buffer_at");
  if (sites.empty())
    throw Error("buffer_at: '" + X.name + "' is not accessed under loop '" +
                L->label + "'");

  std::map<std::string, int64_t> innerExt = loopExtents(L->body);
  int rank = X.type.rank();
  std::vector<Affine> outer(rank);
  std::vector<int64_t> lo(rank, INT64_MAX), hi(rank, INT64_MIN);
  bool first = true, written = false;
  for (auto &site : sites) {
    written = written || site.write;
    for (int d = 0; d < rank; ++d) {
      auto a = toAffine(site.idx[d]);
      if (!a)
        throw Error("buffer_at: non-affine footprint for '" + X.name + "'");
      Affine o, in;
      for (auto &[v, c] : a->coef)
        (innerExt.count(v) ? in : o).coef[v] = c;
      in.constant = a->constant;
      if (first)
        outer[d] = o;
      else if (outer[d].coef != o.coef)
        throw Error("buffer_at: accesses to '" + X.name +
                    "' disagree outside loop '" + L->label + "'");
      auto rg = affineRange(in, innerExt);
      lo[d] = std::min(lo[d], rg->lo);
      hi[d] = std::max(hi[d], rg->hi);
    }
    first = false;
  }

  std::vector<int> kept;
  std::vector<int64_t> shape;
  for (int d = 0; d < rank; ++d)
    if (hi[d] > lo[d]) {
      kept.push_back(d);
      shape.push_back(hi[d] - lo[d] + 1);
    }

  std::string buf = r.asName;
  if (f.findMem(buf))
    throw Error("buffer_at: memory '" + buf + "' already exists");
  Memory B;
  B.name = buf;
  B.type = {X.type.elem, shape};
  B.part = PartitionType::none(shape);
  B.role = Role::Local;
  B.scope = L->label;
  B.loc = L->loc;

  // Inner part of an index: drop outer terms and the footprint base.
  auto toBuf = [&](const std::vector<ExprP> &idx) {
    std::vector<ExprP> out;
    for (int d : kept) {
      Affine a = *toAffine(idx[d]);
      for (auto &[v, c] : outer[d].coef)
        a.coef.erase(v);
      a.constant -= lo[d];
      out.push_back(withType(fromAffine(a), ElemType::index()));
    }
    return out;
  };
  std::vector<Stmt> compute = std::move(L->body);
  rewriteAccesses(compute, X.name, buf, toBuf);

  std::set<std::string> used = loopVars(f);
  for (auto &p : f.params)
    used.insert(p.name);
  for (auto &l : f.locals)
    used.insert(l.name);
  used.insert(buf);
  std::vector<std::string> vars;
  for (size_t k = 0; k < kept.size(); ++k) {
    vars.push_back(freshName(used, buf + "_" + std::to_string(k)));
    used.insert(vars.back());
  }
  std::vector<ExprP> xIdx(rank), bIdx;
  for (int d = 0; d < rank; ++d) {
    Affine base = outer[d];
    base.constant = lo[d];
    xIdx[d] = withType(fromAffine(base), ElemType::index());
  }
  for (size_t k = 0; k < kept.size(); ++k) {
    int d = kept[k];
    xIdx[d] = ixBin("+", xIdx[d], mkVar(vars[k]));
    bIdx.push_back(mkVar(vars[k]));
  }
  std::set<std::string> labels = loopLabels(f);
  for (auto &s : labelsIn(compute))
    labels.insert(s);

  std::vector<Stmt> nb;
  // Copy-in also covers footprint elements that are never written.
  {
    Stmt in = mkStore(buf, bIdx, withType(mkLoad(X.name, xIdx), X.type.elem));
    Stmt nest = copyNest(vars, shape, std::move(in), labels);
    for (auto &l : labelsIn({nest}))
      labels.insert(l);
    nb.push_back(std::move(nest));
  }
  for (auto &s : compute)
    nb.push_back(std::move(s));
  if (written) {
    Stmt out = mkStore(X.name, xIdx, withType(mkLoad(buf, bIdx), X.type.elem));
    nb.push_back(copyNest(vars, shape, std::move(out), labels));
  }
  L->body = std::move(nb);
  f.locals.push_back(std::move(B));
}

//===----------------------------------------------------------------------===//
// reuse_at
//===----------------------------------------------------------------------===//

void primReuseAt(Module &m, const PrimitiveRecord &r) {
  Func &f = targetFunc(m, r);
  Stmt *L = findLoop(f, r.loops[0]);
  const Memory *xp = f.findMem(r.array);
  if (!xp)
    throw Error("reuse_at: unknown memory '" + r.array + "'");
  Memory X = *xp;
  auto sites = accessesOf(L->body, X.name, "reuse_at");
  if (sites.empty())
    throw Error("reuse_at: '" + X.name + "' is not read under loop '" +
                L->label + "'");
  int rank = X.type.rank();
  int dstar = -1;
  int64_t cmin = INT64_MAX, cmax = INT64_MIN;
  for (auto &site : sites) {
    if (site.write)
      throw Error("reuse_at: '" + X.name + "' is written under loop '" +
                  L->label + "'");
    for (int d = 0; d < rank; ++d) {
      auto a = toAffine(site.idx[d]);
      if (!a)
        throw Error("reuse_at: non-constant offset in access to '" + X.name +
                    "'");
      int64_t c = a->coefOf(L->var);
      if (c == 0)
        continue;
      if (dstar >= 0 && dstar != d)
        throw Error("reuse_at: loop '" + L->label +
                    "' indexes more than one dimension of '" + X.name + "'");
      dstar = d;
      if (c != 1 || a->coef.size() != 1)
        throw Error("reuse_at: non-constant offset in access to '" + X.name +
                    "'");
      cmin = std::min(cmin, a->constant);
      cmax = std::max(cmax, a->constant);
    }
  }
  if (dstar < 0)
    throw Error("reuse_at: no reuse of '" + X.name + "' along loop '" +
                L->label + "'");
  for (auto &site : sites) {
    auto a = toAffine(site.idx[dstar]);
    if (a->coefOf(L->var) != 1)
      throw Error("reuse_at: access to '" + X.name +
                  "' does not follow loop '" + L->label + "'");
  }
  int64_t span = cmax - cmin + 1;
  if (span > L->extent)
    throw Error("reuse_at: offsets span " + std::to_string(span) +
                " exceeds the extent of loop '" + L->label + "'");

  std::string buf = r.asName;
  if (f.findMem(buf))
    throw Error("reuse_at: memory '" + buf + "' already exists");
  std::vector<int64_t> shape = X.type.shape;
  shape[dstar] = span;
  Memory B;
  B.name = buf;
  B.type = {X.type.elem, shape};
  B.part = PartitionType::none(shape);
  B.role = Role::Local;
  B.loc = L->loc;
  std::vector<Stmt *> path = loopPath(f, L);
  if (path.size() >= 2)
    B.scope = path[path.size() - 2]->label;

  std::vector<Stmt> body = std::move(L->body);
  rewriteAccesses(body, X.name, buf, [&](const std::vector<ExprP> &idx) {
    std::vector<ExprP> out = idx;
    out[dstar] = ixInt(toAffine(idx[dstar])->constant - cmin);
    return out;
  });
  if (span > 1)
    substVarsIn(body, {{L->var, ixBin("-", mkVar(L->var), ixInt(span - 1))}});

  // Shift register update along the reused dimension.
  std::set<std::string> used = loopVars(f);
  for (auto &p : f.params)
    used.insert(p.name);
  for (auto &l : f.locals)
    used.insert(l.name);
  used.insert(buf);
  std::vector<std::string> vars;
  std::vector<int64_t> ext;
  std::vector<ExprP> base(rank);
  for (int d = 0; d < rank; ++d) {
    if (d == dstar)
      continue;
    vars.push_back(freshName(used, buf + "_" + std::to_string(d)));
    used.insert(vars.back());
    ext.push_back(X.type.shape[d]);
    base[d] = mkVar(vars.back());
  }
  auto at = [&](ExprP e) {
    std::vector<ExprP> v = base;
    v[dstar] = std::move(e);
    return v;
  };
  std::vector<Stmt> shifts;
  for (int64_t s = 0; s + 1 < span; ++s)
    shifts.push_back(mkStore(
        buf, at(ixInt(s)), withType(mkLoad(buf, at(ixInt(s + 1))), X.type.elem)));
  shifts.push_back(mkStore(
      buf, at(ixInt(span - 1)),
      withType(mkLoad(X.name, at(ixBin("+", mkVar(L->var), ixInt(cmin)))),
               X.type.elem)));
  std::set<std::string> labels = loopLabels(f);
  for (auto &s : labelsIn(body))
    labels.insert(s);
  std::vector<Stmt> nb;
  if (vars.empty()) {
    for (auto &s : shifts)
      nb.push_back(std::move(s));
  } else {
    Stmt cur;
    std::vector<Stmt> inner = std::move(shifts);
    for (size_t k = vars.size(); k-- > 0;) {
      std::string l = freshName(labels, "L_" + vars[k]);
      labels.insert(l);
      Stmt loop = mkFor(vars[k], ext[k], std::move(inner), l);
      inner.clear();
      inner.push_back(std::move(loop));
    }
    nb.push_back(std::move(inner[0]));
  }
  if (span > 1) {
    Stmt guard =
        mkIf(ixCmp(">=", mkVar(L->var), ixInt(span - 1)), std::move(body));
    guard.loc = L->loc;
    nb.push_back(std::move(guard));
  } else {
    for (auto &s : body)
      nb.push_back(std::move(s));
  }
  L->extent += span - 1;
  L->body = std::move(nb);
  f.locals.push_back(std::move(B));
}

//===----------------------------------------------------------------------===//
// partition
//===----------------------------------------------------------------------===//

void primPartition(Module &m, const PrimitiveRecord &r) {
  Func &f = targetFunc(m, r);
  const Memory *mem = f.findMem(r.array);
  if (!mem)
    throw Error("partition: unknown memory '" + r.array + "'");
  int rank = mem->type.rank();
  std::vector<int> dims = r.axes;
  if (dims.empty())
    for (int d = 0; d < rank; ++d)
      dims.push_back(d);
  PartitionType target = PartitionType::none(mem->type.shape);
  for (int d : dims) {
    if (d < 0 || d >= rank)
      throw Error("partition: dimension " + std::to_string(d) +
                  " out of range for '" + r.array + "'");
    PartitionBase b;
    switch (r.mode) {
    case PartKind::Bottom:
      b = PartitionBase::bottom();
      break;
    case PartKind::Cyclic:
      b = PartitionBase::cyclic(r.factor);
      break;
    case PartKind::Block:
      b = PartitionBase::block(r.factor);
      break;
    case PartKind::Top:
      b = PartitionBase::top();
      break;
    }
    if (!legalBase(b, mem->type.shape[d]))
      throw Error("partition: illegal factor " + std::to_string(r.factor) +
                  " for extent " + std::to_string(mem->type.shape[d]) +
                  " of '" + r.array + "'");
    target.dims[d] = b;
  }
  propagateLayout(m, f.name, r.array, target);
}

} // namespace miniallo
