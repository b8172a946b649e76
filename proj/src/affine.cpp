/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/analysis.hpp"

namespace miniallo {

//===----------------------------------------------------------------------===//
// Affine forms
//===----------------------------------------------------------------------===//

static Affine scaled(Affine a, int64_t k) {
  for (auto it = a.coef.begin(); it != a.coef.end();) {
    it->second *= k;
    if (it->second == 0)
      it = a.coef.erase(it);
    else
      ++it;
  }
  a.constant *= k;
  return a;
}

static Affine added(Affine a, const Affine &b, int64_t sign) {
  for (auto &[v, c] : b.coef) {
    a.coef[v] += sign * c;
    if (a.coef[v] == 0)
      a.coef.erase(v);
  }
  a.constant += sign * b.constant;
  return a;
}

std::optional<Affine> toAffine(const ExprP &e) {
  switch (e->kind) {
  case ExprKind::IntLit: {
    Affine a;
    a.constant = static_cast<int64_t>(e->ival);
    return a;
  }
  case ExprKind::Var: {
    Affine a;
    a.coef[e->name] = 1;
    return a;
  }
  case ExprKind::Cast:
    if (e->type.isFloat() || e->type.isFixedFamily())
      return std::nullopt;
    return toAffine(e->args[0]);
  case ExprKind::Unary:
    if (e->name != "-")
      return std::nullopt;
    if (auto a = toAffine(e->args[0]))
      return scaled(*a, -1);
    return std::nullopt;
  case ExprKind::Binary: {
    auto a = toAffine(e->args[0]);
    auto b = toAffine(e->args[1]);
    if (!a || !b)
      return std::nullopt;
    if (e->name == "+")
      return added(*a, *b, 1);
    if (e->name == "-")
      return added(*a, *b, -1);
    if (e->name == "*") {
      if (a->isConstant())
        return scaled(*b, a->constant);
      if (b->isConstant())
        return scaled(*a, b->constant);
    }
    return std::nullopt;
  }
  default:
    return std::nullopt;
  }
}

ExprP fromAffine(const Affine &a) {
  ExprP out;
  for (auto &[v, c] : a.coef) {
    ExprP term = c == 1 ? mkVar(v) : mkBin("*", mkVar(v), mkInt(c));
    if (c == -1)
      term = mkBin("*", mkVar(v), mkInt(-1));
    out = out ? mkBin("+", out, term) : term;
  }
  if (!out)
    return mkInt(a.constant);
  if (a.constant > 0)
    return mkBin("+", out, mkInt(a.constant));
  if (a.constant < 0)
    return mkBin("-", out, mkInt(-a.constant));
  return out;
}

std::optional<Interval>
affineRange(const Affine &a, const std::map<std::string, int64_t> &extents) {
  Interval r{a.constant, a.constant};
  for (auto &[v, c] : a.coef) {
    auto it = extents.find(v);
    if (it == extents.end())
      return std::nullopt;
    int64_t span = c * (it->second - 1);
    if (span >= 0)
      r.hi += span;
    else
      r.lo += span;
  }
  return r;
}

//===----------------------------------------------------------------------===//
// Concrete evaluation
//===----------------------------------------------------------------------===//

std::optional<int64_t> evalIndex(const ExprP &e, const Env &env) {
  switch (e->kind) {
  case ExprKind::IntLit:
    return static_cast<int64_t>(e->ival);
  case ExprKind::Var: {
    auto it = env.find(e->name);
    if (it == env.end())
      return std::nullopt;
    return it->second;
  }
  case ExprKind::Cast:
    if (e->type.isFloat() || e->type.isFixedFamily())
      return std::nullopt;
    if (auto v = evalIndex(e->args[0], env))
      return static_cast<int64_t>(
          wrapInt(*v, e->type.width, e->type.isSigned()));
    return std::nullopt;
  case ExprKind::Unary: {
    auto a = evalIndex(e->args[0], env);
    if (!a)
      return std::nullopt;
    if (e->name == "-")
      return -*a;
    if (e->name == "not")
      return *a == 0;
    return std::nullopt;
  }
  case ExprKind::Binary: {
    auto a = evalIndex(e->args[0], env);
    auto b = evalIndex(e->args[1], env);
    if (!a || !b)
      return std::nullopt;
    return constEval(mkBin(e->name, mkInt(*a), mkInt(*b)));
  }
  default:
    return std::nullopt;
  }
}

namespace {

struct Tracer {
  const Module &m;
  size_t cap;
  std::vector<Access> out;
  bool ok = true;

  void record(bool write, std::vector<int64_t> idx) {
    if (out.size() >= cap) {
      ok = false;
      return;
    }
    out.push_back({write, std::move(idx)});
  }

  void reads(const ExprP &e, const std::string &mem,
             const std::vector<int64_t> &prefix, const Env &env) {
    std::vector<const Expr *> loads;
    collectLoads(e, loads);
    for (auto *l : loads) {
      if (l->name != mem)
        continue;
      std::vector<int64_t> idx = prefix;
      for (auto &i : l->args) {
        auto v = evalIndex(i, env);
        if (!v) {
          ok = false;
          return;
        }
        idx.push_back(*v);
      }
      record(false, std::move(idx));
    }
  }

  void body(const Func &f, const std::vector<Stmt> &stmts,
            const std::string &mem, const std::vector<int64_t> &prefix,
            Env &env, int depth) {
    for (auto &s : stmts) {
      if (!ok)
        return;
      stmt(f, s, mem, prefix, env, depth);
    }
  }

  void stmt(const Func &f, const Stmt &s, const std::string &mem,
            const std::vector<int64_t> &prefix, Env &env, int depth) {
    switch (s.kind) {
    case StmtKind::For:
      for (int64_t i = 0; i < s.extent && ok; ++i) {
        env[s.var] = i;
        body(f, s.body, mem, prefix, env, depth);
      }
      env.erase(s.var);
      return;
    case StmtKind::If: {
      reads(s.cond, mem, prefix, env);
      auto c = evalIndex(s.cond, env);
      if (!c) {
        ok = false;
        return;
      }
      if (*c)
        body(f, s.body, mem, prefix, env, depth);
      return;
    }
    case StmtKind::Store:
    case StmtKind::Fill: {
      for (auto &i : s.idx)
        reads(i, mem, prefix, env);
      reads(s.value, mem, prefix, env);
      if (s.array != mem)
        return;
      const Memory *mm = f.findMem(mem);
      if (s.kind == StmtKind::Fill) {
        std::vector<int64_t> idx(mm->type.rank(), 0);
        int64_t n = mm->type.numel();
        for (int64_t k = 0; k < n && ok; ++k) {
          int64_t r = k;
          for (int d = mm->type.rank() - 1; d >= 0; --d) {
            idx[d] = r % mm->type.shape[d];
            r /= mm->type.shape[d];
          }
          std::vector<int64_t> full = prefix;
          full.insert(full.end(), idx.begin(), idx.end());
          record(true, full);
        }
        return;
      }
      std::vector<int64_t> idx = prefix;
      for (auto &i : s.idx) {
        auto v = evalIndex(i, env);
        if (!v) {
          ok = false;
          return;
        }
        idx.push_back(*v);
      }
      if (s.update)
        record(false, idx);
      record(true, std::move(idx));
      return;
    }
    case StmtKind::Call: {
      const Func *callee = m.find(s.callee);
      if (!callee || depth > 64) {
        ok = false;
        return;
      }
      for (size_t a = 0; a < s.args.size(); ++a) {
        for (auto &p : s.args[a].prefix)
          reads(p, mem, prefix, env);
        if (s.args[a].name != mem || a >= callee->params.size())
          continue;
        std::vector<int64_t> pre = prefix;
        for (auto &p : s.args[a].prefix) {
          auto v = evalIndex(p, env);
          if (!v) {
            ok = false;
            return;
          }
          pre.push_back(*v);
        }
        Env inner;
        body(*callee, callee->body, callee->params[a].name, pre, inner,
             depth + 1);
      }
      if (s.result == mem) {
        const Memory *r = callee->findMem(callee->result);
        if (!r) {
          ok = false;
          return;
        }
        // The result is copied out element by element.
        Env inner;
        int64_t n = r->type.numel();
        std::vector<int64_t> idx(r->type.rank(), 0);
        for (int64_t k = 0; k < n && ok; ++k) {
          int64_t rem = k;
          for (int d = r->type.rank() - 1; d >= 0; --d) {
            idx[d] = rem % r->type.shape[d];
            rem /= r->type.shape[d];
          }
          std::vector<int64_t> full = prefix;
          full.insert(full.end(), idx.begin(), idx.end());
          record(true, full);
        }
      }
      return;
    }
    }
  }
};

} // namespace

std::optional<std::vector<Access>>
accessTraceIn(const Module &m, const Func &f, const std::vector<Stmt> &body,
              const std::string &mem, size_t cap) {
  Tracer t{m, cap, {}, true};
  Env env;
  t.body(f, body, mem, {}, env, 0);
  if (!t.ok)
    return std::nullopt;
  return std::move(t.out);
}

std::optional<std::vector<Access>> accessTrace(const Module &m, const Func &f,
                                               const std::string &mem,
                                               size_t cap) {
  return accessTraceIn(m, f, f.body, mem, cap);
}

} // namespace miniallo
