/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/ir.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace miniallo {

//===----------------------------------------------------------------------===//
// Expressions
//===----------------------------------------------------------------------===//

ExprP mkInt(i128 v, Loc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::IntLit;
  e->ival = v;
  e->loc = loc;
  return e;
}

ExprP mkFloat(double v, Loc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::FloatLit;
  e->fval = v;
  e->loc = loc;
  return e;
}

ExprP mkVar(const std::string &name, Loc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->name = name;
  e->type = ElemType::index();
  e->typed = true;
  e->loc = loc;
  return e;
}

ExprP mkLoad(const std::string &array, std::vector<ExprP> idx, Loc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Load;
  e->name = array;
  e->args = std::move(idx);
  e->loc = loc;
  return e;
}

ExprP mkBin(const std::string &op, ExprP a, ExprP b, Loc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Binary;
  e->name = op;
  e->args = {std::move(a), std::move(b)};
  e->loc = loc;
  return e;
}

ExprP mkUnary(const std::string &op, ExprP a, Loc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Unary;
  e->name = op;
  e->args = {std::move(a)};
  e->loc = loc;
  return e;
}

ExprP mkCast(const ElemType &t, ExprP a, Loc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Cast;
  e->type = t;
  e->typed = true;
  e->args = {std::move(a)};
  e->loc = loc;
  return e;
}

ExprP withType(const ExprP &e, const ElemType &t) {
  auto c = std::make_shared<Expr>(*e);
  c->type = t;
  c->typed = true;
  return c;
}

static int precOf(const Expr &e) {
  if (e.kind != ExprKind::Binary)
    return e.kind == ExprKind::Unary ? 6 : 7;
  const std::string &op = e.name;
  if (op == "or")
    return 1;
  if (op == "and")
    return 2;
  if (op == "+" || op == "-")
    return 4;
  if (op == "*" || op == "/" || op == "//" || op == "%")
    return 5;
  return 3;
}

static std::string floatStr(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos)
    s += ".0";
  return s;
}

std::string exprStr(const ExprP &e) {
  switch (e->kind) {
  case ExprKind::IntLit:
    return i128ToString(e->ival);
  case ExprKind::FloatLit:
    return floatStr(e->fval);
  case ExprKind::Var:
    return e->name;
  case ExprKind::Load: {
    if (e->args.empty())
      return e->name;
    std::string s = e->name + "[";
    for (size_t i = 0; i < e->args.size(); ++i)
      s += (i ? ", " : "") + exprStr(e->args[i]);
    return s + "]";
  }
  case ExprKind::Cast:
    return e->type.str() + "(" + exprStr(e->args[0]) + ")";
  case ExprKind::Unary: {
    std::string inner = exprStr(e->args[0]);
    if (precOf(*e->args[0]) < 6 ||
        (e->args[0]->kind == ExprKind::IntLit && e->args[0]->ival < 0))
      inner = "(" + inner + ")";
    return (e->name == "not" ? "not " : e->name) + inner;
  }
  case ExprKind::Binary: {
    int p = precOf(*e);
    std::string l = exprStr(e->args[0]), r = exprStr(e->args[1]);
    if (precOf(*e->args[0]) < p || (p == 3 && precOf(*e->args[0]) == 3))
      l = "(" + l + ")";
    if (precOf(*e->args[1]) <= p)
      r = "(" + r + ")";
    return l + " " + e->name + " " + r;
  }
  }
  return "?";
}

static ExprP rebuild(const ExprP &e, std::vector<ExprP> args) {
  bool same = args.size() == e->args.size();
  for (size_t i = 0; same && i < args.size(); ++i)
    same = args[i] == e->args[i];
  if (same)
    return e;
  auto c = std::make_shared<Expr>(*e);
  c->args = std::move(args);
  return c;
}

ExprP substVars(const ExprP &e, const std::map<std::string, ExprP> &m) {
  if (e->kind == ExprKind::Var) {
    auto it = m.find(e->name);
    return it == m.end() ? e : it->second;
  }
  std::vector<ExprP> args;
  for (auto &a : e->args)
    args.push_back(substVars(a, m));
  return rebuild(e, std::move(args));
}

ExprP renameArrays(const ExprP &e,
                   const std::map<std::string, std::string> &m) {
  std::vector<ExprP> args;
  for (auto &a : e->args)
    args.push_back(renameArrays(a, m));
  ExprP out = rebuild(e, std::move(args));
  if (e->kind == ExprKind::Load) {
    auto it = m.find(e->name);
    if (it != m.end()) {
      auto c = std::make_shared<Expr>(*out);
      c->name = it->second;
      return c;
    }
  }
  return out;
}

ExprP rewriteLoads(const ExprP &e,
                   const std::function<ExprP(const Expr &)> &fn) {
  std::vector<ExprP> args;
  for (auto &a : e->args)
    args.push_back(rewriteLoads(a, fn));
  ExprP out = rebuild(e, std::move(args));
  if (out->kind == ExprKind::Load)
    if (auto r = fn(*out))
      return r;
  return out;
}

void collectVars(const ExprP &e, std::vector<std::string> &out) {
  if (e->kind == ExprKind::Var &&
      std::find(out.begin(), out.end(), e->name) == out.end())
    out.push_back(e->name);
  for (auto &a : e->args)
    collectVars(a, out);
}

void collectLoads(const ExprP &e, std::vector<const Expr *> &out) {
  for (auto &a : e->args)
    collectLoads(a, out);
  if (e->kind == ExprKind::Load)
    out.push_back(e.get());
}

bool exprEqual(const ExprP &a, const ExprP &b) {
  if (a == b)
    return true;
  if (a->kind != b->kind || a->name != b->name ||
      a->args.size() != b->args.size())
    return false;
  if (a->kind == ExprKind::IntLit && a->ival != b->ival)
    return false;
  if (a->kind == ExprKind::FloatLit && a->fval != b->fval)
    return false;
  if (a->kind == ExprKind::Cast && a->type != b->type)
    return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!exprEqual(a->args[i], b->args[i]))
      return false;
  return true;
}

std::optional<int64_t> constEval(const ExprP &e) {
  switch (e->kind) {
  case ExprKind::IntLit:
    return static_cast<int64_t>(e->ival);
  case ExprKind::Unary: {
    auto a = constEval(e->args[0]);
    if (!a || e->name != "-")
      return std::nullopt;
    return -*a;
  }
  case ExprKind::Binary: {
    auto a = constEval(e->args[0]);
    auto b = constEval(e->args[1]);
    if (!a || !b)
      return std::nullopt;
    const std::string &op = e->name;
    if (op == "+")
      return *a + *b;
    if (op == "-")
      return *a - *b;
    if (op == "*")
      return *a * *b;
    if ((op == "//" || op == "/" || op == "%") && *b == 0)
      return std::nullopt;
    if (op == "//")
      return static_cast<int64_t>(floorDiv(*a, *b));
    if (op == "/")
      return *a / *b;
    if (op == "%")
      return static_cast<int64_t>(floorMod(*a, *b));
    if (op == "<")
      return *a < *b;
    if (op == "<=")
      return *a <= *b;
    if (op == ">")
      return *a > *b;
    if (op == ">=")
      return *a >= *b;
    if (op == "==")
      return *a == *b;
    if (op == "!=")
      return *a != *b;
    if (op == "and")
      return *a && *b;
    if (op == "or")
      return *a || *b;
    return std::nullopt;
  }
  default:
    return std::nullopt;
  }
}

//===----------------------------------------------------------------------===//
// Statements
//===----------------------------------------------------------------------===//

Stmt mkFor(const std::string &var, int64_t extent, std::vector<Stmt> body,
           const std::string &label) {
  Stmt s;
  s.kind = StmtKind::For;
  s.var = var;
  s.extent = extent;
  s.body = std::move(body);
  s.label = label;
  return s;
}

Stmt mkStore(const std::string &array, std::vector<ExprP> idx, ExprP value,
             bool update) {
  Stmt s;
  s.kind = StmtKind::Store;
  s.array = array;
  s.idx = std::move(idx);
  s.value = std::move(value);
  s.update = update;
  return s;
}

Stmt mkCall(const std::string &callee, std::vector<CallArg> args) {
  Stmt s;
  s.kind = StmtKind::Call;
  s.callee = callee;
  s.args = std::move(args);
  return s;
}

Stmt mkIf(ExprP cond, std::vector<Stmt> body) {
  Stmt s;
  s.kind = StmtKind::If;
  s.cond = std::move(cond);
  s.body = std::move(body);
  return s;
}

void walk(const std::vector<Stmt> &body,
          const std::function<bool(const Stmt &)> &fn) {
  for (auto &s : body)
    if (fn(s))
      walk(s.body, fn);
}

void walkMut(std::vector<Stmt> &body,
             const std::function<bool(Stmt &)> &fn) {
  for (auto &s : body)
    if (fn(s))
      walkMut(s.body, fn);
}

void mapExprs(std::vector<Stmt> &body,
              const std::function<ExprP(const ExprP &)> &fn) {
  walkMut(body, [&](Stmt &s) {
    for (auto &i : s.idx)
      i = fn(i);
    if (s.value)
      s.value = fn(s.value);
    if (s.cond)
      s.cond = fn(s.cond);
    for (auto &a : s.args)
      for (auto &p : a.prefix)
        p = fn(p);
    return true;
  });
}

void substVarsIn(std::vector<Stmt> &body,
                 const std::map<std::string, ExprP> &m) {
  mapExprs(body, [&](const ExprP &e) { return substVars(e, m); });
}

void renameArraysIn(std::vector<Stmt> &body,
                    const std::map<std::string, std::string> &m) {
  mapExprs(body, [&](const ExprP &e) { return renameArrays(e, m); });
  walkMut(body, [&](Stmt &s) {
    auto ren = [&](std::string &n) {
      auto it = m.find(n);
      if (it != m.end())
        n = it->second;
    };
    if (s.kind == StmtKind::Store || s.kind == StmtKind::Fill)
      ren(s.array);
    if (s.kind == StmtKind::Call) {
      for (auto &a : s.args)
        ren(a.name);
      if (!s.result.empty())
        ren(s.result);
    }
    return true;
  });
}

//===----------------------------------------------------------------------===//
// Functions and modules
//===----------------------------------------------------------------------===//

std::string storageStr(const Storage &s) {
  switch (s.kind) {
  case StorageKind::Dram:
    return "dram";
  case StorageKind::Bram:
    return "bram";
  case StorageKind::Stream:
    return "stream(" + std::to_string(s.depth) + ")";
  case StorageKind::StreamArray:
    return "stream_array(" + std::to_string(s.depth) + ")";
  }
  return "?";
}

Memory *Func::findMem(const std::string &n) {
  for (auto &m : params)
    if (m.name == n)
      return &m;
  for (auto &m : locals)
    if (m.name == n)
      return &m;
  return nullptr;
}

const Memory *Func::findMem(const std::string &n) const {
  return const_cast<Func *>(this)->findMem(n);
}

Func *Module::find(const std::string &n) {
  for (auto &f : funcs)
    if (f.name == n)
      return &f;
  return nullptr;
}

const Func *Module::find(const std::string &n) const {
  return const_cast<Module *>(this)->find(n);
}

Func &Module::get(const std::string &n) {
  if (auto *f = find(n))
    return *f;
  throw Error("unknown function '" + n + "'");
}

const Func &Module::get(const std::string &n) const {
  return const_cast<Module *>(this)->get(n);
}

std::vector<Stmt *> findLoops(Func &f, const std::string &name) {
  std::vector<Stmt *> out;
  walkMut(f.body, [&](Stmt &s) {
    if (s.kind == StmtKind::For &&
        (s.var == name || s.label == name || s.band == name))
      out.push_back(&s);
    return true;
  });
  return out;
}

Stmt *findLoop(Func &f, const std::string &name) {
  auto all = findLoops(f, name);
  if (all.empty())
    throw Error("unknown loop '" + name + "' in function '" + f.name + "'");
  if (all.size() > 1) {
    for (auto *s : all)
      if (s->label == name)
        return s;
    throw Error("ambiguous loop '" + name + "' in function '" + f.name +
                "'");
  }
  return all[0];
}

static bool pathTo(std::vector<Stmt> &body, const Stmt *target,
                   std::vector<Stmt *> &path) {
  for (auto &s : body) {
    if (s.kind == StmtKind::For)
      path.push_back(&s);
    if (&s == target)
      return true;
    if (pathTo(s.body, target, path))
      return true;
    if (s.kind == StmtKind::For)
      path.pop_back();
  }
  return false;
}

std::vector<Stmt *> loopPath(Func &f, const Stmt *target) {
  std::vector<Stmt *> path;
  if (!pathTo(f.body, target, path))
    return {};
  return path;
}

std::vector<std::string> callees(const Func &f) {
  std::vector<std::string> out;
  walk(f.body, [&](const Stmt &s) {
    if (s.kind == StmtKind::Call &&
        std::find(out.begin(), out.end(), s.callee) == out.end())
      out.push_back(s.callee);
    return true;
  });
  return out;
}

std::vector<std::string> reachable(const Module &m, const std::string &root) {
  std::vector<std::string> out;
  std::function<void(const std::string &)> visit =
      [&](const std::string &n) {
        if (std::find(out.begin(), out.end(), n) != out.end())
          return;
        out.push_back(n);
        if (auto *f = m.find(n))
          for (auto &c : callees(*f))
            visit(c);
      };
  visit(root);
  return out;
}

void accessedArrays(const std::vector<Stmt> &body,
                    std::vector<std::string> &reads,
                    std::vector<std::string> &writes) {
  auto add = [](std::vector<std::string> &v, const std::string &n) {
    if (std::find(v.begin(), v.end(), n) == v.end())
      v.push_back(n);
  };
  auto exprReads = [&](const ExprP &e) {
    std::vector<const Expr *> loads;
    collectLoads(e, loads);
    for (auto *l : loads)
      add(reads, l->name);
  };
  walk(body, [&](const Stmt &s) {
    for (auto &i : s.idx)
      exprReads(i);
    if (s.value)
      exprReads(s.value);
    if (s.cond)
      exprReads(s.cond);
    if (s.kind == StmtKind::Store || s.kind == StmtKind::Fill) {
      add(writes, s.array);
      if (s.update)
        add(reads, s.array);
    }
    if (s.kind == StmtKind::Call) {
      for (auto &a : s.args) {
        add(reads, a.name);
        add(writes, a.name);
        for (auto &p : a.prefix)
          exprReads(p);
      }
      if (!s.result.empty())
        add(writes, s.result);
    }
    return true;
  });
}

void buildIr(Module &m) {
  for (auto &f : m.funcs) {
    if (f.isTemplate())
      continue;
    std::set<std::string> seen;
    walkMut(f.body, [&](Stmt &s) {
      if (s.kind == StmtKind::For && !s.label.empty()) {
        if (seen.count(s.label))
          throw Error("duplicate loop label '" + s.label + "'", s.loc);
        seen.insert(s.label);
      }
      return true;
    });
    std::set<std::string> fresh = seen;
    // Explicit labels are kept; auto labels avoid them.
    std::function<void(std::vector<Stmt> &, int)> assign =
        [&](std::vector<Stmt> &body, int depth) {
          for (auto &s : body) {
            if (s.kind == StmtKind::For) {
              if (s.label.empty()) {
                std::string base = "L" + std::to_string(depth) + "_" + s.var;
                std::string l = base;
                for (int n = 1; fresh.count(l); ++n)
                  l = base + "_" + std::to_string(n);
                s.label = l;
                fresh.insert(l);
              }
              assign(s.body, depth + 1);
            } else {
              assign(s.body, depth);
            }
          }
        };
    assign(f.body, 0);
    // Parse-time scope ids become loop labels.
    std::map<std::string, std::string> scopeLabel;
    walkMut(f.body, [&](Stmt &s) {
      auto it = s.tags.find("scopeid");
      if (it != s.tags.end()) {
        scopeLabel[it->second] = s.label;
        s.tags.erase(it);
      }
      return true;
    });
    for (auto &l : f.locals) {
      auto it = scopeLabel.find(l.scope);
      if (it != scopeLabel.end())
        l.scope = it->second;
    }
    for (auto &p : f.params) {
      p.role = Role::Param;
      if (p.part.dims.size() != p.type.shape.size())
        p.part = PartitionType::none(p.type.shape);
    }
    for (auto &l : f.locals) {
      if (l.role == Role::Param)
        l.role = Role::Local;
      if (!f.result.empty() && l.name == f.result)
        l.role = Role::Result;
      if (l.part.dims.size() != l.type.shape.size())
        l.part = PartitionType::none(l.type.shape);
    }
  }
}

} // namespace miniallo
