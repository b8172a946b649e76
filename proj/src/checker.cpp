/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/frontend.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace miniallo {

namespace {

//===----------------------------------------------------------------------===//
// Expression typing
//===----------------------------------------------------------------------===//

bool isLiteral(const ExprP &e) {
  return (e->kind == ExprKind::IntLit || e->kind == ExprKind::FloatLit) &&
         !e->typed;
}

// Gives an untyped literal the type demanded by its context.
ExprP adoptLiteral(const ExprP &lit, const ElemType &ctx) {
  if (lit->kind == ExprKind::IntLit) {
    if (ctx.isFloat())
      return withType(mkFloat(static_cast<double>(lit->ival), lit->loc), ctx);
    if (ctx.isIndex())
      return withType(lit, ElemType::index());
    return withType(lit, ElemType::intTy(bitsForSigned(lit->ival)));
  }
  if (!ctx.isFloat())
    throw Error("no implicit float→int conversion", lit->loc);
  return withType(lit, ctx);
}

ExprP defaultLiteral(const ExprP &lit) {
  if (lit->kind == ExprKind::IntLit)
    return withType(lit, ElemType::intTy(bitsForSigned(lit->ival)));
  return withType(lit, ElemType::floatTy(64));
}

class Checker {
public:
  Checker(Module &m, Func &f) : m_(m), f_(f) {}

  ExprP type(const ExprP &e) {
    switch (e->kind) {
    case ExprKind::IntLit:
    case ExprKind::FloatLit:
      return e->typed ? e : defaultLiteral(e);
    case ExprKind::Var:
      return withType(e, ElemType::index());
    case ExprKind::Load: {
      const Memory *mem = f_.findMem(e->name);
      if (!mem)
        throw Error("use of unbound name '" + e->name + "'", e->loc);
      if (mem->pendingType)
        throw Error("type of '" + e->name + "' is unknown", e->loc);
      if (static_cast<int>(e->args.size()) != mem->type.rank())
        throw Error("'" + e->name + "' has rank " +
                        std::to_string(mem->type.rank()) + " but " +
                        std::to_string(e->args.size()) +
                        " indices were given",
                    e->loc);
      auto c = std::make_shared<Expr>(*e);
      for (auto &a : c->args)
        a = typeIndex(a);
      c->type = mem->type.elem;
      c->typed = true;
      return c;
    }
    case ExprKind::Cast: {
      auto c = std::make_shared<Expr>(*e);
      c->args[0] = type(e->args[0]);
      return c;
    }
    case ExprKind::Unary: {
      auto c = std::make_shared<Expr>(*e);
      c->args[0] = type(e->args[0]);
      const ElemType &t = c->args[0]->type;
      if (e->name == "not") {
        if (t.isFloat())
          throw Error("'not' requires an integral operand", e->loc);
        c->type = ElemType::uintTy(1);
      } else if (t.isFloat() || t.isIndex()) {
        c->type = t;
      } else {
        int w = std::min(kMaxWidth, t.width + 1);
        c->type = t.isFixedFamily() ? ElemType::fixedTy(w, t.frac)
                                    : ElemType::intTy(w);
      }
      c->typed = true;
      return c;
    }
    case ExprKind::Binary: {
      auto c = std::make_shared<Expr>(*e);
      ExprP a = e->args[0], b = e->args[1];
      bool la = isLiteral(a), lb = isLiteral(b);
      if (la && !lb) {
        b = type(b);
        a = adoptLiteral(a, b->type);
      } else if (lb && !la) {
        a = type(a);
        b = adoptLiteral(b, a->type);
      } else {
        a = type(a);
        b = type(b);
      }
      auto r = promoteBinary(e->name, a->type, b->type);
      if (!r.type)
        throw Error(r.error, e->loc);
      c->args = {a, b};
      c->type = *r.type;
      c->typed = true;
      return c;
    }
    }
    return e;
  }

  ExprP typeIndex(const ExprP &e) {
    ExprP t = isLiteral(e) ? adoptLiteral(e, ElemType::index()) : type(e);
    if (t->type.isFloat())
      throw Error("index expressions must be integral", e->loc);
    return t;
  }

  // Coerces a value into a store of type `to`.
  ExprP coerce(const ExprP &v, const ElemType &to, Loc loc) {
    if (isLiteral(v)) {
      if (v->kind == ExprKind::IntLit && to.isFloat())
        return withType(mkFloat(static_cast<double>(v->ival), v->loc), to);
      if (v->kind == ExprKind::FloatLit && !to.isFloat())
        throw Error("no implicit float→int conversion", loc);
      if (v->kind == ExprKind::IntLit && to.isFixedFamily())
        return mkCast(to, defaultLiteral(v), loc);
      return withType(v, to);
    }
    ExprP t = type(v);
    if (t->type == to)
      return t;
    if (!storeCompatible(t->type, to))
      throw Error(std::string("no implicit ") +
                      (t->type.isFloat() ? "float→int" : "int→float") +
                      " conversion",
                  loc);
    return mkCast(to, t, loc);
  }

  void checkBody(std::vector<Stmt> &body) {
    for (auto &s : body)
      checkStmt(s);
  }

  void checkStmt(Stmt &s) {
    switch (s.kind) {
    case StmtKind::For:
      checkBody(s.body);
      return;
    case StmtKind::If:
      s.cond = type(s.cond);
      if (s.cond->type.isFloat())
        throw Error("condition must be integral", s.loc);
      checkBody(s.body);
      return;
    case StmtKind::Fill:
    case StmtKind::Store: {
      Memory *mem = f_.findMem(s.array);
      if (!mem)
        throw Error("use of unbound name '" + s.array + "'", s.loc);
      if (mem->pendingType)
        throw Error("type of '" + s.array + "' is unknown", s.loc);
      if (s.kind == StmtKind::Store &&
          static_cast<int>(s.idx.size()) != mem->type.rank())
        throw Error("'" + s.array + "' has rank " +
                        std::to_string(mem->type.rank()) + " but " +
                        std::to_string(s.idx.size()) + " indices were given",
                    s.loc);
      for (auto &i : s.idx)
        i = typeIndex(i);
      const ElemType &to = mem->type.elem;
      if (s.update) {
        ExprP v = isLiteral(s.value) ? adoptLiteral(s.value, to)
                                     : type(s.value);
        auto r = promoteBinary("+", to, v->type);
        if (!r.type)
          throw Error(r.error, s.loc);
        s.value = v;
        s.opType = *r.type;
      } else {
        s.value = coerce(s.value, to, s.loc);
        s.opType = to;
      }
      return;
    }
    case StmtKind::Call:
      checkCall(s);
      return;
    }
  }

  void checkCall(Stmt &s) {
    const Func *callee = m_.find(s.callee);
    if (!callee)
      throw Error("unknown function '" + s.callee + "'", s.loc);
    if (callee->isTemplate())
      throw Error("template '" + s.callee + "' called without arguments",
                  s.loc);
    if (s.args.size() != callee->params.size())
      throw Error("call to '" + s.callee + "' expects " +
                      std::to_string(callee->params.size()) +
                      " arguments, got " + std::to_string(s.args.size()),
                  s.loc);
    for (size_t i = 0; i < s.args.size(); ++i) {
      auto &a = s.args[i];
      const Memory *mem = f_.findMem(a.name);
      if (!mem)
        throw Error("use of unbound name '" + a.name + "'", s.loc);
      if (mem->pendingType)
        throw Error("type of '" + a.name + "' is unknown", s.loc);
      if (static_cast<int>(a.prefix.size()) > mem->type.rank())
        throw Error("too many indices on argument '" + a.name + "'", s.loc);
      for (auto &p : a.prefix)
        p = typeIndex(p);
      TensorType view = mem->type;
      view.shape.erase(view.shape.begin(),
                       view.shape.begin() +
                           static_cast<long>(a.prefix.size()));
      const TensorType &want = callee->params[i].type;
      if (view.shape != want.shape)
        throw Error("shape mismatch for argument '" + a.name + "': " +
                        view.str() + " vs " + want.str(),
                    s.loc);
      if (view.elem != want.elem)
        throw Error("type mismatch for argument '" + a.name + "': " +
                        view.elem.str() + " vs " + want.elem.str(),
                    s.loc);
    }
    if (!s.result.empty()) {
      const Memory *r = callee->findMem(callee->result);
      if (!r)
        throw Error("'" + s.callee + "' does not return a value", s.loc);
      Memory *dst = f_.findMem(s.result);
      if (!(dst->type == r->type))
        throw Error("type mismatch for result '" + s.result + "': " +
                        dst->type.str() + " vs " + r->type.str(),
                    s.loc);
    }
  }

private:
  Module &m_;
  Func &f_;
};

std::string mangle(const TemplateArg &a) {
  if (a.kind == TemplateArg::Int)
    return std::to_string(a.value);
  std::string s = a.type.str(), out;
  for (char c : s)
    if (c == ',')
      out += '_';
    else if (c != '(' && c != ')')
      out += c;
  return out;
}

std::string argsKey(const std::vector<TemplateArg> &args) {
  std::string k;
  for (auto &a : args)
    k += (k.empty() ? "" : ",") + (a.kind == TemplateArg::Int
                                       ? std::to_string(a.value)
                                       : a.type.str());
  return k;
}

// Resolves call-site template arguments into instances, to a fixpoint.
void instantiateCalls(Module &m) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t fi = 0; fi < m.funcs.size(); ++fi) {
      if (m.funcs[fi].isTemplate())
        continue;
      std::vector<Stmt *> calls;
      walkMut(m.funcs[fi].body, [&](Stmt &s) {
        if (s.kind == StmtKind::Call && s.hasTargs)
          calls.push_back(&s);
        return true;
      });
      for (auto *s : calls) {
        std::vector<TemplateArg> args;
        std::string id;
        for (auto &a : s->targs) {
          if (a.kind == TemplateArg::Id) {
            if (!id.empty())
              throw Error("multiple instance ids", s->loc);
            id = a.id;
          } else {
            args.push_back(a);
          }
        }
        std::string callee = s->callee;
        Loc loc = s->loc;
        std::string inst;
        try {
          inst = instantiateTemplate(m, callee, args, id);
        } catch (Error &e) {
          e.setLoc(loc);
          throw;
        }
        // instantiateTemplate may grow m.funcs; re-find the call.
        Func &f = m.funcs[fi];
        walkMut(f.body, [&](Stmt &t) {
          if (t.kind == StmtKind::Call && t.hasTargs && t.callee == callee &&
              t.loc.line == loc.line && t.loc.col == loc.col) {
            t.callee = inst;
            t.targs.clear();
            t.hasTargs = false;
          }
          return true;
        });
        changed = true;
        break;
      }
      if (changed)
        break;
    }
  }
}

void resolvePending(Module &m, Func &f, std::set<std::string> &active,
                    std::set<std::string> &done) {
  if (done.count(f.name))
    return;
  if (active.count(f.name))
    throw Error("recursive call involving '" + f.name + "'", f.loc);
  active.insert(f.name);
  std::vector<Stmt *> calls;
  walkMut(f.body, [&](Stmt &s) {
    if (s.kind == StmtKind::Call)
      calls.push_back(&s);
    return true;
  });
  for (auto *s : calls) {
    Func *callee = m.find(s->callee);
    if (!callee || callee->isTemplate())
      continue;
    resolvePending(m, *callee, active, done);
    if (s->result.empty())
      continue;
    Memory *dst = f.findMem(s->result);
    const Memory *r = callee->findMem(callee->result);
    if (dst && dst->pendingType) {
      if (!r)
        throw Error("'" + callee->name + "' does not return a value",
                    s->loc);
      dst->type = r->type;
      dst->part = PartitionType::none(r->type.shape);
      dst->pendingType = false;
    }
  }
  if (f.hasRet) {
    if (f.result.empty())
      throw Error("function '" + f.name + "' is missing a return", f.loc);
    Memory *r = f.findMem(f.result);
    if (r->pendingType) {
      r->type = f.retType;
      r->part = PartitionType::none(r->type.shape);
      r->pendingType = false;
    }
    if (!(r->type == f.retType))
      throw Error("return type mismatch: " + r->type.str() + " vs " +
                      f.retType.str(),
                  f.loc);
  }
  for (auto &l : f.locals)
    if (l.pendingType)
      throw Error("cannot infer the type of '" + l.name + "'", l.loc);
  active.erase(f.name);
  done.insert(f.name);
}

} // namespace

std::string instantiateTemplate(Module &m, const std::string &func,
                                const std::vector<TemplateArg> &args,
                                const std::string &id) {
  const Func *t = m.find(func);
  if (!t)
    throw Error("unknown function '" + func + "'");
  if (!t->isTemplate()) {
    if (!args.empty())
      throw Error("'" + func + "' is not a template");
    if (id.empty())
      return func;
  }
  if (args.size() < t->tparams.size())
    throw Error("missing binding for template parameter '" +
                t->tparams[args.size()].name + "' of '" + func + "'");
  if (args.size() > t->tparams.size())
    throw Error("too many template arguments for '" + func + "'");
  std::map<std::string, Binding> bindings;
  for (size_t i = 0; i < args.size(); ++i) {
    const TemplateParam &p = t->tparams[i];
    const TemplateArg &a = args[i];
    if (p.isIndex) {
      if (a.kind != TemplateArg::Int)
        throw Error("template parameter '" + p.name + "' expects an index");
      if (a.value < 1)
        throw Error("index binding for '" + p.name + "' must be positive");
      bindings[p.name] = a.value;
      continue;
    }
    if (a.kind != TemplateArg::Type)
      throw Error("template parameter '" + p.name + "' expects a type");
    if (!p.allowed.empty()) {
      bool ok = false;
      std::string allowed;
      for (auto &al : p.allowed) {
        ok = ok || al == a.type;
        allowed += (allowed.empty() ? "" : ", ") + al.str();
      }
      if (!ok)
        throw Error("type " + a.type.str() + " for template parameter '" +
                    p.name + "' is not in the allowed set (" + allowed + ")");
    }
    bindings[p.name] = a.type;
  }

  std::string name;
  if (!id.empty()) {
    name = func + "_" + id;
  } else {
    name = func;
    for (auto &a : args)
      name += "_" + mangle(a);
  }
  std::string key = argsKey(args);
  if (const Func *existing = m.find(name)) {
    auto it = existing->attrs.find("targs");
    if (existing->origin() != func || it == existing->attrs.end() ||
        it->second != key)
      throw Error("instance name '" + name + "' already in use");
    return name;
  }

  Func inst;
  if (t->isTemplate()) {
    inst = parseFunction(t->templateText, t->templateLine, m.consts,
                         bindings);
  } else {
    inst = *t;
  }
  inst.name = name;
  inst.tparams.clear();
  inst.templateText.clear();
  inst.templateLine = 0;
  inst.attrs["origin"] = func;
  inst.attrs["targs"] = key;
  // Instances sit after their template and earlier instances of it.
  size_t pos = 0;
  for (size_t i = 0; i < m.funcs.size(); ++i)
    if (m.funcs[i].name == func || m.funcs[i].origin() == func)
      pos = i + 1;
  m.funcs.insert(m.funcs.begin() + static_cast<long>(pos), std::move(inst));
  return name;
}

void checkAndInfer(Module &m) {
  try {
    instantiateCalls(m);
    std::set<std::string> active, done;
    for (size_t i = 0; i < m.funcs.size(); ++i)
      if (!m.funcs[i].isTemplate())
        resolvePending(m, m.funcs[i], active, done);
    for (auto &f : m.funcs) {
      if (f.isTemplate())
        continue;
      Checker c(m, f);
      c.checkBody(f.body);
    }
    if (!m.top.empty() && !m.find(m.top))
      throw Error("unknown top function '" + m.top + "'");
  } catch (Error &e) {
    e.setFile(m.file);
    throw;
  }
}

Module loadKernel(const std::string &text, const std::string &file) {
  Module m = parseKernel(text, file);
  checkAndInfer(m);
  try {
    buildIr(m);
  } catch (Error &e) {
    e.setFile(file);
    throw;
  }
  return m;
}

Module loadKernelFile(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open '" + path + "'", {}, path);
  std::stringstream ss;
  ss << in.rdbuf();
  return loadKernel(ss.str(), path);
}

} // namespace miniallo
