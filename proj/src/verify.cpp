/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/verify.hpp"
#include "miniallo/analysis.hpp"

#include <functional>
#include <set>

namespace miniallo {

std::string Diagnostic::str() const {
  return func + ":" + std::to_string(loc.line) + ":" +
         std::to_string(loc.col) + ": [" + rule + "] " + message;
}

namespace {

class Verifier {
public:
  explicit Verifier(const Module &m) : m_(m) {}

  std::vector<Diagnostic> run() {
    std::set<std::string> names;
    for (auto &f : m_.funcs) {
      if (!names.insert(f.name).second)
        add("duplicate-function", f, "function '" + f.name +
                                         "' is defined more than once",
            f.loc);
    }
    if (!m_.top.empty() && !m_.find(m_.top))
      diags_.push_back({"missing-top", m_.top, "top function not found", {}});
    for (auto &f : m_.funcs)
      if (!f.isTemplate())
        checkFunc(f);
    checkRecursion();
    for (auto &f : m_.funcs)
      if (!f.isTemplate())
        checkStreams(f);
    return std::move(diags_);
  }

private:
  void add(const std::string &rule, const Func &f, const std::string &msg,
           Loc loc) {
    diags_.push_back({rule, f.name, msg, loc});
  }

  void checkMem(const Func &f, const Memory &mem) {
    for (auto s : mem.type.shape)
      if (s < 1)
        add("bad-shape", f, "memory '" + mem.name + "' has extent < 1",
            mem.loc);
    if (mem.part.shape != mem.type.shape ||
        mem.part.dims.size() != mem.type.shape.size()) {
      add("illegal-partition", f,
          "partition of '" + mem.name + "' does not match its shape",
          mem.loc);
      return;
    }
    for (size_t d = 0; d < mem.part.dims.size(); ++d)
      if (!legalBase(mem.part.dims[d], mem.type.shape[d]))
        add("illegal-partition", f,
            "illegal factor on '" + mem.name + "' dim " + std::to_string(d),
            mem.loc);
    if (mem.storage.isStream() && mem.storage.depth < 0)
      add("bad-stream", f, "negative stream depth on '" + mem.name + "'",
          mem.loc);
  }

  void checkExpr(const Func &f, const ExprP &e,
                 const std::vector<std::string> &vars, Loc loc) {
    if (!e->typed && e->kind != ExprKind::IntLit &&
        e->kind != ExprKind::FloatLit)
      add("untyped-expr", f, "expression '" + exprStr(e) + "' has no type",
          loc);
    if (e->kind == ExprKind::Var &&
        std::find(vars.begin(), vars.end(), e->name) == vars.end())
      add("unbound-var", f, "variable '" + e->name + "' is not in scope",
          loc);
    if (e->kind == ExprKind::Load) {
      const Memory *mem = f.findMem(e->name);
      if (!mem)
        add("unknown-memory", f, "unknown memory '" + e->name + "'", loc);
      else if (static_cast<int>(e->args.size()) != mem->type.rank())
        add("rank-mismatch", f, "wrong number of indices on '" + e->name + "'",
            loc);
    }
    for (auto &a : e->args)
      checkExpr(f, a, vars, loc);
  }

  void checkBody(const Func &f, const std::vector<Stmt> &body,
                 std::vector<std::string> &vars,
                 std::set<std::string> &labels) {
    for (auto &s : body) {
      switch (s.kind) {
      case StmtKind::For:
        if (s.extent < 1)
          add("bad-extent", f, "loop '" + s.label + "' has extent < 1",
              s.loc);
        if (s.label.empty() || !labels.insert(s.label).second)
          add("duplicate-label", f,
              "loop label '" + s.label + "' is empty or not unique", s.loc);
        if (s.attrs.unroll < 0 || s.attrs.pipeline < 0)
          add("bad-attribute", f, "negative loop attribute", s.loc);
        vars.push_back(s.var);
        checkBody(f, s.body, vars, labels);
        vars.pop_back();
        break;
      case StmtKind::If:
        checkExpr(f, s.cond, vars, s.loc);
        checkBody(f, s.body, vars, labels);
        break;
      case StmtKind::Store:
      case StmtKind::Fill: {
        const Memory *mem = f.findMem(s.array);
        if (!mem) {
          add("unknown-memory", f, "unknown memory '" + s.array + "'", s.loc);
        } else if (s.kind == StmtKind::Store &&
                   static_cast<int>(s.idx.size()) != mem->type.rank()) {
          add("rank-mismatch", f,
              "wrong number of indices on '" + s.array + "'", s.loc);
        }
        for (auto &i : s.idx)
          checkExpr(f, i, vars, s.loc);
        checkExpr(f, s.value, vars, s.loc);
        break;
      }
      case StmtKind::Call:
        checkCall(f, s, vars);
        break;
      }
    }
  }

  void checkCall(const Func &f, const Stmt &s,
                 const std::vector<std::string> &vars) {
    const Func *callee = m_.find(s.callee);
    if (!callee) {
      add("unresolved-callee", f, "call to unknown function '" + s.callee + "'",
          s.loc);
      return;
    }
    if (callee->isTemplate()) {
      add("uninstantiated-template", f,
          "call to template '" + s.callee + "'", s.loc);
      return;
    }
    if (callee->params.size() != s.args.size()) {
      add("arity-mismatch", f, "call to '" + s.callee + "' has " +
                                   std::to_string(s.args.size()) +
                                   " arguments",
          s.loc);
      return;
    }
    for (size_t i = 0; i < s.args.size(); ++i) {
      const CallArg &a = s.args[i];
      const Memory *mem = f.findMem(a.name);
      if (!mem) {
        add("unknown-memory", f, "unknown memory '" + a.name + "'", s.loc);
        continue;
      }
      for (auto &p : a.prefix)
        checkExpr(f, p, vars, s.loc);
      if (a.prefix.size() > mem->type.shape.size()) {
        add("rank-mismatch", f, "too many indices on '" + a.name + "'",
            s.loc);
        continue;
      }
      std::vector<int64_t> view(mem->type.shape.begin() +
                                    static_cast<long>(a.prefix.size()),
                                mem->type.shape.end());
      const Memory &p = callee->params[i];
      if (view != p.type.shape)
        add("arg-shape-mismatch", f,
            "argument '" + a.name + "' does not match '" + callee->name +
                ":" + p.name + "'",
            s.loc);
      if (mem->type.elem != p.type.elem)
        add("arg-type-mismatch", f,
            "argument '" + a.name + "' has element type " +
                mem->type.elem.str() + ", expected " + p.type.elem.str(),
            s.loc);
      if (a.prefix.empty() && view == p.type.shape &&
          mem->part.shape == p.part.shape &&
          !callCompatible(p.part, mem->part))
        add("layout-mismatch", f,
            "argument '" + a.name + "' is partitioned " + mem->part.str() +
                " but '" + callee->name + ":" + p.name + "' requires " +
                p.part.str(),
            s.loc);
    }
    if (!s.result.empty()) {
      const Memory *dst = f.findMem(s.result);
      const Memory *r = callee->findMem(callee->result);
      if (!dst || !r || !(dst->type == r->type))
        add("result-mismatch", f,
            "result of '" + s.callee + "' does not match '" + s.result + "'",
            s.loc);
    }
  }

  void checkFunc(const Func &f) {
    std::set<std::string> memNames;
    for (auto &p : f.params) {
      if (!memNames.insert(p.name).second)
        add("duplicate-memory", f, "memory '" + p.name + "' redeclared",
            p.loc);
      if (p.role != Role::Param)
        add("bad-role", f, "parameter '" + p.name + "' has a non-param role",
            p.loc);
      checkMem(f, p);
    }
    for (auto &l : f.locals) {
      if (!memNames.insert(l.name).second)
        add("duplicate-memory", f, "memory '" + l.name + "' redeclared",
            l.loc);
      checkMem(f, l);
    }
    if (!f.result.empty()) {
      const Memory *r = f.findMem(f.result);
      if (!r || r->role != Role::Result)
        add("bad-result", f, "returned memory '" + f.result + "' is invalid",
            f.loc);
    }
    std::vector<std::string> vars;
    std::set<std::string> labels;
    checkBody(f, f.body, vars, labels);
  }

  void checkRecursion() {
    std::map<std::string, int> state;
    std::function<void(const Func &)> dfs = [&](const Func &f) {
      state[f.name] = 1;
      for (auto &c : callees(f)) {
        const Func *g = m_.find(c);
        if (!g)
          continue;
        if (state[c] == 1) {
          add("recursion", f, "recursive call to '" + c + "'", f.loc);
          continue;
        }
        if (state[c] == 0)
          dfs(*g);
      }
      state[f.name] = 2;
    };
    for (auto &f : m_.funcs)
      if (state[f.name] == 0)
        dfs(f);
  }

  // Whole-memory streams must be read in exactly the order they are written.
  void checkStreams(const Func &f) {
    for (auto &mem : f.locals) {
      if (mem.storage.kind != StorageKind::Stream)
        continue;
      auto trace = accessTrace(m_, f, mem.name);
      if (!trace)
        continue;
      std::vector<std::vector<int64_t>> writes, reads;
      for (auto &a : *trace)
        (a.write ? writes : reads).push_back(a.idx);
      if (writes.size() != reads.size()) {
        add("stream-count-mismatch", f,
            "stream '" + mem.name + "' is written " +
                std::to_string(writes.size()) + " times but read " +
                std::to_string(reads.size()) + " times",
            mem.loc);
        continue;
      }
      for (size_t i = 0; i < writes.size(); ++i) {
        if (writes[i] != reads[i]) {
          std::string w, r;
          for (auto v : writes[i])
            w += (w.empty() ? "" : ",") + std::to_string(v);
          for (auto v : reads[i])
            r += (r.empty() ? "" : ",") + std::to_string(v);
          add("stream-order-violation", f,
              "stream '" + mem.name + "': access " + std::to_string(i) +
                  " writes [" + w + "] but reads [" + r + "]",
              mem.loc);
          break;
        }
      }
    }
  }

  const Module &m_;
  std::vector<Diagnostic> diags_;
};

} // namespace

std::vector<Diagnostic> verify(const Module &m) { return Verifier(m).run(); }

} // namespace miniallo
