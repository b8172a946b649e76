/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_IR_HPP
#define MINIALLO_IR_HPP

#include "miniallo/diag.hpp"
#include "miniallo/layout.hpp"
#include "miniallo/types.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace miniallo {

//===----------------------------------------------------------------------===//
// Expressions (immutable, shared)
//===----------------------------------------------------------------------===//

enum class ExprKind { IntLit, FloatLit, Var, Load, Binary, Unary, Cast };

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  ElemType type;
  bool typed = false;
  // Var: loop variable. Load: array. Binary/Unary: operator.
  std::string name;
  std::vector<ExprP> args;
  i128 ival = 0;
  double fval = 0;
  Loc loc;
};

ExprP mkInt(i128 v, Loc loc = {});
ExprP mkFloat(double v, Loc loc = {});
ExprP mkVar(const std::string &name, Loc loc = {});
ExprP mkLoad(const std::string &array, std::vector<ExprP> idx, Loc loc = {});
ExprP mkBin(const std::string &op, ExprP a, ExprP b, Loc loc = {});
ExprP mkUnary(const std::string &op, ExprP a, Loc loc = {});
ExprP mkCast(const ElemType &t, ExprP a, Loc loc = {});
ExprP withType(const ExprP &e, const ElemType &t);

std::string exprStr(const ExprP &e);
// Replaces loop variables by expressions.
ExprP substVars(const ExprP &e, const std::map<std::string, ExprP> &m);
// Renames arrays referenced by loads.
ExprP renameArrays(const ExprP &e,
                   const std::map<std::string, std::string> &m);
// Rewrites every load through `fn`; fn returns nullptr to keep the node.
ExprP rewriteLoads(const ExprP &e,
                   const std::function<ExprP(const Expr &)> &fn);
void collectVars(const ExprP &e, std::vector<std::string> &out);
void collectLoads(const ExprP &e, std::vector<const Expr *> &out);
bool exprEqual(const ExprP &a, const ExprP &b);
// Constant folding for index arithmetic; nullopt when not constant.
std::optional<int64_t> constEval(const ExprP &e);

//===----------------------------------------------------------------------===//
// Statements (value semantics, deep-copied with the module)
//===----------------------------------------------------------------------===//

enum class StmtKind { For, Store, Fill, Call, If };

struct LoopAttrs {
  int unroll = 0;   // 0: none
  int pipeline = 0; // requested II, 0: not pipelined
  bool operator==(const LoopAttrs &o) const {
    return unroll == o.unroll && pipeline == o.pipeline;
  }
};

struct CallArg {
  std::string name;
  std::vector<ExprP> prefix; // partial index into the operand
};

// Unresolved template argument at a call site.
struct TemplateArg {
  enum Kind { Type, Int, Id } kind = Int;
  ElemType type;
  int64_t value = 0;
  std::string id;
};

struct Stmt {
  StmtKind kind = StmtKind::Store;
  Loc loc;

  // For
  std::string var;
  std::string label;
  std::string band;
  int64_t extent = 0;
  LoopAttrs attrs;

  // Store / Fill
  std::string array;
  std::vector<ExprP> idx;
  ExprP value;
  bool update = false;
  ElemType opType; // type of the accumulation for updates

  // Call
  std::string callee;
  std::vector<CallArg> args;
  std::string result;
  std::vector<TemplateArg> targs;
  bool hasTargs = false;

  // If
  ExprP cond;

  std::vector<Stmt> body;
  std::map<std::string, std::string> tags;
};

Stmt mkFor(const std::string &var, int64_t extent, std::vector<Stmt> body,
           const std::string &label = "");
Stmt mkStore(const std::string &array, std::vector<ExprP> idx, ExprP value,
             bool update = false);
Stmt mkCall(const std::string &callee, std::vector<CallArg> args);
Stmt mkIf(ExprP cond, std::vector<Stmt> body);

// Pre-order walk; fn returns false to skip children.
void walk(const std::vector<Stmt> &body,
          const std::function<bool(const Stmt &)> &fn);
void walkMut(std::vector<Stmt> &body,
             const std::function<bool(Stmt &)> &fn);
// Applies an expression rewrite to every expression in the subtree.
void mapExprs(std::vector<Stmt> &body,
              const std::function<ExprP(const ExprP &)> &fn);
void substVarsIn(std::vector<Stmt> &body,
                 const std::map<std::string, ExprP> &m);
void renameArraysIn(std::vector<Stmt> &body,
                    const std::map<std::string, std::string> &m);

//===----------------------------------------------------------------------===//
// Memories, functions, modules
//===----------------------------------------------------------------------===//

enum class Role { Param, Local, Result };
enum class StorageKind { Dram, Bram, Stream, StreamArray };

struct Storage {
  StorageKind kind = StorageKind::Bram;
  int64_t depth = 0; // 0 means "size automatically"
  bool operator==(const Storage &o) const {
    return kind == o.kind && depth == o.depth;
  }
  bool isStream() const {
    return kind == StorageKind::Stream || kind == StorageKind::StreamArray;
  }
};
std::string storageStr(const Storage &s);

struct Memory {
  std::string name;
  TensorType type;
  PartitionType part;
  Storage storage;
  Role role = Role::Local;
  Loc loc;
  // Label of the loop whose iterations own this memory ("" = function).
  std::string scope;
  // Parse-time only: type still to be inferred from a call result.
  bool pendingType = false;
};

struct TemplateParam {
  std::string name;
  bool isIndex = false;
  std::vector<ElemType> allowed;
};

struct Func {
  std::string name;
  Loc loc;
  std::vector<TemplateParam> tparams;
  std::string templateText; // source of a template definition
  int templateLine = 0;
  std::vector<Memory> params;
  std::vector<Memory> locals;
  std::vector<Stmt> body;
  std::string result; // returned local, "" if none
  TensorType retType;  // declared `->` type when hasRet
  bool hasRet = false;
  std::map<std::string, std::string> attrs;

  bool isTemplate() const { return !tparams.empty(); }
  Memory *findMem(const std::string &n);
  const Memory *findMem(const std::string &n) const;
  std::string origin() const {
    auto it = attrs.find("origin");
    return it == attrs.end() ? name : it->second;
  }
};

struct Module {
  std::vector<Func> funcs;
  std::string top;
  std::map<std::string, int64_t> consts;
  std::string file;

  Func *find(const std::string &n);
  const Func *find(const std::string &n) const;
  Func &get(const std::string &n);
  const Func &get(const std::string &n) const;
};

// Finds loops by var name, label or band within one function.
std::vector<Stmt *> findLoops(Func &f, const std::string &name);
Stmt *findLoop(Func &f, const std::string &name); // unique or throws
// Path of loops from the function body down to and including `target`.
std::vector<Stmt *> loopPath(Func &f, const Stmt *target);
// Names of functions called anywhere in `f`.
std::vector<std::string> callees(const Func &f);
// Functions reachable from `root` (including root), in call order.
std::vector<std::string> reachable(const Module &m, const std::string &root);
// Arrays read / written under a statement list.
void accessedArrays(const std::vector<Stmt> &body,
                    std::vector<std::string> &reads,
                    std::vector<std::string> &writes);

// Assigns default labels and validates loop-name uniqueness; also
// defaults storages. This is the AST to IR lowering step.
void buildIr(Module &m);

} // namespace miniallo

#endif // MINIALLO_IR_HPP
