/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/frontend.hpp"

#include <set>
#include <sstream>

namespace miniallo {

namespace {

//===----------------------------------------------------------------------===//
// Parser state
//===----------------------------------------------------------------------===//

using Annot = std::vector<std::pair<std::string, std::string>>;

class Parser {
public:
  Parser(std::vector<Token> toks, const std::map<std::string, int64_t> &consts,
         const std::map<std::string, Binding> &bindings)
      : toks_(std::move(toks)), consts_(consts), bindings_(bindings) {}

  const Token &peek(size_t ahead = 0) const {
    size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token &next() {
    const Token &t = peek();
    if (pos_ < toks_.size() - 1)
      ++pos_;
    return t;
  }
  bool isPunct(const std::string &p, size_t ahead = 0) const {
    return peek(ahead).kind == TokKind::Punct && peek(ahead).text == p;
  }
  bool isName(const std::string &n, size_t ahead = 0) const {
    return peek(ahead).kind == TokKind::Name && peek(ahead).text == n;
  }
  bool accept(const std::string &p) {
    if (isPunct(p)) {
      next();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string &msg) const {
    throw Error(msg, peek().loc);
  }
  std::string describe(const Token &t) const {
    switch (t.kind) {
    case TokKind::Newline:
      return "end of line";
    case TokKind::Indent:
      return "indent";
    case TokKind::Dedent:
      return "dedent";
    case TokKind::End:
      return "end of file";
    default:
      return "'" + t.text + "'";
    }
  }
  void expect(const std::string &p) {
    if (!accept(p))
      fail("expected '" + p + "' but found " + describe(peek()));
  }
  std::string expectName() {
    if (peek().kind != TokKind::Name)
      fail("expected a name but found " + describe(peek()));
    return next().text;
  }
  void expectNewline() {
    if (peek().kind != TokKind::Newline)
      fail("expected end of line but found " + describe(peek()));
    next();
  }

  // Top level.
  Module parseModule(const std::string &text);
  Func parseFuncDef(bool bodyOnlyIfConcrete);

private:
  // Types.
  bool atType() const;
  ElemType parseElemTypeTok();
  TensorType parseTensorType();
  int64_t parseConstExpr(const std::string &what);
  std::vector<TemplateParam> parseTemplateParams();

  Annot parseAnnot();

  // Statements.
  std::vector<Stmt> parseBlock();
  void parseStmt(std::vector<Stmt> &out);
  void parseFor(std::vector<Stmt> &out);
  void parseDecl(std::vector<Stmt> &out, const std::string &name, Loc loc);
  Stmt parseCallRest(const std::string &callee, Loc loc);
  std::vector<CallArg> parseCallArgs();

  // Expressions.
  ExprP parseExpr();
  ExprP parseOr();
  ExprP parseAnd();
  ExprP parseNot();
  ExprP parseCmp();
  ExprP parseAdd();
  ExprP parseMul();
  ExprP parseUnary();
  ExprP parsePrimary();
  ExprP resolveName(const std::string &n, Loc loc);

  Memory &declare(const std::string &name, const TensorType &t, Loc loc);
  bool isMemory(const std::string &n) const {
    return cur_ && cur_->findMem(n) != nullptr;
  }
  bool isLoopVar(const std::string &n) const {
    for (auto &v : loopVars_)
      if (v == n)
        return true;
    return false;
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::map<std::string, int64_t> consts_;
  const std::map<std::string, Binding> &bindings_;
  std::map<std::string, int64_t> localConsts_;
  Func *cur_ = nullptr;
  std::vector<std::string> loopVars_;
  std::vector<std::string> scopes_;
  int scopeCounter_ = 0;
};

//===----------------------------------------------------------------------===//
// Types and annotations
//===----------------------------------------------------------------------===//

bool Parser::atType() const {
  if (peek().kind != TokKind::Name)
    return false;
  const std::string &n = peek().text;
  if ((n == "fixed" || n == "ufixed") && isPunct("(", 1))
    return true;
  if (parseElemType(n))
    return true;
  auto it = bindings_.find(n);
  return it != bindings_.end() && std::holds_alternative<ElemType>(it->second);
}

ElemType Parser::parseElemTypeTok() {
  Loc loc = peek().loc;
  std::string n = expectName();
  if ((n == "fixed" || n == "ufixed") && isPunct("(")) {
    next();
    int64_t w = parseConstExpr("fixed-point width");
    expect(",");
    int64_t f = parseConstExpr("fixed-point fraction");
    expect(")");
    ElemType t = n == "fixed" ? ElemType::fixedTy(static_cast<int>(w),
                                                   static_cast<int>(f))
                              : ElemType::ufixedTy(static_cast<int>(w),
                                                    static_cast<int>(f));
    std::string err = t.validate();
    if (!err.empty())
      throw Error(err, loc);
    return t;
  }
  auto it = bindings_.find(n);
  if (it != bindings_.end()) {
    if (auto *t = std::get_if<ElemType>(&it->second))
      return *t;
    throw Error("'" + n + "' is an index parameter, not a type", loc);
  }
  if (auto t = parseElemType(n))
    return *t;
  throw Error("unknown type '" + n + "'", loc);
}

TensorType Parser::parseTensorType() {
  TensorType t;
  t.elem = parseElemTypeTok();
  if (accept("[")) {
    do {
      Loc loc = peek().loc;
      int64_t e = parseConstExpr("shape extent");
      if (e < 1)
        throw Error("shape extent must be positive", loc);
      t.shape.push_back(e);
    } while (accept(","));
    expect("]");
  }
  return t;
}

int64_t Parser::parseConstExpr(const std::string &what) {
  Loc loc = peek().loc;
  ExprP e = parseExpr();
  auto v = constEval(e);
  if (!v)
    throw Error(what + " must be a compile-time constant", loc);
  return *v;
}

std::vector<TemplateParam> Parser::parseTemplateParams() {
  std::vector<TemplateParam> out;
  expect("[");
  if (accept("]"))
    return out;
  do {
    TemplateParam p;
    p.name = expectName();
    if (accept(":")) {
      if (isName("index")) {
        next();
        p.isIndex = true;
      } else {
        expect("(");
        do {
          p.allowed.push_back(parseElemTypeTok());
        } while (accept(","));
        expect(")");
      }
    }
    out.push_back(std::move(p));
  } while (accept(","));
  expect("]");
  return out;
}

Annot Parser::parseAnnot() {
  Annot out;
  if (!isPunct("@"))
    return out;
  next();
  expect("[");
  if (accept("]"))
    return out;
  do {
    std::string k = expectName();
    expect("=");
    const Token &v = next();
    if (v.kind == TokKind::Punct && v.text == "-") {
      const Token &n = next();
      out.emplace_back(k, "-" + n.text);
      continue;
    }
    if (v.kind != TokKind::Name && v.kind != TokKind::Int &&
        v.kind != TokKind::String)
      throw Error("bad annotation value", v.loc);
    out.emplace_back(k, v.text);
  } while (accept(","));
  expect("]");
  return out;
}

static int64_t annotInt(const std::string &k, const std::string &v,
                        Loc loc) {
  try {
    size_t n = 0;
    long long x = std::stoll(v, &n);
    if (n != v.size())
      throw 0;
    return x;
  } catch (...) {
    throw Error("annotation '" + k + "' expects an integer", loc);
  }
}

static Storage parseStorage(const std::string &s, Loc loc) {
  Storage st;
  auto depthOf = [&](const std::string &prefix) {
    return annotInt("storage", s.substr(prefix.size() + 1,
                                        s.size() - prefix.size() - 2),
                    loc);
  };
  if (s == "dram")
    st.kind = StorageKind::Dram;
  else if (s == "bram")
    st.kind = StorageKind::Bram;
  else if (s.rfind("stream(", 0) == 0 && s.back() == ')') {
    st.kind = StorageKind::Stream;
    st.depth = depthOf("stream");
  } else if (s.rfind("stream_array(", 0) == 0 && s.back() == ')') {
    st.kind = StorageKind::StreamArray;
    st.depth = depthOf("stream_array");
  } else {
    throw Error("unknown storage '" + s + "'", loc);
  }
  return st;
}

static void applyMemAnnot(Memory &m, const Annot &a, Loc loc) {
  for (auto &[k, v] : a) {
    if (k == "partition") {
      try {
        m.part = parsePartitionType(v, m.type.shape);
      } catch (Error &e) {
        throw Error(e.what(), loc);
      }
    } else if (k == "storage") {
      m.storage = parseStorage(v, loc);
    } else if (k == "scope") {
      m.scope = v;
    } else {
      throw Error("unknown memory annotation '" + k + "'", loc);
    }
  }
}

//===----------------------------------------------------------------------===//
// Functions
//===----------------------------------------------------------------------===//

Memory &Parser::declare(const std::string &name, const TensorType &t,
                        Loc loc) {
  if (cur_->findMem(name))
    throw Error("duplicate declaration of '" + name + "'", loc);
  if (isLoopVar(name))
    throw Error("'" + name + "' shadows a loop variable", loc);
  Memory m;
  m.name = name;
  m.type = t;
  m.part = PartitionType::none(t.shape);
  m.role = Role::Local;
  m.loc = loc;
  m.scope = scopes_.empty() ? "" : scopes_.back();
  cur_->locals.push_back(std::move(m));
  return cur_->locals.back();
}

Func Parser::parseFuncDef(bool bodyOnlyIfConcrete) {
  Func f;
  f.loc = peek().loc;
  if (!isName("def"))
    fail("expected 'def'");
  next();
  f.name = expectName();
  if (isPunct("["))
    f.tparams = parseTemplateParams();
  bool skipBody = bodyOnlyIfConcrete && f.isTemplate();
  expect("(");
  if (!skipBody) {
    cur_ = &f;
    if (!isPunct(")")) {
      do {
        Loc loc = peek().loc;
        Memory m;
        m.name = expectName();
        expect(":");
        m.type = parseTensorType();
        m.part = PartitionType::none(m.type.shape);
        m.role = Role::Param;
        m.loc = loc;
        applyMemAnnot(m, parseAnnot(), loc);
        if (f.findMem(m.name))
          throw Error("duplicate parameter '" + m.name + "'", loc);
        f.params.push_back(std::move(m));
      } while (accept(","));
    }
    expect(")");
    if (accept("->")) {
      f.retType = parseTensorType();
      f.hasRet = true;
    }
    for (auto &[k, v] : parseAnnot()) {
      f.attrs[k] = v;
    }
    expect(":");
    expectNewline();
    if (peek().kind != TokKind::Indent)
      fail("empty function body");
    f.body = parseBlock();
    cur_ = nullptr;
    if (!f.result.empty()) {
      auto *m = f.findMem(f.result);
      if (!m || m->role == Role::Param)
        throw Error("return value '" + f.result + "' must be a local",
                    f.loc);
    }
    return f;
  }
  // Template: skip to the end of the definition; the body is re-parsed on
  // instantiation.
  int depth = 0;
  while (peek().kind != TokKind::End) {
    const Token &t = next();
    if (t.kind == TokKind::Indent)
      ++depth;
    if (t.kind == TokKind::Dedent && --depth == 0)
      break;
  }
  return f;
}

std::vector<Stmt> Parser::parseBlock() {
  if (peek().kind != TokKind::Indent)
    fail("expected an indented block");
  next();
  std::vector<Stmt> out;
  while (peek().kind != TokKind::Dedent && peek().kind != TokKind::End)
    parseStmt(out);
  if (peek().kind == TokKind::Dedent)
    next();
  return out;
}

//===----------------------------------------------------------------------===//
// Statements
//===----------------------------------------------------------------------===//

void Parser::parseFor(std::vector<Stmt> &out) {
  Loc loc = next().loc; // 'for'
  std::vector<std::pair<std::string, Loc>> vars;
  do {
    Loc vl = peek().loc;
    std::string v = expectName();
    if (isLoopVar(v))
      throw Error("loop variable '" + v + "' shadows an outer loop", vl);
    if (isMemory(v))
      throw Error("loop variable '" + v + "' shadows a memory", vl);
    vars.emplace_back(v, vl);
  } while (accept(","));
  if (!isName("in"))
    fail("expected 'in'");
  next();
  std::string kind = expectName();
  std::vector<int64_t> extents;
  std::string band;
  expect("(");
  if (kind == "range") {
    extents.push_back(parseConstExpr("loop bound"));
    expect(")");
    if (vars.size() != 1)
      throw Error("range() binds exactly one variable", loc);
  } else if (kind == "grid") {
    do {
      if (isName("name") && isPunct("=", 1)) {
        next();
        next();
        if (peek().kind != TokKind::String)
          fail("grid name must be a string");
        band = next().text;
        break;
      }
      if (peek().kind == TokKind::String) {
        band = next().text;
        break;
      }
      extents.push_back(parseConstExpr("loop bound"));
    } while (accept(","));
    expect(")");
    if (extents.size() != vars.size())
      throw Error("grid() arity does not match the number of variables", loc);
  } else {
    throw Error("expected range() or grid()", loc);
  }
  for (auto e : extents)
    if (e < 1)
      throw Error("loop bound must be positive", loc);
  Annot annot = parseAnnot();
  expect(":");
  expectNewline();
  if (peek().kind != TokKind::Indent)
    throw Error("empty loop body", loc);

  // Build the nest outside-in; the body goes in the innermost loop.
  std::vector<Stmt> loops;
  for (size_t i = 0; i < vars.size(); ++i) {
    Stmt s = mkFor(vars[i].first, extents[i], {});
    s.loc = vars[i].second;
    s.band = band;
    loops.push_back(std::move(s));
  }
  for (auto &[k, v] : annot) {
    Stmt &inner = loops.back();
    if (k == "label") {
      if (vars.size() != 1)
        throw Error("label annotation requires a single-variable loop", loc);
      inner.label = v;
    } else if (k == "band") {
      for (auto &l : loops)
        l.band = v;
    } else if (k == "pipeline") {
      inner.attrs.pipeline = static_cast<int>(annotInt(k, v, loc));
    } else if (k == "unroll") {
      inner.attrs.unroll = static_cast<int>(annotInt(k, v, loc));
    } else {
      inner.tags[k] = v;
    }
  }
  std::string scopeId = "#" + std::to_string(++scopeCounter_);
  loops.back().tags["scopeid"] = scopeId;
  for (auto &[v, l] : vars)
    loopVars_.push_back(v);
  scopes_.push_back(scopeId);
  std::vector<Stmt> body = parseBlock();
  scopes_.pop_back();
  for (size_t i = 0; i < vars.size(); ++i)
    loopVars_.pop_back();
  loops.back().body = std::move(body);
  for (size_t i = loops.size() - 1; i > 0; --i)
    loops[i - 1].body.push_back(std::move(loops[i]));
  out.push_back(std::move(loops[0]));
}

std::vector<CallArg> Parser::parseCallArgs() {
  std::vector<CallArg> args;
  expect("(");
  if (accept(")"))
    return args;
  do {
    Loc loc = peek().loc;
    CallArg a;
    a.name = expectName();
    if (!isMemory(a.name))
      throw Error("call argument '" + a.name + "' is not a memory", loc);
    if (accept("[")) {
      do {
        a.prefix.push_back(parseExpr());
      } while (accept(","));
      expect("]");
    }
    args.push_back(std::move(a));
  } while (accept(","));
  expect(")");
  return args;
}

Stmt Parser::parseCallRest(const std::string &callee, Loc loc) {
  Stmt s;
  s.kind = StmtKind::Call;
  s.loc = loc;
  s.callee = callee;
  if (accept("[")) {
    s.hasTargs = true;
    if (!isPunct("]")) {
      do {
        TemplateArg a;
        if (peek().kind == TokKind::String) {
          a.kind = TemplateArg::Id;
          a.id = next().text;
        } else if (atType() &&
                   (isPunct(",", 1) || isPunct("]", 1) || isPunct("(", 1))) {
          a.kind = TemplateArg::Type;
          a.type = parseElemTypeTok();
        } else {
          a.kind = TemplateArg::Int;
          a.value = parseConstExpr("template argument");
        }
        s.targs.push_back(std::move(a));
      } while (accept(","));
    }
    expect("]");
  }
  s.args = parseCallArgs();
  return s;
}

void Parser::parseDecl(std::vector<Stmt> &out, const std::string &name,
                       Loc loc) {
  TensorType t = parseTensorType();
  Annot annot = parseAnnot();
  Memory &m = declare(name, t, loc);
  applyMemAnnot(m, annot, loc);
  if (accept("=")) {
    Loc vl = peek().loc;
    // `X: T[...] = f(args)` binds a call result.
    if (peek().kind == TokKind::Name && !isMemory(peek().text) &&
        !isLoopVar(peek().text) && !atType() &&
        !consts_.count(peek().text) && !localConsts_.count(peek().text) &&
        !bindings_.count(peek().text) &&
        (isPunct("(", 1) || isPunct("[", 1))) {
      std::string callee = next().text;
      Stmt c = parseCallRest(callee, vl);
      c.result = name;
      out.push_back(std::move(c));
    } else {
      ExprP v = parseExpr();
      Stmt s = mkStore(name, {}, v);
      s.loc = vl;
      if (!t.shape.empty())
        s.kind = StmtKind::Fill;
      out.push_back(std::move(s));
    }
  }
  expectNewline();
}

void Parser::parseStmt(std::vector<Stmt> &out) {
  Loc loc = peek().loc;
  if (isName("for")) {
    parseFor(out);
    return;
  }
  if (isName("if")) {
    next();
    ExprP c = parseExpr();
    expect(":");
    expectNewline();
    if (peek().kind != TokKind::Indent)
      throw Error("empty if body", loc);
    Stmt s = mkIf(c, parseBlock());
    s.loc = loc;
    out.push_back(std::move(s));
    return;
  }
  if (isName("return")) {
    next();
    Loc nl = peek().loc;
    std::string n = expectName();
    if (!isMemory(n))
      throw Error("use of unbound name '" + n + "'", nl);
    if (!cur_->result.empty())
      throw Error("multiple return statements", loc);
    if (!loopVars_.empty())
      throw Error("return inside a loop", loc);
    cur_->result = n;
    expectNewline();
    return;
  }
  if (isName("pass")) {
    next();
    expectNewline();
    return;
  }
  if (isName("call")) {
    next();
    std::string callee = expectName();
    out.push_back(parseCallRest(callee, loc));
    expectNewline();
    return;
  }
  if (peek().kind != TokKind::Name)
    throw Error("unknown statement form starting with " + describe(peek()),
                loc);
  std::string name = next().text;

  if (accept(":")) {
    parseDecl(out, name, loc);
    return;
  }

  if (!isMemory(name)) {
    // Call statements: `f(...)`, `f[...](...)`, or `X = f(...)` handled below.
    if (isPunct("(") || isPunct("[")) {
      if (isLoopVar(name) || consts_.count(name))
        throw Error("unknown statement form", loc);
      out.push_back(parseCallRest(name, loc));
      expectNewline();
      return;
    }
    if (isPunct("=")) {
      // `X = f(args)` with X undeclared declares X from the call result.
      next();
      Loc cl = peek().loc;
      if (peek().kind != TokKind::Name || !(isPunct("(", 1) || isPunct("[", 1)))
        throw Error("use of unbound name '" + name + "'", loc);
      std::string callee = next().text;
      if (isMemory(callee))
        throw Error("use of unbound name '" + name + "'", loc);
      Stmt c = parseCallRest(callee, cl);
      TensorType pending;
      Memory &m = declare(name, pending, loc);
      m.pendingType = true;
      c.result = name;
      out.push_back(std::move(c));
      expectNewline();
      return;
    }
    throw Error("use of unbound name '" + name + "'", loc);
  }

  std::vector<ExprP> idx;
  if (accept("[")) {
    do {
      idx.push_back(parseExpr());
    } while (accept(","));
    expect("]");
  }
  bool update = false;
  if (accept("+="))
    update = true;
  else if (!accept("="))
    throw Error("unknown statement form", loc);
  Loc vl = peek().loc;
  if (!update && idx.empty() && peek().kind == TokKind::Name &&
      !isMemory(peek().text) && !isLoopVar(peek().text) && !atType() &&
      !consts_.count(peek().text) && !localConsts_.count(peek().text) &&
      !bindings_.count(peek().text) && (isPunct("(", 1) || isPunct("[", 1))) {
    std::string callee = next().text;
    Stmt c = parseCallRest(callee, vl);
    c.result = name;
    out.push_back(std::move(c));
    expectNewline();
    return;
  }
  ExprP v = parseExpr();
  Stmt s = mkStore(name, std::move(idx), v, update);
  s.loc = loc;
  // `X = scalar` on an array fills every element.
  if (s.idx.empty() && !update && cur_->findMem(name)->type.rank() > 0)
    s.kind = StmtKind::Fill;
  out.push_back(std::move(s));
  expectNewline();
}

//===----------------------------------------------------------------------===//
// Expressions
//===----------------------------------------------------------------------===//

ExprP Parser::parseExpr() { return parseOr(); }

ExprP Parser::parseOr() {
  ExprP l = parseAnd();
  while (isName("or")) {
    Loc loc = next().loc;
    l = mkBin("or", l, parseAnd(), loc);
  }
  return l;
}

ExprP Parser::parseAnd() {
  ExprP l = parseNot();
  while (isName("and")) {
    Loc loc = next().loc;
    l = mkBin("and", l, parseNot(), loc);
  }
  return l;
}

ExprP Parser::parseNot() {
  if (isName("not")) {
    Loc loc = next().loc;
    return mkUnary("not", parseNot(), loc);
  }
  return parseCmp();
}

ExprP Parser::parseCmp() {
  ExprP l = parseAdd();
  static const std::set<std::string> ops{"<", "<=", ">", ">=", "==", "!="};
  if (peek().kind == TokKind::Punct && ops.count(peek().text)) {
    Token t = next();
    l = mkBin(t.text, l, parseAdd(), t.loc);
  }
  return l;
}

static ExprP foldIfConst(ExprP e) {
  if (e->args.empty())
    return e;
  for (auto &a : e->args)
    if (a->kind != ExprKind::IntLit)
      return e;
  if (e->kind != ExprKind::Binary && e->kind != ExprKind::Unary)
    return e;
  if (e->kind == ExprKind::Binary && e->name == "/")
    return e;
  if (auto v = constEval(e))
    return mkInt(*v, e->loc);
  return e;
}

ExprP Parser::parseAdd() {
  ExprP l = parseMul();
  while (isPunct("+") || isPunct("-")) {
    Token t = next();
    l = foldIfConst(mkBin(t.text, l, parseMul(), t.loc));
  }
  return l;
}

ExprP Parser::parseMul() {
  ExprP l = parseUnary();
  while (isPunct("*") || isPunct("/") || isPunct("//") || isPunct("%")) {
    Token t = next();
    l = foldIfConst(mkBin(t.text, l, parseUnary(), t.loc));
  }
  return l;
}

ExprP Parser::parseUnary() {
  if (isPunct("-")) {
    Loc loc = next().loc;
    ExprP a = parseUnary();
    if (a->kind == ExprKind::IntLit)
      return mkInt(-a->ival, loc);
    if (a->kind == ExprKind::FloatLit)
      return mkFloat(-a->fval, loc);
    return mkUnary("-", a, loc);
  }
  if (isPunct("+")) {
    next();
    return parseUnary();
  }
  return parsePrimary();
}

ExprP Parser::resolveName(const std::string &n, Loc loc) {
  if (isLoopVar(n))
    return mkVar(n, loc);
  if (auto it = localConsts_.find(n); it != localConsts_.end())
    return mkInt(it->second, loc);
  if (auto it = consts_.find(n); it != consts_.end())
    return mkInt(it->second, loc);
  if (auto it = bindings_.find(n); it != bindings_.end()) {
    if (auto *v = std::get_if<int64_t>(&it->second))
      return mkInt(*v, loc);
    throw Error("type parameter '" + n + "' used as a value", loc);
  }
  if (isMemory(n))
    return mkLoad(n, {}, loc);
  throw Error("use of unbound name '" + n + "'", loc);
}

ExprP Parser::parsePrimary() {
  const Token &t = peek();
  Loc loc = t.loc;
  if (t.kind == TokKind::Int) {
    std::string s = next().text;
    i128 v = 0;
    for (char c : s) {
      v = v * 10 + (c - '0');
      if (v > (static_cast<i128>(1) << 100))
        throw Error("integer literal too large", loc);
    }
    return mkInt(v, loc);
  }
  if (t.kind == TokKind::Float) {
    std::string s = next().text;
    return mkFloat(std::stod(s), loc);
  }
  if (accept("(")) {
    ExprP e = parseExpr();
    expect(")");
    return e;
  }
  if (t.kind == TokKind::Name) {
    // Cast: `int16(x)`, `fixed(8, 4)(x)`, `TyC(x)`.
    if (atType() && !isMemory(t.text) && !isLoopVar(t.text)) {
      ElemType ty = parseElemTypeTok();
      expect("(");
      ExprP a = parseExpr();
      expect(")");
      return mkCast(ty, a, loc);
    }
    std::string n = next().text;
    if (isPunct("[")) {
      if (!isMemory(n))
        throw Error("use of unbound name '" + n + "'", loc);
      next();
      std::vector<ExprP> idx;
      do {
        idx.push_back(parseExpr());
      } while (accept(","));
      expect("]");
      return mkLoad(n, std::move(idx), loc);
    }
    if (isPunct("("))
      throw Error("function calls are statements, not expressions", loc);
    return resolveName(n, loc);
  }
  fail("expected an expression but found " + describe(t));
}

//===----------------------------------------------------------------------===//
// Module
//===----------------------------------------------------------------------===//

static std::vector<std::string> splitLines(const std::string &text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string l;
  while (std::getline(ss, l))
    lines.push_back(l);
  return lines;
}

Module Parser::parseModule(const std::string &text) {
  Module m;
  std::vector<std::string> lines = splitLines(text);
  std::set<std::string> names;
  while (peek().kind != TokKind::End) {
    if (peek().kind == TokKind::Newline) {
      next();
      continue;
    }
    if (isName("const")) {
      next();
      Loc loc = peek().loc;
      std::string n = expectName();
      expect("=");
      int64_t v = parseConstExpr("constant");
      expectNewline();
      if (consts_.count(n))
        throw Error("duplicate constant '" + n + "'", loc);
      consts_[n] = v;
      continue;
    }
    if (isName("top")) {
      next();
      expect("=");
      m.top = expectName();
      expectNewline();
      continue;
    }
    if (!isName("def"))
      throw Error("unknown statement form at top level", peek().loc);
    Loc loc = peek().loc;
    Func f = parseFuncDef(true);
    if (names.count(f.name))
      throw Error("duplicate function name '" + f.name + "'", loc);
    names.insert(f.name);
    if (f.isTemplate()) {
      // Keep the source of the definition: from the `def` line up to the
      // line before the next top-level token.
      int endLine = peek().kind == TokKind::End
                        ? static_cast<int>(lines.size()) + 1
                        : peek().loc.line;
      std::string src;
      for (int l = loc.line; l < endLine && l <= (int)lines.size(); ++l)
        src += lines[l - 1] + "\n";
      while (src.size() >= 2 && src[src.size() - 2] == '\n')
        src.pop_back();
      f.templateText = src;
      f.templateLine = loc.line;
    }
    m.funcs.push_back(std::move(f));
  }
  m.consts = consts_;
  if (m.top.empty())
    for (auto it = m.funcs.rbegin(); it != m.funcs.rend(); ++it)
      if (!it->isTemplate()) {
        m.top = it->name;
        break;
      }
  return m;
}

} // namespace

Module parseKernel(const std::string &text, const std::string &file) {
  try {
    std::map<std::string, Binding> none;
    Parser p(lex(text), {}, none);
    Module m = p.parseModule(text);
    m.file = file;
    return m;
  } catch (Error &e) {
    e.setFile(file);
    throw;
  }
}

Func parseFunction(const std::string &text, int firstLine,
                   const std::map<std::string, int64_t> &consts,
                   const std::map<std::string, Binding> &bindings) {
  Parser p(lex(text, firstLine), consts, bindings);
  return p.parseFuncDef(false);
}

} // namespace miniallo
