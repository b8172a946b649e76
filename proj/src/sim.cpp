/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "interp.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace miniallo {

//===----------------------------------------------------------------------===//
// Tensor values
//===----------------------------------------------------------------------===//

TensorValue TensorValue::zeros(const TensorType &t) {
  TensorValue v;
  v.type = t;
  size_t n = static_cast<size_t>(t.numel());
  if (t.elem.isFloat())
    v.fl.assign(n, 0.0);
  else
    v.raw.assign(n, 0);
  return v;
}

double TensorValue::real(size_t k) const {
  if (type.elem.isFloat())
    return fl[k];
  return std::ldexp(static_cast<double>(raw[k]), -type.elem.frac);
}

bool TensorValue::operator==(const TensorValue &o) const {
  return type == o.type && raw == o.raw && fl == o.fl;
}

double roundFloat(double v, int width) {
  if (width >= 64 || !std::isfinite(v))
    return v;
  if (width == 32)
    return static_cast<double>(static_cast<float>(v));
  // Half precision: 11 significant bits, round to nearest even.
  if (v == 0)
    return v;
  int e;
  std::frexp(v, &e);
  // Below the normal range the spacing stays at 2^-24.
  int shift = std::max(e, -13) - 11;
  double scaled = std::nearbyint(std::ldexp(v, -shift));
  double out = std::ldexp(scaled, shift);
  if (std::fabs(out) > 65504.0)
    return std::copysign(INFINITY, v);
  return out;
}

static uint64_t mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

TensorValue randomTensor(const TensorType &t, uint64_t seed) {
  TensorValue v = TensorValue::zeros(t);
  std::mt19937_64 rng(seed);
  if (t.elem.isFloat()) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto &x : v.fl)
      x = roundFloat(d(rng), t.elem.width);
    return v;
  }
  for (auto &x : v.raw) {
    unsigned __int128 u = rng();
    if (t.elem.width > 64)
      u = (u << 64) | rng();
    x = wrapInt(static_cast<i128>(u), t.elem.width, t.elem.isSigned());
  }
  return v;
}

TensorValues randomInputs(const Func &f, uint64_t seed) {
  TensorValues out;
  for (size_t k = 0; k < f.params.size(); ++k)
    out[f.params[k].name] = randomTensor(f.params[k].type, mix(seed * 131 + k));
  return out;
}

namespace interp {

//===----------------------------------------------------------------------===//
// Arithmetic
//===----------------------------------------------------------------------===//

static i128 wrapTo(i128 v, const ElemType &t) {
  return wrapInt(v, t.width, t.isSigned());
}

static i128 mulWrap(i128 a, i128 b) {
  using u128 = unsigned __int128;
  return static_cast<i128>(static_cast<u128>(a) * static_cast<u128>(b));
}

Val convert(const Val &v, const ElemType &from, const ElemType &to) {
  Val r;
  if (to.isFloat()) {
    double x = from.isFloat()
                   ? v.f
                   : std::ldexp(static_cast<double>(v.i), -from.frac);
    r.f = roundFloat(x, to.width);
    return r;
  }
  if (from.isFloat()) {
    double x = std::floor(std::ldexp(v.f, to.frac));
    if (!std::isfinite(x))
      x = 0;
    // Saturate into the i128 range before wrapping.
    double lim = std::ldexp(1.0, 126);
    x = std::max(-lim, std::min(lim, x));
    r.i = wrapTo(static_cast<i128>(x), to);
    return r;
  }
  r.i = wrapTo(rescale(v.i, from.frac, to.frac), to);
  return r;
}

static bool isCompare(const std::string &op) {
  return op == "<" || op == "<=" || op == ">" || op == ">=" || op == "==" ||
         op == "!=";
}

template <typename T> static bool compare(const std::string &op, T a, T b) {
  if (op == "<")
    return a < b;
  if (op == "<=")
    return a <= b;
  if (op == ">")
    return a > b;
  if (op == ">=")
    return a >= b;
  if (op == "==")
    return a == b;
  return a != b;
}

static Val binary(const std::string &op, const Val &a, const ElemType &ta,
                  const Val &b, const ElemType &tb, const ElemType &rt) {
  Val r;
  if (op == "and" || op == "or") {
    bool x = ta.isFloat() ? a.f != 0 : a.i != 0;
    bool y = tb.isFloat() ? b.f != 0 : b.i != 0;
    r.i = op == "and" ? (x && y) : (x || y);
    return r;
  }
  if (ta.isFloat()) {
    if (isCompare(op)) {
      r.i = compare(op, a.f, b.f);
      return r;
    }
    double x = 0;
    if (op == "+")
      x = a.f + b.f;
    else if (op == "-")
      x = a.f - b.f;
    else if (op == "*")
      x = a.f * b.f;
    else if (op == "/")
      x = a.f / b.f;
    else
      throw InternalError("float operator " + op);
    r.f = roundFloat(x, rt.width);
    return r;
  }
  if (isCompare(op)) {
    int f = std::max(ta.frac, tb.frac);
    r.i = compare(op, rescale(a.i, ta.frac, f), rescale(b.i, tb.frac, f));
    return r;
  }
  if (op == "+" || op == "-") {
    i128 x = rescale(a.i, ta.frac, rt.frac);
    i128 y = rescale(b.i, tb.frac, rt.frac);
    using u128 = unsigned __int128;
    u128 s = op == "+" ? static_cast<u128>(x) + static_cast<u128>(y)
                       : static_cast<u128>(x) - static_cast<u128>(y);
    r.i = wrapTo(static_cast<i128>(s), rt);
    return r;
  }
  if (op == "*") {
    // Raw product carries frac ta.frac + tb.frac, which is rt.frac.
    r.i = wrapTo(rescale(mulWrap(a.i, b.i), ta.frac + tb.frac, rt.frac), rt);
    return r;
  }
  if (b.i == 0)
    return r; // division by zero yields zero
  if (op == "/") {
    i128 num = rescale(a.i, 0, tb.frac);
    r.i = wrapTo(rescale(floorDiv(num, b.i), ta.frac, rt.frac), rt);
    return r;
  }
  if (op == "//") {
    r.i = wrapTo(floorDiv(a.i, b.i), rt);
    return r;
  }
  if (op == "%") {
    r.i = wrapTo(floorMod(a.i, b.i), rt);
    return r;
  }
  throw InternalError("integer operator " + op);
}

//===----------------------------------------------------------------------===//
// Memories
//===----------------------------------------------------------------------===//

Buffer::Buffer(const std::string &n, const TensorType &t, const Storage &s)
    : name(n), type(t), storage(s) {
  size_t cnt = static_cast<size_t>(t.numel());
  if (s.kind == StorageKind::Stream) {
    chans.resize(1);
    chans[0].name = n;
  } else if (s.kind == StorageKind::StreamArray) {
    chans.resize(cnt);
    for (size_t k = 0; k < cnt; ++k)
      chans[k].name = n + "#" + std::to_string(k);
  } else if (t.elem.isFloat()) {
    fl.assign(cnt, 0.0);
  } else {
    raw.assign(cnt, 0);
  }
}

static Ref wholeRef(Buffer *b) {
  Ref r;
  r.buf = b;
  r.shape = b->type.shape;
  r.strides.assign(r.shape.size(), 1);
  for (int d = static_cast<int>(r.shape.size()) - 2; d >= 0; --d)
    r.strides[d] = r.strides[d + 1] * r.shape[d + 1];
  return r;
}

TensorValue Machine::value(const Ref &r) {
  TensorType t{r.buf->type.elem, r.shape};
  TensorValue v = TensorValue::zeros(t);
  if (r.buf->isStream())
    return v;
  size_t n = v.size();
  for (size_t k = 0; k < n; ++k) {
    if (t.elem.isFloat())
      v.fl[k] = r.buf->fl[r.offset + k];
    else
      v.raw[k] = r.buf->raw[r.offset + k];
  }
  return v;
}

std::unique_ptr<Buffer> Machine::makeLocal(const Memory &mem, bool root) {
  auto b = std::make_unique<Buffer>(mem.name, mem.type, mem.storage);
  if (root && b->isStream()) {
    int64_t cap = 0;
    if (boundRoot) {
      auto it = rootDepths.find(mem.name);
      cap = it != rootDepths.end() ? it->second : mem.storage.depth;
    }
    for (auto &c : b->chans) {
      c.cap = cap;
      c.source = sourceStreams;
    }
  }
  return b;
}

std::unique_ptr<Activation> Machine::enter(const Func &f,
                                           const TensorValues &inputs) {
  auto a = std::make_unique<Activation>();
  a->func = &f;
  for (auto &p : f.params) {
    auto b = std::make_unique<Buffer>(p.name, p.type, p.storage);
    auto it = inputs.find(p.name);
    if (it != inputs.end()) {
      if (!(it->second.type == p.type))
        throw Error("input '" + p.name + "' has type " +
                    it->second.type.str() + ", expected " + p.type.str());
      if (b->isStream()) {
        for (size_t k = 0; k < it->second.size(); ++k) {
          Val v;
          if (p.type.elem.isFloat())
            v.f = it->second.fl[k];
          else
            v.i = it->second.raw[k];
          b->chans[b->chans.size() == 1 ? 0 : k].q.push_back(v);
        }
      } else {
        b->raw = it->second.raw;
        b->fl = it->second.fl;
      }
    }
    a->mems[p.name] = wholeRef(b.get());
    a->owned.push_back(std::move(b));
  }
  for (auto &l : f.locals) {
    auto b = makeLocal(l, true);
    a->mems[l.name] = wholeRef(b.get());
    a->owned.push_back(std::move(b));
  }
  return a;
}

std::unique_ptr<Activation> Machine::call(const Stmt &s, Activation &caller) {
  const Func *g = m_.find(s.callee);
  if (!g)
    throw Error("call to unknown function '" + s.callee + "'", s.loc);
  if (g->params.size() != s.args.size())
    throw Error("call to '" + s.callee + "' has the wrong arity", s.loc);
  auto a = std::make_unique<Activation>();
  a->func = g;
  for (size_t k = 0; k < s.args.size(); ++k) {
    auto it = caller.mems.find(s.args[k].name);
    if (it == caller.mems.end())
      throw InternalError("unbound argument '" + s.args[k].name + "'");
    Ref r = it->second;
    const auto &prefix = s.args[k].prefix;
    for (size_t d = 0; d < prefix.size(); ++d) {
      int64_t v = static_cast<int64_t>(eval(*prefix[d], caller).i);
      if (v < 0 || v >= r.shape[d])
        throw Error("argument prefix of '" + s.args[k].name +
                        "' out of bounds",
                    s.loc);
      r.offset += v * r.strides[d];
    }
    r.shape.erase(r.shape.begin(), r.shape.begin() + prefix.size());
    r.strides.erase(r.strides.begin(), r.strides.begin() + prefix.size());
    a->mems[g->params[k].name] = r;
  }
  for (auto &l : g->locals) {
    if (l.name == g->result && !s.result.empty()) {
      a->mems[l.name] = caller.mems.at(s.result);
      continue;
    }
    auto b = makeLocal(l, false);
    a->mems[l.name] = wholeRef(b.get());
    a->owned.push_back(std::move(b));
  }
  return a;
}

size_t Machine::flatIndex(const Ref &r, const std::vector<ExprP> &idx,
                          Activation &a, const std::string &name) {
  if (idx.size() != r.shape.size())
    throw InternalError("rank mismatch on '" + name + "'");
  int64_t off = r.offset;
  for (size_t d = 0; d < idx.size(); ++d) {
    int64_t v = static_cast<int64_t>(eval(*idx[d], a).i);
    if (v < 0 || v >= r.shape[d])
      throw Error("index " + std::to_string(v) + " out of bounds for '" +
                  name + "' dimension " + std::to_string(d));
    off += v * r.strides[d];
  }
  return static_cast<size_t>(off);
}

Channel &Machine::channelFor(Ref &r, const std::vector<ExprP> &idx,
                             Activation &a, const std::string &name) {
  if (r.buf->storage.kind == StorageKind::Stream)
    return r.buf->chans[0];
  return r.buf->chans[flatIndex(r, idx, a, name)];
}

void Machine::push(Channel &c, const Val &v) {
  if (c.cap > 0 && static_cast<int64_t>(c.q.size()) >= c.cap)
    throw Blocked{&c, true};
  c.q.push_back(v);
  ++c.writes;
  c.lastWrite = now;
  if (txn)
    txn->push_back({Undo::Push, nullptr, 0, {}, &c});
}

Val Machine::pop(Channel &c) {
  if (c.q.empty()) {
    if (c.source) {
      ++c.reads;
      c.lastRead = now;
      return {};
    }
    if (txn)
      throw Blocked{&c, false};
    throw Error("stream '" + c.name + "' read past end");
  }
  Val v = c.q.front();
  c.q.pop_front();
  ++c.reads;
  c.lastRead = now;
  if (txn)
    txn->push_back({Undo::Pop, nullptr, 0, v, &c});
  return v;
}

void Machine::rollback() {
  if (!txn)
    return;
  for (auto it = txn->rbegin(); it != txn->rend(); ++it) {
    switch (it->kind) {
    case Undo::Mem:
      if (it->buf->type.elem.isFloat())
        it->buf->fl[it->idx] = it->old.f;
      else
        it->buf->raw[it->idx] = it->old.i;
      break;
    case Undo::Pop:
      it->ch->q.push_front(it->old);
      --it->ch->reads;
      break;
    case Undo::Push:
      it->ch->q.pop_back();
      --it->ch->writes;
      break;
    }
  }
  txn->clear();
}

//===----------------------------------------------------------------------===//
// Evaluation
//===----------------------------------------------------------------------===//

Val Machine::load(const Expr &e, Activation &a) {
  auto it = a.mems.find(e.name);
  if (it == a.mems.end())
    throw InternalError("unbound memory '" + e.name + "'");
  Ref &r = it->second;
  if (r.buf->isStream())
    return pop(channelFor(r, e.args, a, e.name));
  size_t k = flatIndex(r, e.args, a, e.name);
  Val v;
  if (r.buf->type.elem.isFloat())
    v.f = r.buf->fl[k];
  else
    v.i = r.buf->raw[k];
  return v;
}

Val Machine::eval(const Expr &e, Activation &a) {
  Val r;
  switch (e.kind) {
  case ExprKind::IntLit:
    if (e.type.isFloat())
      r.f = static_cast<double>(e.ival);
    else
      r.i = rescale(e.ival, 0, e.type.frac);
    return r;
  case ExprKind::FloatLit:
    if (e.type.isFloat())
      r.f = roundFloat(e.fval, e.type.width);
    else
      r.i = static_cast<i128>(std::floor(std::ldexp(e.fval, e.type.frac)));
    return r;
  case ExprKind::Var: {
    auto it = a.env.find(e.name);
    if (it == a.env.end())
      throw InternalError("unbound loop variable '" + e.name + "'");
    r.i = it->second;
    return r;
  }
  case ExprKind::Load:
    return load(e, a);
  case ExprKind::Cast:
    return convert(eval(*e.args[0], a), e.args[0]->type, e.type);
  case ExprKind::Unary: {
    Val x = eval(*e.args[0], a);
    const ElemType &t = e.args[0]->type;
    if (e.name == "not") {
      r.i = t.isFloat() ? x.f == 0 : x.i == 0;
      return r;
    }
    if (t.isFloat()) {
      r.f = -x.f;
      return r;
    }
    r.i = wrapTo(-rescale(x.i, t.frac, e.type.frac), e.type);
    return r;
  }
  case ExprKind::Binary: {
    Val x = eval(*e.args[0], a);
    Val y = eval(*e.args[1], a);
    return binary(e.name, x, e.args[0]->type, y, e.args[1]->type, e.type);
  }
  }
  return r;
}

bool Machine::truthy(const Expr &e, Activation &a) {
  Val v = eval(e, a);
  return e.type.isFloat() ? v.f != 0 : v.i != 0;
}

void Machine::store(const Stmt &s, Activation &a) {
  auto it = a.mems.find(s.array);
  if (it == a.mems.end())
    throw InternalError("unbound memory '" + s.array + "'");
  Ref &r = it->second;
  const ElemType &elem = r.buf->type.elem;
  Val v = eval(*s.value, a);
  const ElemType &vt = s.value->type;
  if (r.buf->isStream()) {
    if (s.update)
      throw Error("update of stream '" + s.array + "'", s.loc);
    push(channelFor(r, s.idx, a, s.array), convert(v, vt, elem));
    return;
  }
  size_t k = flatIndex(r, s.idx, a, s.array);
  Val old;
  if (elem.isFloat())
    old.f = r.buf->fl[k];
  else
    old.i = r.buf->raw[k];
  Val nv;
  if (s.update) {
    const ElemType &op = s.opType;
    Val sum = binary("+", convert(old, elem, op), op, convert(v, vt, op), op,
                     op);
    nv = convert(sum, op, elem);
  } else {
    nv = convert(v, vt, elem);
  }
  if (txn)
    txn->push_back({Undo::Mem, r.buf, k, old, nullptr});
  if (elem.isFloat())
    r.buf->fl[k] = nv.f;
  else
    r.buf->raw[k] = nv.i;
}

void Machine::execStmt(const Stmt &s, Activation &a) {
  switch (s.kind) {
  case StmtKind::Store:
    if (++steps > stepLimit)
      throw Error("simulation step limit exceeded");
    store(s, a);
    return;
  case StmtKind::Fill: {
    if (++steps > stepLimit)
      throw Error("simulation step limit exceeded");
    Ref &r = a.mems.at(s.array);
    if (r.buf->isStream())
      throw Error("fill of stream '" + s.array + "'", s.loc);
    const ElemType &elem = r.buf->type.elem;
    Val v = convert(eval(*s.value, a), s.value->type, elem);
    int64_t n = 1;
    for (auto d : r.shape)
      n *= d;
    for (int64_t k = 0; k < n; ++k) {
      size_t at = static_cast<size_t>(r.offset + k);
      if (txn) {
        Val old;
        old.i = elem.isFloat() ? 0 : r.buf->raw[at];
        old.f = elem.isFloat() ? r.buf->fl[at] : 0;
        txn->push_back({Undo::Mem, r.buf, at, old, nullptr});
      }
      if (elem.isFloat())
        r.buf->fl[at] = v.f;
      else
        r.buf->raw[at] = v.i;
    }
    return;
  }
  case StmtKind::If:
    if (truthy(*s.cond, a))
      exec(s.body, a);
    return;
  case StmtKind::For:
    for (int64_t i = 0; i < s.extent; ++i) {
      a.env[s.var] = i;
      exec(s.body, a);
    }
    return;
  case StmtKind::Call: {
    auto callee = call(s, a);
    exec(callee->func->body, *callee);
    return;
  }
  }
}

void Machine::exec(const std::vector<Stmt> &body, Activation &a) {
  for (auto &s : body)
    execStmt(s, a);
}

bool Machine::innermost(const Stmt &loop) {
  auto it = innermost_.find(&loop);
  if (it != innermost_.end())
    return it->second;
  bool leaf = true;
  walk(loop.body, [&](const Stmt &s) {
    if (s.kind == StmtKind::For || s.kind == StmtKind::Call)
      leaf = false;
    return leaf;
  });
  innermost_[&loop] = leaf;
  return leaf;
}

//===----------------------------------------------------------------------===//
// Cursor
//===----------------------------------------------------------------------===//

Cursor::Cursor(Machine &mc, Activation &root, size_t begin, size_t end)
    : mc_(mc) {
  Frame f;
  f.body = &root.func->body;
  f.pc = begin;
  f.end = end;
  f.act = &root;
  stack_.push_back(std::move(f));
}

bool Cursor::seek() {
  while (!stack_.empty()) {
    Frame &fr = stack_.back();
    if (!fr.loop) {
      if (fr.pc >= fr.end) {
        stack_.pop_back();
        continue;
      }
      const Stmt &s = (*fr.body)[fr.pc];
      Activation *act = fr.act;
      switch (s.kind) {
      case StmtKind::Store:
      case StmtKind::Fill:
        return true;
      case StmtKind::For: {
        ++fr.pc;
        Frame lf;
        lf.loop = true;
        lf.stmt = &s;
        lf.unit = mc_.innermost(s);
        lf.act = act;
        stack_.push_back(std::move(lf));
        continue;
      }
      case StmtKind::If: {
        ++fr.pc;
        if (mc_.truthy(*s.cond, *act)) {
          Frame bf;
          bf.body = &s.body;
          bf.end = s.body.size();
          bf.act = act;
          stack_.push_back(std::move(bf));
        }
        continue;
      }
      case StmtKind::Call: {
        ++fr.pc;
        Frame bf;
        bf.owned = mc_.call(s, *act);
        bf.act = bf.owned.get();
        bf.body = &bf.act->func->body;
        bf.end = bf.body->size();
        stack_.push_back(std::move(bf));
        continue;
      }
      }
    }
    if (fr.iter >= fr.stmt->extent) {
      stack_.pop_back();
      continue;
    }
    fr.act->env[fr.stmt->var] = fr.iter;
    if (fr.unit)
      return true;
    ++fr.iter;
    Frame bf;
    bf.body = &fr.stmt->body;
    bf.end = fr.stmt->body.size();
    bf.act = fr.act;
    stack_.push_back(std::move(bf));
  }
  return false;
}

bool Cursor::done() { return !seek(); }

bool Cursor::step() {
  if (!seek())
    return false;
  Frame &fr = stack_.back();
  const Stmt &at = fr.loop ? *fr.stmt : (*fr.body)[fr.pc];
  try {
    if (fr.loop) {
      ++mc_.steps;
      mc_.exec(fr.stmt->body, *fr.act);
      ++fr.iter;
    } else {
      mc_.execStmt(at, *fr.act);
      ++fr.pc;
    }
  } catch (Blocked &) {
    mc_.rollback();
    throw;
  } catch (Error &e) {
    e.setLoc(at.loc);
    throw;
  }
  return true;
}

} // namespace interp

//===----------------------------------------------------------------------===//
// Entry points
//===----------------------------------------------------------------------===//

using namespace interp;

TensorValues interp::outputsOf(const Func &f, Activation &a) {
  TensorValues out;
  for (auto &p : f.params)
    out[p.name] = Machine::value(a.mems.at(p.name));
  if (!f.result.empty())
    out[f.result] = Machine::value(a.mems.at(f.result));
  return out;
}

TensorValues run(const Module &m, const std::string &func,
                 const TensorValues &inputs, const SimConfig &cfg) {
  const Func *f = m.find(func);
  if (!f)
    throw Error("unknown function '" + func + "'");
  if (f->isTemplate())
    throw Error("cannot simulate template '" + func + "'");
  Machine mc(m);
  mc.stepLimit = cfg.stepLimit;
  auto act = mc.enter(*f, inputs);
  Cursor c(mc, *act, 0, f->body.size());
  while (c.step()) {
  }
  return outputsOf(*f, *act);
}

static std::string elemStr(const TensorValue &v, size_t k) {
  if (v.type.elem.isFloat()) {
    std::ostringstream os;
    os.precision(17);
    os << v.fl[k];
    return os.str();
  }
  if (v.type.elem.frac == 0)
    return i128ToString(v.raw[k]);
  std::ostringstream os;
  os.precision(17);
  os << v.real(k);
  return os.str();
}

static std::string indexStr(const std::vector<int64_t> &shape, size_t k) {
  std::vector<int64_t> idx(shape.size());
  for (int d = static_cast<int>(shape.size()) - 1; d >= 0; --d) {
    idx[d] = static_cast<int64_t>(k) % shape[d];
    k /= static_cast<size_t>(shape[d]);
  }
  std::string s;
  for (auto i : idx)
    s += (s.empty() ? "" : ",") + std::to_string(i);
  return "[" + s + "]";
}

// First difference between two output sets, or "".
static std::string diffOutputs(const TensorValues &a, const TensorValues &b) {
  for (auto &[name, va] : a) {
    auto it = b.find(name);
    if (it == b.end())
      return "output '" + name + "' is missing";
    const TensorValue &vb = it->second;
    if (!(va.type == vb.type))
      return "output '" + name + "' has type " + vb.type.str() +
             ", expected " + va.type.str();
    for (size_t k = 0; k < va.size(); ++k) {
      bool same = va.type.elem.isFloat() ? va.fl[k] == vb.fl[k]
                                         : va.raw[k] == vb.raw[k];
      if (!same)
        return "'" + name + "'" + indexStr(va.type.shape, k) + " is " +
               elemStr(vb, k) + ", expected " + elemStr(va, k);
    }
  }
  return "";
}

Verdict equivalent(const Module &a, const Module &b, const std::string &func,
                   int trials, uint64_t seed, bool dataflow) {
  Verdict v;
  const Func *f = a.find(func);
  if (!f)
    throw Error("unknown function '" + func + "'");
  for (int t = 0; t < trials; ++t) {
    ++v.trials;
    TensorValues in = randomInputs(*f, seed + static_cast<uint64_t>(t));
    TensorValues oa = run(a, func, in);
    std::string msg;
    try {
      if (dataflow) {
        DataflowResult r = runDataflow(b, func, in);
        if (r.report.deadlock)
          msg = "deadlock after " + std::to_string(r.report.cycles) +
                " cycles: " + r.report.snapshot;
        else
          msg = diffOutputs(oa, r.outputs);
      } else {
        msg = diffOutputs(oa, run(b, func, in));
      }
    } catch (Error &e) {
      msg = e.what();
    }
    if (!msg.empty()) {
      v.pass = false;
      v.failedTrial = t;
      v.message = "trial " + std::to_string(t) + ": " + msg;
      return v;
    }
  }
  return v;
}

} // namespace miniallo
