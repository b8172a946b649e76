/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/perf.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>

namespace miniallo {

void LatencyConfig::validate() const {
  if (floatAdd < 1 || floatMul < 1 || intAdd < 1 || intMul < 1 ||
      memRead < 1 || memWrite < 1)
    throw Error("latencies must be at least 1 cycle");
}

//===----------------------------------------------------------------------===//
// Operation latencies
//===----------------------------------------------------------------------===//

static int64_t opLatency(const std::string &op, const ElemType &t,
                         const LatencyConfig &cfg) {
  bool mul = op == "*" || op == "/" || op == "//" || op == "%";
  if (t.isFloat())
    return mul ? cfg.floatMul : cfg.floatAdd;
  return mul ? cfg.intMul : cfg.intAdd;
}

static int64_t exprLatency(const ExprP &e, const LatencyConfig &cfg) {
  switch (e->kind) {
  case ExprKind::IntLit:
  case ExprKind::FloatLit:
  case ExprKind::Var:
    return 0;
  case ExprKind::Load:
    return cfg.memRead;
  case ExprKind::Cast:
    return exprLatency(e->args[0], cfg);
  case ExprKind::Unary:
    return exprLatency(e->args[0], cfg) +
           opLatency("-", e->args[0]->type, cfg);
  case ExprKind::Binary:
    return std::max(exprLatency(e->args[0], cfg),
                    exprLatency(e->args[1], cfg)) +
           opLatency(e->name, e->args[0]->type, cfg);
  }
  return 0;
}

static int64_t storeLatency(const Stmt &s, const LatencyConfig &cfg) {
  int64_t v = exprLatency(s.value, cfg);
  if (s.update)
    v = std::max(v, cfg.memRead) + opLatency("+", s.opType, cfg);
  return v + cfg.memWrite;
}

//===----------------------------------------------------------------------===//
// Initiation interval
//===----------------------------------------------------------------------===//

static bool mentions(const std::vector<ExprP> &idx, const std::string &var) {
  std::vector<std::string> vars;
  for (auto &e : idx)
    collectVars(e, vars);
  return std::find(vars.begin(), vars.end(), var) != vars.end();
}

// Latency from a load of `array[idx]` to the root of `e`, if any.
static std::optional<int64_t> pathLatency(const ExprP &e,
                                          const std::string &array,
                                          const std::vector<ExprP> &idx,
                                          const LatencyConfig &cfg) {
  if (e->kind == ExprKind::Load) {
    if (e->name != array || e->args.size() != idx.size())
      return std::nullopt;
    for (size_t k = 0; k < idx.size(); ++k)
      if (!exprEqual(e->args[k], idx[k]))
        return std::nullopt;
    return 0;
  }
  std::optional<int64_t> best;
  for (auto &a : e->args) {
    auto p = pathLatency(a, array, idx, cfg);
    if (p && (!best || *p > *best))
      best = p;
  }
  if (!best)
    return std::nullopt;
  if (e->kind == ExprKind::Binary)
    return *best + opLatency(e->name, e->args[0]->type, cfg);
  if (e->kind == ExprKind::Unary)
    return *best + opLatency("-", e->args[0]->type, cfg);
  return best;
}

int64_t minIi(const Stmt &loop, const LatencyConfig &cfg) {
  int64_t ii = std::max<int64_t>(1, loop.attrs.pipeline);
  walk(loop.body, [&](const Stmt &s) {
    if (s.kind != StmtKind::Store || mentions(s.idx, loop.var))
      return true;
    if (s.update) {
      ii = std::max(ii, opLatency("+", s.opType, cfg));
    } else if (auto p = pathLatency(s.value, s.array, s.idx, cfg)) {
      ii = std::max(ii, *p);
    }
    return true;
  });
  return ii;
}

//===----------------------------------------------------------------------===//
// Cycle estimate
//===----------------------------------------------------------------------===//

namespace {

struct Flat {
  int64_t trips = 0, ii = 1, fill = 0;
};

class Model {
public:
  Model(const Module &m, const LatencyConfig &cfg) : m_(m), cfg_(cfg) {}

  int64_t func(const std::string &name) {
    auto it = memo_.find(name);
    if (it != memo_.end())
      return it->second;
    const Func &f = m_.get(name);
    int64_t c = 0;
    if (f.attrs.count("dataflow")) {
      for (auto &s : f.body)
        c = std::max(c, stmt(f, s));
      for (auto &l : f.locals)
        if (l.storage.isStream())
          ++c;
    } else {
      c = body(f, f.body);
    }
    memo_[name] = c;
    collect(f, f.body);
    return c;
  }

  std::vector<LoopPerf> loops;

private:
  static bool innermost(const Stmt &s) {
    bool leaf = true;
    walk(s.body, [&](const Stmt &t) {
      if (t.kind == StmtKind::For || t.kind == StmtKind::Call)
        leaf = false;
      return leaf;
    });
    return leaf;
  }

  bool pipelined(const Stmt &s) const {
    return s.attrs.pipeline > 0 || (cfg_.autoPipeline && innermost(s));
  }

  static int64_t trip(const Stmt &s) {
    int64_t u = std::max(1, s.attrs.unroll);
    return (s.extent + u - 1) / u;
  }

  std::optional<Flat> flat(const Func &f, const Stmt &s) {
    if (pipelined(s))
      return Flat{trip(s), minIi(s, cfg_), body(f, s.body)};
    if (s.body.size() == 1 && s.body[0].kind == StmtKind::For)
      if (auto in = flat(f, s.body[0]))
        return Flat{trip(s) * in->trips, in->ii, in->fill};
    return std::nullopt;
  }

  int64_t loop(const Func &f, const Stmt &s) {
    if (auto fl = flat(f, s))
      return fl->trips * fl->ii + fl->fill;
    return trip(s) * body(f, s.body);
  }

  int64_t stmt(const Func &f, const Stmt &s) {
    switch (s.kind) {
    case StmtKind::Store:
      return storeLatency(s, cfg_);
    case StmtKind::Fill: {
      const Memory *mem = f.findMem(s.array);
      return (mem ? mem->type.numel() : 1) * cfg_.memWrite;
    }
    case StmtKind::If:
      return exprLatency(s.cond, cfg_) + body(f, s.body);
    case StmtKind::Call:
      return func(s.callee);
    case StmtKind::For:
      return loop(f, s);
    }
    return 0;
  }

  int64_t body(const Func &f, const std::vector<Stmt> &b) {
    int64_t c = 0;
    for (auto &s : b)
      c += stmt(f, s);
    return c;
  }

  void collect(const Func &f, const std::vector<Stmt> &b) {
    walk(b, [&](const Stmt &s) {
      if (s.kind != StmtKind::For)
        return true;
      LoopPerf p;
      p.func = f.name;
      p.label = s.label;
      p.trip = trip(s);
      p.requestedIi = s.attrs.pipeline;
      p.pipelined = pipelined(s);
      p.achievedIi = p.pipelined ? minIi(s, cfg_) : 0;
      p.cycles = loop(f, s);
      loops.push_back(p);
      return true;
    });
  }

  const Module &m_;
  const LatencyConfig &cfg_;
  std::map<std::string, int64_t> memo_;
};

} // namespace

PerfReport latency(const Module &m, const std::string &func,
                   const LatencyConfig &cfg) {
  cfg.validate();
  const Func *f = m.find(func);
  if (!f)
    throw Error("unknown function '" + func + "'");
  if (f->isTemplate())
    throw Error("cannot estimate template '" + func + "'");
  Model model(m, cfg);
  PerfReport r;
  r.cycles = model.func(func);
  r.loops = std::move(model.loops);
  std::stable_sort(r.loops.begin(), r.loops.end(),
                   [](const LoopPerf &a, const LoopPerf &b) {
                     return a.func < b.func;
                   });
  return r;
}

std::string PerfReport::str() const {
  std::ostringstream os;
  for (auto &l : loops) {
    os << "loop " << l.func << ":" << l.label << " trip=" << l.trip;
    if (l.pipelined)
      os << " ii=" << l.achievedIi << " (requested "
         << std::max<int64_t>(1, l.requestedIi) << ")";
    os << " cycles=" << l.cycles << "\n";
  }
  os << "total cycles: " << cycles << "\n";
  return os.str();
}

} // namespace miniallo
