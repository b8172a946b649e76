/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

// Step-wise interpreter shared by the functional and dataflow simulators.

#ifndef MINIALLO_SRC_INTERP_HPP
#define MINIALLO_SRC_INTERP_HPP

#include "miniallo/sim.hpp"

#include <deque>
#include <memory>
#include <unordered_map>

namespace miniallo {
namespace interp {

struct Val {
  i128 i = 0;
  double f = 0;
};

struct Channel {
  std::string name;
  std::deque<Val> q;
  int64_t cap = 0;     // 0: unbounded
  bool source = false; // empty reads yield zero (standalone timing)
  int64_t writes = 0, reads = 0;
  int64_t lastWrite = -1, lastRead = -1;
  int64_t maxOcc = 0;
};

struct Buffer {
  std::string name;
  TensorType type;
  Storage storage;
  std::vector<i128> raw;
  std::vector<double> fl;
  std::vector<Channel> chans; // streams: one per element or one in total

  Buffer(const std::string &n, const TensorType &t, const Storage &s);
  bool isStream() const { return storage.isStream(); }
};

// A view of a buffer: a trailing sub-array selected by a call prefix.
struct Ref {
  Buffer *buf = nullptr;
  int64_t offset = 0;
  std::vector<int64_t> shape;
  std::vector<int64_t> strides;
};

struct Activation {
  const Func *func = nullptr;
  std::unordered_map<std::string, Ref> mems;
  std::unordered_map<std::string, int64_t> env;
  std::vector<std::unique_ptr<Buffer>> owned;
};

// Thrown by a step that cannot complete this cycle.
struct Blocked {
  Channel *ch = nullptr;
  bool write = false;
};

struct Undo {
  enum Kind { Mem, Pop, Push } kind = Mem;
  Buffer *buf = nullptr;
  size_t idx = 0;
  Val old;
  Channel *ch = nullptr;
};

class Machine {
public:
  explicit Machine(const Module &m) : m_(m) {}

  // Root activation; parameters are initialized from `inputs`.
  std::unique_ptr<Activation> enter(const Func &f, const TensorValues &inputs);
  // Activation for a call statement inside `caller`.
  std::unique_ptr<Activation> call(const Stmt &s, Activation &caller);

  // Executes statements to completion.
  void exec(const std::vector<Stmt> &body, Activation &a);
  void execStmt(const Stmt &s, Activation &a);
  Val eval(const Expr &e, Activation &a);
  bool truthy(const Expr &e, Activation &a);

  // Innermost loop: no loop or call anywhere in its body.
  bool innermost(const Stmt &loop);

  // Undo log for the current step; null when steps never block.
  std::vector<Undo> *txn = nullptr;
  void rollback();
  // Snapshot of a memory as a tensor value (zeros for streams).
  static TensorValue value(const Ref &r);
  int64_t now = 0;
  int64_t steps = 0;
  int64_t stepLimit = int64_t(1) << 34;
  // Streams of the dataflow root get bounded capacities.
  std::map<std::string, int64_t> rootDepths;
  bool boundRoot = false;
  bool sourceStreams = false;

  const Module &module() const { return m_; }

private:
  std::unique_ptr<Buffer> makeLocal(const Memory &mem, bool root);
  size_t flatIndex(const Ref &r, const std::vector<ExprP> &idx,
                   Activation &a, const std::string &name);
  Val load(const Expr &e, Activation &a);
  void store(const Stmt &s, Activation &a);
  void push(Channel &c, const Val &v);
  Val pop(Channel &c);
  Channel &channelFor(Ref &r, const std::vector<ExprP> &idx, Activation &a,
                      const std::string &name);

  const Module &m_;
  std::unordered_map<const Stmt *, bool> innermost_;
};

// Cursor over a statement range of one activation; advances through
// control statements until it reaches a step.
class Cursor {
public:
  Cursor(Machine &mc, Activation &root, size_t begin, size_t end);
  // Executes one step. Returns false when the range is exhausted.
  // Throws Blocked (after rolling back) when the step cannot complete.
  bool step();
  bool done();

private:
  struct Frame {
    bool loop = false;
    const std::vector<Stmt> *body = nullptr;
    size_t pc = 0, end = 0;
    const Stmt *stmt = nullptr;
    int64_t iter = 0;
    bool unit = false;
    Activation *act = nullptr;
    std::unique_ptr<Activation> owned;
  };
  // Moves to the next step; returns false when exhausted.
  bool seek();

  Machine &mc_;
  std::vector<Frame> stack_;
};

// Parameters and the returned local of a finished activation.
TensorValues outputsOf(const Func &f, Activation &a);

// Value conversion between element types.
Val convert(const Val &v, const ElemType &from, const ElemType &to);

} // namespace interp
} // namespace miniallo

#endif // MINIALLO_SRC_INTERP_HPP
