/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_SCHEDULE_HPP
#define MINIALLO_SCHEDULE_HPP

#include "miniallo/ir.hpp"
#include "miniallo/layout.hpp"

#include <map>
#include <string>
#include <vector>

namespace miniallo {

//===----------------------------------------------------------------------===//
// Primitive records
//===----------------------------------------------------------------------===//

enum class PrimKind {
  Split,
  Reorder,
  Fuse,
  Unroll,
  Pipeline,
  Unfold,
  BufferAt,
  ReuseAt,
  Partition,
  Relay,
  Compose
};

std::string primKindStr(PrimKind k);
// Loop-structure primitives; two of these on the same loop conflict.
bool isComputeKind(PrimKind k);

struct PrimitiveRecord {
  PrimKind kind = PrimKind::Split;
  std::string func; // function the primitive rewrites
  std::vector<std::string> loops;
  std::string array;
  std::string dst;    // relay: callee name or "pe:<band>"
  std::string asName; // name of the created buffer / pe grid
  int64_t factor = 0;
  int64_t ii = 1;
  std::vector<int> axes; // unfold axes, partition dims
  PartKind mode = PartKind::Bottom;
  int64_t depth = 0;
  int axis = -1;
  int origin = 0;

  // One-line description, e.g. "split gemm:k 4".
  std::string str() const;
};

// Rewrites `m` in place. Throws Error and may leave `m` partially
// rewritten; callers apply primitives on a copy.
void applyPrimitive(Module &m, const PrimitiveRecord &r);

// Applies every record in order to a copy of `pristine`.
Module replay(const Module &pristine,
              const std::vector<PrimitiveRecord> &records);

//===----------------------------------------------------------------------===//
// Schedules
//===----------------------------------------------------------------------===//

struct Handle {
  enum Kind { Array, Loop, Buffer, PeGrid } kind = Array;
  std::string func;
  std::string name;
};

class Schedule {
public:
  Module pristine;
  std::string func;
  std::vector<PrimitiveRecord> records;
  std::map<std::string, Handle> handles;
  int origin = 0;
  // Set when records were appended without being applied.
  bool stale = false;

  // Current program P_i; replays pending records first.
  const Module &program();

  void split(const std::string &loop, int64_t factor);
  void reorder(const std::vector<std::string> &loops);
  void fuse(const std::vector<std::string> &loops);
  void unroll(const std::string &loop, int64_t factor);
  void pipeline(const std::string &loop, int64_t ii = 1);
  // Returns the handle name of the PE grid.
  std::string unfold(const std::string &band, const std::vector<int> &axes,
                     const std::string &as = "");
  std::string bufferAt(const std::string &array, const std::string &loop,
                       const std::string &as = "");
  std::string reuseAt(const std::string &array, const std::string &loop,
                      const std::string &as = "");
  void partition(const std::string &array, PartKind mode,
                 const std::vector<int> &dims, int64_t factor = 0);
  void relay(const std::string &array, const std::string &dst, int axis,
             int64_t depth);

  // Resolves `name`, `func:name` or a handle to (function, memory).
  std::pair<std::string, std::string>
  resolveMemory(const std::string &name) const;
  std::pair<std::string, std::string>
  resolveLoop(const std::string &name) const;

  // Appends a record after applying it transactionally.
  void apply(PrimitiveRecord r);

private:
  Module program_;
  friend Schedule customize(const Module &m, const std::string &func);
  friend class Composer;
};

Schedule customize(const Module &m, const std::string &func);

// Fresh origin id for schedules and compose calls.
int nextOrigin();

} // namespace miniallo

#endif // MINIALLO_SCHEDULE_HPP
