/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_COMPOSER_HPP
#define MINIALLO_COMPOSER_HPP

#include "miniallo/schedule.hpp"
#include "miniallo/stream_sizing.hpp"

#include <string>
#include <vector>

namespace miniallo {

struct Conflict {
  enum Kind { ComputeOnSameOp, LayoutContradiction, RelayDuplicate };
  Kind kind = ComputeOnSameOp;
  PrimitiveRecord existing, incoming;
  std::string location; // "func" or "func:loop" / "func:memory"
  std::string str() const;
};

std::string conflictKindStr(Conflict::Kind k);

class ConflictError : public Error {
public:
  explicit ConflictError(Conflict c) : Error(c.str()), conflict(std::move(c)) {}
  Conflict conflict;
};

// Appends the records of `sub` to `top`, remapped onto the instances of
// sub's function in top's program (only instance `<func>_<id>` when an id
// is given). Application is deferred until the program is next requested.
// Throws ConflictError or Error("unknown instance id ...").
void compose(Schedule &top, const Schedule &sub, const std::string &id = "");

// Re-runs layout propagation from every partition record and checks every
// call site. Changes made by propagation are recorded as partition records
// so that replaying the records reproduces the program.
void unifyInterfaces(Schedule &top);

// Replays, unifies, sizes streams and verifies. Relay records with an
// automatic depth receive the computed depth. Throws Error on any
// verification diagnostic. The stream edges of the built program are
// stored in `edges` when given.
const Module &build(Schedule &s, std::vector<StreamEdge> *edges = nullptr);

} // namespace miniallo

#endif // MINIALLO_COMPOSER_HPP
