/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

// Standalone stage timing used by stream sizing.

#ifndef MINIALLO_SRC_STAGE_MODEL_HPP
#define MINIALLO_SRC_STAGE_MODEL_HPP

#include "miniallo/ir.hpp"

#include <map>
#include <string>

namespace miniallo {

struct StageTiming {
  int64_t writes = 0, reads = 0;
  int64_t lastWrite = -1, lastRead = -1; // step index of the last access
  int64_t steps = 0;
};

// Runs top-level statement `stage` of `f` alone on zero inputs, with every
// stream of `f` unbounded and never empty, and reports its accesses to each
// stream local of `f`.
std::map<std::string, StageTiming> stageTimings(const Module &m, const Func &f,
                                                size_t stage);

} // namespace miniallo

#endif // MINIALLO_SRC_STAGE_MODEL_HPP
