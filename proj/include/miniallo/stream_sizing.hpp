/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_STREAM_SIZING_HPP
#define MINIALLO_STREAM_SIZING_HPP

#include "miniallo/ir.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace miniallo {

// Producer emits cSrc samples every iiSrc cycles, the consumer takes cDst
// samples every iiDst cycles, v samples in total.
struct RateSpec {
  int64_t cSrc = 1, iiSrc = 1;
  int64_t cDst = 1, iiDst = 1;
  int64_t v = 1;
  // Throws Error unless every field is positive.
  void validate() const;
};

int64_t fProd(int64_t t, const RateSpec &r);
int64_t fCon(int64_t t, const RateSpec &r);
// First cycle at which the consumer has taken all v samples.
int64_t doneTime(const RateSpec &r);
int64_t fifoDepth(const RateSpec &r);

struct StageEdge {
  int src = 0, dst = 0;
  RateSpec rate;
};

// Effective II per stage: a stage with producers runs at the slowest
// ceil(II'_src * cDst / cSrc) over its incoming edges. Throws on cycles.
std::vector<int64_t> propagateIi(const std::vector<int64_t> &ii,
                                 const std::vector<StageEdge> &edges);

// One stream between two stages of a dataflow function.
struct StreamEdge {
  std::string func;   // dataflow function
  std::string memory; // stream memory in `func`
  int producer = -1;  // stage index (top-level statement)
  int consumer = -1;
  RateSpec rate;
  int64_t depth = 0;
  bool sized = false; // depth computed here rather than user-given
};

// Derives rates from the stage cycle model and fills every depth-0 stream
// of every dataflow function. Returns all stream edges with their depths.
std::vector<StreamEdge> sizeStreams(Module &m);

// Rates of one stream, measured from standalone stage traces.
std::vector<StreamEdge> analyzeStreams(const Module &m);

} // namespace miniallo

#endif // MINIALLO_STREAM_SIZING_HPP
