/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_PERF_HPP
#define MINIALLO_PERF_HPP

#include "miniallo/ir.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace miniallo {

// Operation latencies in cycles.
struct LatencyConfig {
  int64_t floatAdd = 7;
  int64_t floatMul = 4;
  int64_t intAdd = 1;
  int64_t intMul = 1;
  int64_t memRead = 1;
  int64_t memWrite = 1;
  // Innermost loops are pipelined at II=1 unless scheduled otherwise.
  bool autoPipeline = true;
  // Throws Error unless every latency is at least 1.
  void validate() const;
};

// Achieved II of a pipelined loop: the requested II raised to the longest
// loop-carried recurrence through a memory element whose index does not
// depend on the loop variable.
int64_t minIi(const Stmt &loop, const LatencyConfig &cfg);

struct LoopPerf {
  std::string func;
  std::string label;
  int64_t trip = 0;       // after unrolling
  int64_t requestedIi = 0; // 0: not pipelined
  int64_t achievedIi = 0;
  bool pipelined = false;
  int64_t cycles = 0;     // one execution of the loop
};

struct PerfReport {
  int64_t cycles = 0;
  std::vector<LoopPerf> loops;
  std::string str() const;
};

// Structural cycle estimate of `func` and every loop it reaches.
PerfReport latency(const Module &m, const std::string &func,
                   const LatencyConfig &cfg = {});

} // namespace miniallo

#endif // MINIALLO_PERF_HPP
