/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_SIM_HPP
#define MINIALLO_SIM_HPP

#include "miniallo/ir.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace miniallo {

//===----------------------------------------------------------------------===//
// Tensor values
//===----------------------------------------------------------------------===//

// Integral elements hold raw values (scaled by 2^frac for fixed point);
// float elements hold binary doubles rounded to the declared width.
struct TensorValue {
  TensorType type;
  std::vector<i128> raw;
  std::vector<double> fl;

  static TensorValue zeros(const TensorType &t);
  size_t size() const { return type.elem.isFloat() ? fl.size() : raw.size(); }
  // Element as a real number (for display and float comparison).
  double real(size_t k) const;
  bool operator==(const TensorValue &o) const;
  bool operator!=(const TensorValue &o) const { return !(*this == o); }
};

using TensorValues = std::map<std::string, TensorValue>;

// Rounds a double to an IEEE binary format of the given width (16/32/64).
double roundFloat(double v, int width);

// Seeded random values covering the full range of each element type
// (floats uniform in [-1, 1)).
TensorValue randomTensor(const TensorType &t, uint64_t seed);
TensorValues randomInputs(const Func &f, uint64_t seed);

//===----------------------------------------------------------------------===//
// Functional simulation
//===----------------------------------------------------------------------===//

struct SimConfig {
  // Abort after this many executed statements.
  int64_t stepLimit = int64_t(1) << 34;
};

// Runs `func` on `inputs` (one entry per parameter; missing parameters are
// zero). Returns every parameter after execution plus the returned local.
// Streams behave as unbounded FIFOs.
TensorValues run(const Module &m, const std::string &func,
                 const TensorValues &inputs, const SimConfig &cfg = {});

//===----------------------------------------------------------------------===//
// Dataflow simulation
//===----------------------------------------------------------------------===//

struct StreamStats {
  int64_t depth = 0; // 0: unbounded
  int64_t blockedWrites = 0;
  int64_t blockedReads = 0;
  int64_t maxOccupancy = 0;
  int64_t occupancy = 0; // at the end of the run
};

struct StallReport {
  std::map<std::string, StreamStats> streams;
  bool deadlock = false;
  int64_t cycles = 0;
  // "X: 3/4 ..." per stream when deadlocked.
  std::string snapshot;
  int64_t totalBlockedWrites() const;
  int64_t totalBlockedReads() const;
};

struct DataflowResult {
  TensorValues outputs;
  StallReport report;
};

// Runs the top-level statements of `func` as concurrent stages. Each cycle
// every unfinished stage, in statement order, executes one step: one
// iteration of an innermost loop or one statement outside such loops.
// A step that would read an empty or write a full stream is retried in the
// next cycle. Stream locals of `func` are bounded by their depth unless
// overridden by name; nested streams are unbounded.
DataflowResult runDataflow(const Module &m, const std::string &func,
                           const TensorValues &inputs,
                           const std::map<std::string, int64_t> &depths = {},
                           const SimConfig &cfg = {});

//===----------------------------------------------------------------------===//
// Differential testing
//===----------------------------------------------------------------------===//

struct Verdict {
  bool pass = true;
  int trials = 0;
  int failedTrial = -1;
  std::string message; // first counterexample or error
};

// Runs both modules on `trials` seeded-random inputs and compares every
// output. With `dataflow`, `b` runs under runDataflow and a deadlock fails.
Verdict equivalent(const Module &a, const Module &b, const std::string &func,
                   int trials, uint64_t seed, bool dataflow = false);

} // namespace miniallo

#endif // MINIALLO_SIM_HPP
