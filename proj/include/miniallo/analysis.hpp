/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_ANALYSIS_HPP
#define MINIALLO_ANALYSIS_HPP

#include "miniallo/ir.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace miniallo {

//===----------------------------------------------------------------------===//
// Affine index expressions
//===----------------------------------------------------------------------===//

struct Affine {
  std::map<std::string, int64_t> coef;
  int64_t constant = 0;

  int64_t coefOf(const std::string &v) const {
    auto it = coef.find(v);
    return it == coef.end() ? 0 : it->second;
  }
  bool isConstant() const { return coef.empty(); }
};

std::optional<Affine> toAffine(const ExprP &e);
ExprP fromAffine(const Affine &a);

struct Interval {
  int64_t lo = 0, hi = 0; // inclusive
};

// Range of an affine expression when each variable ranges over [0, ext).
// Variables missing from `extents` must have a zero coefficient.
std::optional<Interval> affineRange(const Affine &a,
                                    const std::map<std::string, int64_t> &extents);

//===----------------------------------------------------------------------===//
// Concrete access traces
//===----------------------------------------------------------------------===//

using Env = std::map<std::string, int64_t>;

// Evaluates an index expression with concrete loop variables. Loads make
// the result unknown.
std::optional<int64_t> evalIndex(const ExprP &e, const Env &env);

struct Access {
  bool write = false;
  std::vector<int64_t> idx;
};

// Enumerates, in program order, the element accesses to memory `mem` of
// function `f`, following the memory into callees. Returns nullopt when the
// trace is not statically known or exceeds `cap` accesses.
std::optional<std::vector<Access>>
accessTrace(const Module &m, const Func &f, const std::string &mem,
            size_t cap = 1u << 22);

// Same, restricted to the statements `body` of `f`.
std::optional<std::vector<Access>>
accessTraceIn(const Module &m, const Func &f, const std::vector<Stmt> &body,
              const std::string &mem, size_t cap = 1u << 22);

} // namespace miniallo

#endif // MINIALLO_ANALYSIS_HPP
