/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_LAYOUT_HPP
#define MINIALLO_LAYOUT_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace miniallo {

//===----------------------------------------------------------------------===//
// Partition lattice
//===----------------------------------------------------------------------===//

enum class PartKind { Bottom, Cyclic, Block, Top };

// One per-dimension element: complete (bottom), cyclic(a), block(a), none.
struct PartitionBase {
  PartKind kind = PartKind::Top;
  int64_t factor = 0;

  static PartitionBase bottom() { return {PartKind::Bottom, 0}; }
  static PartitionBase top() { return {PartKind::Top, 0}; }
  static PartitionBase cyclic(int64_t a) { return {PartKind::Cyclic, a}; }
  static PartitionBase block(int64_t a) { return {PartKind::Block, a}; }

  bool operator==(const PartitionBase &o) const {
    return kind == o.kind && factor == o.factor;
  }
  bool operator!=(const PartitionBase &o) const { return !(*this == o); }
  std::string str() const;
};

// Legal factor: 2 <= a < extent and a divides extent.
bool legalFactor(int64_t a, int64_t extent);
bool legalBase(const PartitionBase &b, int64_t extent);
// All lattice elements for one dimension of the given extent.
std::vector<PartitionBase> latticeElements(int64_t extent);
// Length of the longest strict chain from top to bottom.
int latticeDepth(int64_t extent);

// Throws Error on an illegal factor.
bool subtypeBase(const PartitionBase &a, const PartitionBase &b,
                 int64_t extent);
PartitionBase meetBase(const PartitionBase &a, const PartitionBase &b,
                       int64_t extent);

struct PartitionType {
  std::vector<PartitionBase> dims;
  std::vector<int64_t> shape;

  static PartitionType none(const std::vector<int64_t> &shape);
  bool operator==(const PartitionType &o) const {
    return dims == o.dims && shape == o.shape;
  }
  bool operator!=(const PartitionType &o) const { return !(*this == o); }
  bool isNone() const;
  int depth() const;
  // "complete,none" style, one entry per dimension.
  std::string str() const;
};

PartitionType parsePartitionType(const std::string &s,
                                 const std::vector<int64_t> &shape);

bool subtype(const PartitionType &a, const PartitionType &b);
PartitionType meet(const PartitionType &a, const PartitionType &b);
bool callCompatible(const PartitionType &param, const PartitionType &arg);

//===----------------------------------------------------------------------===//
// Worklist propagation over an abstract graph
//===----------------------------------------------------------------------===//

struct LayoutGraph {
  // Node payload: function that owns it and current partition type.
  std::vector<std::string> func;
  std::vector<PartitionType> type;
  std::vector<std::vector<int>> preds, succs;
};

struct PropagateResult {
  std::vector<PartitionType> types;
  int updates = 0;
};

// Pops from the worklist front unless `pick` is given, in which case it
// returns the index of the worklist entry to pop next.
using PickFn = std::function<size_t(size_t worklistSize)>;

PropagateResult propagate(const LayoutGraph &g, int node,
                          const PartitionType &target,
                          const PickFn &pick = nullptr);

} // namespace miniallo

#endif // MINIALLO_LAYOUT_HPP
