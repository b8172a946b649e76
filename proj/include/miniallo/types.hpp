/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_TYPES_HPP
#define MINIALLO_TYPES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace miniallo {

using i128 = __int128;

//===----------------------------------------------------------------------===//
// Element types
//===----------------------------------------------------------------------===//

enum class ElemKind { Int, UInt, Index, Float, Fixed, UFixed };

struct ElemType {
  ElemKind kind = ElemKind::Index;
  int width = 64;
  int frac = 0;

  static ElemType intTy(int w) { return {ElemKind::Int, w, 0}; }
  static ElemType uintTy(int w) { return {ElemKind::UInt, w, 0}; }
  static ElemType index() { return {ElemKind::Index, 64, 0}; }
  static ElemType floatTy(int w) { return {ElemKind::Float, w, 0}; }
  static ElemType fixedTy(int w, int f) { return {ElemKind::Fixed, w, f}; }
  static ElemType ufixedTy(int w, int f) { return {ElemKind::UFixed, w, f}; }

  bool isFloat() const { return kind == ElemKind::Float; }
  bool isIndex() const { return kind == ElemKind::Index; }
  // Integers and fixed-point share one representation: a raw integer
  // scaled by 2^-frac.
  bool isIntegral() const { return !isFloat(); }
  bool isSigned() const {
    return kind == ElemKind::Int || kind == ElemKind::Fixed ||
           kind == ElemKind::Index || kind == ElemKind::Float;
  }
  bool isFixedFamily() const {
    return kind == ElemKind::Fixed || kind == ElemKind::UFixed;
  }

  bool operator==(const ElemType &o) const {
    return kind == o.kind && width == o.width && frac == o.frac;
  }
  bool operator!=(const ElemType &o) const { return !(*this == o); }

  std::string str() const;
  // Validates the invariants on widths; returns an error message or "".
  std::string validate() const;
};

// Parses "int8", "uint3", "index", "float32", "fixed(8,4)", ...
std::optional<ElemType> parseElemType(const std::string &s);

// Maximum width of any integer representation.
constexpr int kMaxWidth = 128;

// Result type of a binary operator under the promotion rules.
// Returns std::nullopt with a message when no implicit conversion exists.
struct PromoteResult {
  std::optional<ElemType> type;
  std::string error;
};
PromoteResult promoteBinary(const std::string &op, const ElemType &a,
                            const ElemType &b);

// Whether a value of type `from` may be implicitly converted to `to`
// inside an expression (same-family widening only).
bool implicitlyWidens(const ElemType &from, const ElemType &to);

// Whether storing `from` into a location of type `to` is legal
// (wrap/floor narrowing is allowed; crossing float/integral is not).
bool storeCompatible(const ElemType &from, const ElemType &to);

//===----------------------------------------------------------------------===//
// Tensor types
//===----------------------------------------------------------------------===//

struct TensorType {
  ElemType elem;
  std::vector<int64_t> shape;

  int rank() const { return static_cast<int>(shape.size()); }
  int64_t numel() const {
    int64_t n = 1;
    for (auto s : shape)
      n *= s;
    return n;
  }
  bool operator==(const TensorType &o) const {
    return elem == o.elem && shape == o.shape;
  }
  std::string str() const;
};

//===----------------------------------------------------------------------===//
// Integer helpers
//===----------------------------------------------------------------------===//

// Wraps v into a w-bit two's complement (signed) or modular (unsigned) value.
i128 wrapInt(i128 v, int w, bool isSigned);
// Floor division and modulo (round toward -inf).
i128 floorDiv(i128 a, i128 b);
i128 floorMod(i128 a, i128 b);
// Shifts a raw fixed-point value from fraction `from` to fraction `to`,
// flooring when bits are dropped.
i128 rescale(i128 raw, int from, int to);
std::string i128ToString(i128 v);
// Smallest signed width that holds v.
int bitsForSigned(i128 v);

} // namespace miniallo

#endif // MINIALLO_TYPES_HPP
