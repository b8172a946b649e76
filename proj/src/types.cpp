/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/types.hpp"

#include <algorithm>
#include <sstream>

namespace miniallo {

std::string ElemType::str() const {
  switch (kind) {
  case ElemKind::Int:
    return "int" + std::to_string(width);
  case ElemKind::UInt:
    return "uint" + std::to_string(width);
  case ElemKind::Index:
    return "index";
  case ElemKind::Float:
    return "float" + std::to_string(width);
  case ElemKind::Fixed:
    return "fixed(" + std::to_string(width) + "," + std::to_string(frac) + ")";
  case ElemKind::UFixed:
    return "ufixed(" + std::to_string(width) + "," + std::to_string(frac) +
           ")";
  }
  return "?";
}

std::string ElemType::validate() const {
  if (kind == ElemKind::Float) {
    if (width != 16 && width != 32 && width != 64)
      return "float width must be 16, 32 or 64";
    return "";
  }
  if (width < 1 || width > kMaxWidth)
    return "bit width must be in 1..128";
  if (frac < 0 || frac > width)
    return "fractional bits must be in 0..width";
  return "";
}

static std::optional<int> parseInt(const std::string &s) {
  if (s.empty() || s.size() > 4)
    return std::nullopt;
  for (char c : s)
    if (c < '0' || c > '9')
      return std::nullopt;
  return std::stoi(s);
}

std::optional<ElemType> parseElemType(const std::string &s) {
  auto withWidth = [&](const std::string &prefix,
                       ElemKind k) -> std::optional<ElemType> {
    if (s.rfind(prefix, 0) != 0)
      return std::nullopt;
    auto w = parseInt(s.substr(prefix.size()));
    if (!w)
      return std::nullopt;
    ElemType t{k, *w, 0};
    if (!t.validate().empty())
      return std::nullopt;
    return t;
  };
  if (s == "index")
    return ElemType::index();
  if (s == "bool")
    return ElemType::uintTy(1);
  auto fixedForm = [&](const std::string &prefix,
                       ElemKind k) -> std::optional<ElemType> {
    if (s.rfind(prefix + "(", 0) != 0 || s.back() != ')')
      return std::nullopt;
    std::string inner = s.substr(prefix.size() + 1,
                                 s.size() - prefix.size() - 2);
    auto comma = inner.find(',');
    if (comma == std::string::npos)
      return std::nullopt;
    auto trim = [](std::string x) {
      x.erase(std::remove(x.begin(), x.end(), ' '), x.end());
      return x;
    };
    auto w = parseInt(trim(inner.substr(0, comma)));
    auto f = parseInt(trim(inner.substr(comma + 1)));
    if (!w || !f)
      return std::nullopt;
    ElemType t{k, *w, *f};
    if (!t.validate().empty())
      return std::nullopt;
    return t;
  };
  if (auto t = fixedForm("ufixed", ElemKind::UFixed))
    return t;
  if (auto t = fixedForm("fixed", ElemKind::Fixed))
    return t;
  if (auto t = withWidth("uint", ElemKind::UInt))
    return t;
  if (auto t = withWidth("int", ElemKind::Int))
    return t;
  if (auto t = withWidth("float", ElemKind::Float))
    return t;
  return std::nullopt;
}

namespace {

struct IntForm {
  bool sign;
  int ibits; // integer bits including the sign bit
  int frac;
};

IntForm formOf(const ElemType &t) {
  switch (t.kind) {
  case ElemKind::Int:
  case ElemKind::Index:
    return {true, t.width, 0};
  case ElemKind::UInt:
    return {false, t.width, 0};
  case ElemKind::Fixed:
    return {true, t.width - t.frac, t.frac};
  case ElemKind::UFixed:
    return {false, t.width - t.frac, t.frac};
  default:
    return {true, 0, 0};
  }
}

ElemType fromForm(bool sign, int ibits, int frac, bool fixedFamily) {
  int w = std::min(kMaxWidth, std::max(1, ibits + frac));
  frac = std::min(frac, w);
  if (fixedFamily || frac > 0)
    return sign ? ElemType::fixedTy(w, frac) : ElemType::ufixedTy(w, frac);
  return sign ? ElemType::intTy(w) : ElemType::uintTy(w);
}

bool isCompare(const std::string &op) {
  return op == "<" || op == "<=" || op == ">" || op == ">=" || op == "==" ||
         op == "!=";
}

} // namespace

PromoteResult promoteBinary(const std::string &op, const ElemType &a,
                            const ElemType &b) {
  if (op == "and" || op == "or")
    return {ElemType::uintTy(1), ""};
  if (a.isFloat() != b.isFloat())
    return {std::nullopt, std::string("no implicit ") +
                              (a.isFloat() ? "float→int" : "int→float") +
                              " conversion"};
  if (isCompare(op))
    return {ElemType::uintTy(1), ""};
  if (a.isFloat()) {
    if (op == "//" || op == "%")
      return {std::nullopt, "operator " + op + " is not defined on floats"};
    return {ElemType::floatTy(std::max(a.width, b.width)), ""};
  }
  if (a.isIndex() && b.isIndex())
    return {ElemType::index(), ""};
  IntForm x = formOf(a), y = formOf(b);
  bool fixedFamily = a.isFixedFamily() || b.isFixedFamily();
  bool sign = x.sign || y.sign;
  if (sign) {
    if (!x.sign)
      x.ibits += 1;
    if (!y.sign)
      y.ibits += 1;
  }
  if (op == "+" || op == "-") {
    bool rsign = sign || op == "-";
    int f = std::max(x.frac, y.frac);
    int ib = std::max(x.ibits, y.ibits) + 1;
    return {fromForm(rsign, ib, f, fixedFamily), ""};
  }
  if (op == "*")
    return {fromForm(sign, x.ibits + y.ibits, x.frac + y.frac, fixedFamily),
            ""};
  if (op == "/" || op == "//") {
    if (op == "//" && fixedFamily)
      return {std::nullopt, "operator // is not defined on fixed-point"};
    return {fromForm(sign, x.ibits + y.frac + (sign ? 1 : 0), x.frac,
                     fixedFamily),
            ""};
  }
  if (op == "%") {
    if (fixedFamily)
      return {std::nullopt, "operator % is not defined on fixed-point"};
    return {fromForm(sign, y.ibits, 0, false), ""};
  }
  return {std::nullopt, "unknown operator " + op};
}

bool implicitlyWidens(const ElemType &from, const ElemType &to) {
  if (from == to)
    return true;
  if (from.isFloat() || to.isFloat())
    return from.isFloat() && to.isFloat() && from.width <= to.width;
  if (to.isIndex())
    return from.kind == ElemKind::Int || from.kind == ElemKind::UInt;
  IntForm f = formOf(from), t = formOf(to);
  if (f.sign && !t.sign)
    return false;
  int need = f.ibits + ((!f.sign && t.sign) ? 1 : 0);
  return t.frac >= f.frac && t.ibits >= need;
}

bool storeCompatible(const ElemType &from, const ElemType &to) {
  return from.isFloat() == to.isFloat();
}

std::string TensorType::str() const {
  std::ostringstream os;
  os << elem.str();
  if (!shape.empty()) {
    os << "[";
    for (size_t i = 0; i < shape.size(); ++i)
      os << (i ? ", " : "") << shape[i];
    os << "]";
  }
  return os.str();
}

i128 wrapInt(i128 v, int w, bool isSigned) {
  if (w >= 128)
    return v;
  using u128 = unsigned __int128;
  u128 mask = (static_cast<u128>(1) << w) - 1;
  u128 u = static_cast<u128>(v) & mask;
  if (isSigned && (u >> (w - 1)) & 1)
    u |= ~mask;
  return static_cast<i128>(u);
}

i128 floorDiv(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
    --q;
  return q;
}

i128 floorMod(i128 a, i128 b) { return a - floorDiv(a, b) * b; }

i128 rescale(i128 raw, int from, int to) {
  if (to >= from)
    return raw * (static_cast<i128>(1) << (to - from));
  // Arithmetic shift right floors toward -inf.
  return raw >> (from - to);
}

std::string i128ToString(i128 v) {
  if (v == 0)
    return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v)
                            : static_cast<unsigned __int128>(v);
  std::string s;
  while (u > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg)
    s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

int bitsForSigned(i128 v) {
  int w = 1;
  while (w < 128) {
    i128 lo = -(static_cast<i128>(1) << (w - 1));
    i128 hi = (static_cast<i128>(1) << (w - 1)) - 1;
    if (v >= lo && v <= hi)
      return w;
    ++w;
  }
  return 128;
}

} // namespace miniallo
