/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/layout.hpp"
#include "miniallo/diag.hpp"

#include <deque>
#include <numeric>
#include <sstream>

namespace miniallo {

std::string PartitionBase::str() const {
  switch (kind) {
  case PartKind::Bottom:
    return "complete";
  case PartKind::Cyclic:
    return "cyclic(" + std::to_string(factor) + ")";
  case PartKind::Block:
    return "block(" + std::to_string(factor) + ")";
  case PartKind::Top:
    return "none";
  }
  return "?";
}

bool legalFactor(int64_t a, int64_t extent) {
  return a >= 2 && a < extent && extent % a == 0;
}

bool legalBase(const PartitionBase &b, int64_t extent) {
  if (b.kind == PartKind::Cyclic || b.kind == PartKind::Block)
    return legalFactor(b.factor, extent);
  return true;
}

std::vector<PartitionBase> latticeElements(int64_t extent) {
  std::vector<PartitionBase> out{PartitionBase::top()};
  for (int64_t a = 2; a < extent; ++a)
    if (extent % a == 0)
      out.push_back(PartitionBase::cyclic(a));
  for (int64_t a = 2; a < extent; ++a)
    if (extent % a == 0)
      out.push_back(PartitionBase::block(a));
  out.push_back(PartitionBase::bottom());
  return out;
}

int latticeDepth(int64_t extent) {
  int omega = 0;
  int64_t s = extent;
  for (int64_t p = 2; p * p <= s; ++p)
    while (s % p == 0) {
      s /= p;
      ++omega;
    }
  if (s > 1)
    ++omega;
  return omega < 1 ? 1 : omega;
}

static void checkLegal(const PartitionBase &b, int64_t extent) {
  if (!legalBase(b, extent))
    throw Error("illegal partition factor " + std::to_string(b.factor) +
                " for extent " + std::to_string(extent));
}

bool subtypeBase(const PartitionBase &a, const PartitionBase &b,
                 int64_t extent) {
  checkLegal(a, extent);
  checkLegal(b, extent);
  if (a == b)
    return true;
  if (a.kind == PartKind::Bottom || b.kind == PartKind::Top)
    return true;
  if (a.kind == b.kind &&
      (a.kind == PartKind::Cyclic || a.kind == PartKind::Block))
    return a.factor % b.factor == 0;
  return false;
}

PartitionBase meetBase(const PartitionBase &a, const PartitionBase &b,
                       int64_t extent) {
  checkLegal(a, extent);
  checkLegal(b, extent);
  if (a.kind == PartKind::Top)
    return b;
  if (b.kind == PartKind::Top)
    return a;
  if (a.kind == PartKind::Bottom || b.kind == PartKind::Bottom)
    return PartitionBase::bottom();
  if (a.kind != b.kind)
    return PartitionBase::bottom();
  int64_t l = std::lcm(a.factor, b.factor);
  if (legalFactor(l, extent))
    return {a.kind, l};
  return PartitionBase::bottom();
}

PartitionType PartitionType::none(const std::vector<int64_t> &shape) {
  PartitionType t;
  t.shape = shape;
  t.dims.assign(shape.size(), PartitionBase::top());
  return t;
}

bool PartitionType::isNone() const {
  for (auto &d : dims)
    if (d.kind != PartKind::Top)
      return false;
  return true;
}

int PartitionType::depth() const {
  int d = 0;
  for (auto s : shape)
    d += latticeDepth(s);
  return d;
}

std::string PartitionType::str() const {
  if (dims.empty())
    return "scalar";
  std::string out;
  for (size_t i = 0; i < dims.size(); ++i)
    out += (i ? "," : "") + dims[i].str();
  return out;
}

PartitionType parsePartitionType(const std::string &s,
                                 const std::vector<int64_t> &shape) {
  PartitionType t = PartitionType::none(shape);
  if (s == "scalar" || s.empty())
    return t;
  std::vector<std::string> parts;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(')
      ++depth;
    if (c == ')')
      --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.size() != shape.size())
    throw Error("partition type '" + s + "' does not match rank " +
                std::to_string(shape.size()));
  for (size_t i = 0; i < parts.size(); ++i) {
    const std::string &p = parts[i];
    PartitionBase b;
    auto factorOf = [&](const std::string &prefix) {
      return std::stoll(p.substr(prefix.size() + 1,
                                 p.size() - prefix.size() - 2));
    };
    if (p == "complete")
      b = PartitionBase::bottom();
    else if (p == "none")
      b = PartitionBase::top();
    else if (p.rfind("cyclic(", 0) == 0)
      b = PartitionBase::cyclic(factorOf("cyclic"));
    else if (p.rfind("block(", 0) == 0)
      b = PartitionBase::block(factorOf("block"));
    else
      throw Error("unknown partition element '" + p + "'");
    checkLegal(b, shape[i]);
    t.dims[i] = b;
  }
  return t;
}

static void checkShapes(const PartitionType &a, const PartitionType &b) {
  if (a.shape != b.shape || a.dims.size() != b.dims.size())
    throw Error("partition type shape mismatch");
}

bool subtype(const PartitionType &a, const PartitionType &b) {
  checkShapes(a, b);
  for (size_t i = 0; i < a.dims.size(); ++i)
    if (!subtypeBase(a.dims[i], b.dims[i], a.shape[i]))
      return false;
  return true;
}

PartitionType meet(const PartitionType &a, const PartitionType &b) {
  checkShapes(a, b);
  PartitionType out = a;
  for (size_t i = 0; i < a.dims.size(); ++i)
    out.dims[i] = meetBase(a.dims[i], b.dims[i], a.shape[i]);
  return out;
}

bool callCompatible(const PartitionType &param, const PartitionType &arg) {
  return subtype(arg, param);
}

PropagateResult propagate(const LayoutGraph &g, int node,
                          const PartitionType &target, const PickFn &pick) {
  PropagateResult res;
  res.types = g.type;
  std::deque<std::pair<int, PartitionType>> work;
  work.emplace_back(node, target);
  while (!work.empty()) {
    size_t at = pick ? pick(work.size()) : 0;
    auto [n, t] = work[at];
    work.erase(work.begin() + static_cast<long>(at));
    if (t.shape != res.types[n].shape)
      continue;
    PartitionType next = meet(t, res.types[n]);
    if (next == res.types[n])
      continue;
    res.types[n] = next;
    ++res.updates;
    auto visit = [&](int m) {
      if (g.func[m] != g.func[n])
        work.emplace_back(m, next);
    };
    for (int m : g.preds[n])
      visit(m);
    for (int m : g.succs[n])
      visit(m);
  }
  return res;
}

} // namespace miniallo
