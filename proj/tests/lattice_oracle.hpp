/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_TEST_LATTICE_ORACLE_HPP
#define MINIALLO_TEST_LATTICE_ORACLE_HPP

#include "miniallo/layout.hpp"

#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using miniallo::LayoutGraph;
using miniallo::PartitionBase;
using miniallo::PartitionType;
using miniallo::PartKind;

// Brute-force subtype relation: the typing rules closed under reflexivity
// and transitivity, over every element of one dimension.
struct Closure {
  explicit Closure(int64_t extent) {
    elems.push_back(PartitionBase::top());
    elems.push_back(PartitionBase::bottom());
    for (int64_t a = 2; a < extent; ++a)
      if (extent % a == 0) {
        elems.push_back(PartitionBase::cyclic(a));
        elems.push_back(PartitionBase::block(a));
      }
    size_t n = elems.size();
    rel.assign(n, std::vector<bool>(n, false));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        const PartitionBase &a = elems[i], &b = elems[j];
        bool r = i == j;
        r |= a.kind == PartKind::Bottom;
        r |= b.kind == PartKind::Top;
        r |= a.kind == PartKind::Cyclic && b.kind == PartKind::Cyclic &&
             a.factor % b.factor == 0;
        r |= a.kind == PartKind::Block && b.kind == PartKind::Block &&
             a.factor % b.factor == 0;
        rel[i][j] = r;
      }
    for (size_t k = 0; k < n; ++k)
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
          if (rel[i][k] && rel[k][j])
            rel[i][j] = true;
  }

  size_t indexOf(const PartitionBase &b) const {
    for (size_t i = 0; i < elems.size(); ++i)
      if (elems[i] == b)
        return i;
    return elems.size();
  }

  bool sub(const PartitionBase &a, const PartitionBase &b) const {
    return rel[indexOf(a)][indexOf(b)];
  }

  // Greatest of the common lower bounds.
  PartitionBase glb(const PartitionBase &a, const PartitionBase &b) const {
    std::vector<size_t> lower;
    for (size_t i = 0; i < elems.size(); ++i)
      if (sub(elems[i], a) && sub(elems[i], b))
        lower.push_back(i);
    for (size_t i : lower) {
      bool greatest = true;
      for (size_t j : lower)
        greatest &= rel[j][i];
      if (greatest)
        return elems[i];
    }
    return PartitionBase::bottom();
  }

  // Edges on the longest strict chain from top to bottom.
  int height() const {
    std::map<size_t, int> memo;
    std::function<int(size_t)> longest = [&](size_t i) {
      auto it = memo.find(i);
      if (it != memo.end())
        return it->second;
      int best = 0;
      for (size_t j = 0; j < elems.size(); ++j)
        if (j != i && rel[j][i])
          best = std::max(best, 1 + longest(j));
      return memo[i] = best;
    };
    return longest(indexOf(PartitionBase::top()));
  }

  std::vector<PartitionBase> elems;
  std::vector<std::vector<bool>> rel;
};

inline PartitionType randomType(std::mt19937_64 &rng,
                                const std::vector<int64_t> &shape) {
  PartitionType t = PartitionType::none(shape);
  for (size_t d = 0; d < shape.size(); ++d) {
    Closure c(shape[d]);
    t.dims[d] = c.elems[rng() % c.elems.size()];
  }
  return t;
}

struct RandomGraph {
  LayoutGraph graph;
};

// Random DAG with up to `maxNodes` nodes spread over a few functions.
inline RandomGraph randomGraph(std::mt19937_64 &rng,
                               const std::vector<int64_t> &shape,
                               int maxNodes) {
  RandomGraph out;
  LayoutGraph &g = out.graph;
  int n = 2 + static_cast<int>(rng() % (maxNodes - 1));
  int funcs = 1 + static_cast<int>(rng() % 6);
  g.func.resize(n);
  g.type.resize(n);
  g.preds.assign(n, {});
  g.succs.assign(n, {});
  for (int i = 0; i < n; ++i) {
    g.func[i] = "f" + std::to_string(rng() % funcs);
    g.type[i] = rng() % 4 == 0 ? randomType(rng, shape)
                               : PartitionType::none(shape);
  }
  int edges = static_cast<int>(rng() % (3 * n));
  std::set<std::pair<int, int>> seen;
  for (int e = 0; e < edges; ++e) {
    int a = static_cast<int>(rng() % n), b = static_cast<int>(rng() % n);
    if (a == b)
      continue;
    if (a > b)
      std::swap(a, b);
    if (!seen.insert({a, b}).second)
      continue;
    g.succs[a].push_back(b);
    g.preds[b].push_back(a);
  }
  return out;
}

// Per-dimension greatest lower bound taken from the closures.
inline PartitionType glbType(const PartitionType &a, const PartitionType &b) {
  static std::map<int64_t, Closure> cache;
  PartitionType out = a;
  for (size_t d = 0; d < a.dims.size(); ++d) {
    auto it = cache.find(a.shape[d]);
    if (it == cache.end())
      it = cache.emplace(a.shape[d], Closure(a.shape[d])).first;
    out.dims[d] = it->second.glb(a.dims[d], b.dims[d]);
  }
  return out;
}

// Full relaxation: every node whose type changed pushes its type across
// each cross-function edge until nothing changes.
inline std::vector<PartitionType> relax(const LayoutGraph &g, int start,
                                        const PartitionType &target) {
  std::vector<PartitionType> t = g.type;
  size_t n = t.size();
  std::vector<bool> changed(n, false);
  PartitionType s = glbType(target, t[start]);
  if (s != t[start]) {
    t[start] = s;
    changed[start] = true;
  }
  bool again = true;
  while (again) {
    again = false;
    for (size_t u = 0; u < n; ++u) {
      if (!changed[u])
        continue;
      std::vector<int> nb = g.preds[u];
      nb.insert(nb.end(), g.succs[u].begin(), g.succs[u].end());
      for (int v : nb) {
        if (g.func[v] == g.func[u])
          continue;
        PartitionType m = glbType(t[u], t[v]);
        if (m != t[v]) {
          t[v] = m;
          changed[v] = true;
          again = true;
        }
      }
    }
  }
  return t;
}

} // namespace oracle

#endif // MINIALLO_TEST_LATTICE_ORACLE_HPP
