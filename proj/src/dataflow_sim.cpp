/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "interp.hpp"
#include "stage_model.hpp"

#include <algorithm>

namespace miniallo {

using namespace interp;

int64_t StallReport::totalBlockedWrites() const {
  int64_t n = 0;
  for (auto &[_, s] : streams)
    n += s.blockedWrites;
  return n;
}

int64_t StallReport::totalBlockedReads() const {
  int64_t n = 0;
  for (auto &[_, s] : streams)
    n += s.blockedReads;
  return n;
}

DataflowResult runDataflow(const Module &m, const std::string &func,
                           const TensorValues &inputs,
                           const std::map<std::string, int64_t> &depths,
                           const SimConfig &cfg) {
  const Func *f = m.find(func);
  if (!f)
    throw Error("unknown function '" + func + "'");
  if (f->isTemplate())
    throw Error("cannot simulate template '" + func + "'");
  for (auto &[name, d] : depths) {
    const Memory *mem = f->findMem(name);
    if (!mem || !mem->storage.isStream())
      throw Error("depth override for '" + name + "', which is not a stream of '" +
                  func + "'");
    if (d < 1)
      throw Error("depth override for '" + name + "' must be positive");
  }
  Machine mc(m);
  mc.stepLimit = cfg.stepLimit;
  mc.boundRoot = true;
  mc.rootDepths = depths;
  auto act = mc.enter(*f, inputs);

  DataflowResult res;
  std::map<const Channel *, std::string> owner;
  for (auto &l : f->locals) {
    Buffer *b = act->mems.at(l.name).buf;
    if (!b->isStream())
      continue;
    res.report.streams[l.name].depth = b->chans.empty() ? 0 : b->chans[0].cap;
    for (auto &c : b->chans)
      owner[&c] = l.name;
  }

  size_t n = f->body.size();
  std::vector<std::unique_ptr<Cursor>> stages;
  for (size_t k = 0; k < n; ++k)
    stages.push_back(std::make_unique<Cursor>(mc, *act, k, k + 1));
  std::vector<bool> finished(n, false);
  std::vector<Undo> log;
  mc.txn = &log;

  std::map<const Channel *, std::pair<int64_t, int64_t>> blocked;
  int64_t cycle = 0;
  for (;;) {
    bool progress = false, pending = false;
    mc.now = cycle;
    for (size_t k = 0; k < n; ++k) {
      if (finished[k])
        continue;
      try {
        if (!stages[k]->step()) {
          finished[k] = true;
          continue;
        }
        progress = true;
        for (auto &u : log)
          if (u.kind == Undo::Push)
            u.ch->maxOcc =
                std::max<int64_t>(u.ch->maxOcc, u.ch->q.size());
        log.clear();
        if (stages[k]->done())
          finished[k] = true;
        else
          pending = true;
      } catch (Blocked &b) {
        pending = true;
        auto &cnt = blocked[b.ch];
        (b.write ? cnt.first : cnt.second) += 1;
      }
    }
    if (progress)
      ++cycle;
    if (!pending)
      break;
    if (!progress) {
      res.report.deadlock = true;
      break;
    }
    if (cycle > cfg.stepLimit)
      throw Error("dataflow simulation cycle limit exceeded");
  }
  mc.txn = nullptr;
  res.report.cycles = cycle;

  for (auto &l : f->locals) {
    Buffer *b = act->mems.at(l.name).buf;
    if (!b->isStream())
      continue;
    StreamStats &st = res.report.streams[l.name];
    for (auto &c : b->chans) {
      st.maxOccupancy = std::max(st.maxOccupancy, c.maxOcc);
      st.occupancy += static_cast<int64_t>(c.q.size());
      auto it = blocked.find(&c);
      if (it != blocked.end()) {
        st.blockedWrites += it->second.first;
        st.blockedReads += it->second.second;
      }
    }
  }
  if (res.report.deadlock) {
    std::string snap;
    for (auto &[name, st] : res.report.streams)
      snap += (snap.empty() ? "" : ", ") + name + ": " +
              std::to_string(st.occupancy) + "/" +
              (st.depth ? std::to_string(st.depth) : "inf");
    // Blocked nested streams are listed by channel name.
    for (auto &[ch, cnt] : blocked)
      if (!owner.count(ch) && (cnt.first || cnt.second))
        snap += (snap.empty() ? "" : ", ") + ch->name + ": blocked";
    res.report.snapshot = snap;
  }
  res.outputs = outputsOf(*f, *act);
  return res;
}

std::map<std::string, StageTiming> stageTimings(const Module &m, const Func &f,
                                                size_t stage) {
  Machine mc(m);
  mc.sourceStreams = true;
  auto act = mc.enter(f, {});
  Cursor c(mc, *act, stage, stage + 1);
  int64_t cycle = 0;
  for (;;) {
    mc.now = cycle;
    if (!c.step())
      break;
    ++cycle;
  }
  std::map<std::string, StageTiming> out;
  for (auto &l : f.locals) {
    Buffer *b = act->mems.at(l.name).buf;
    if (!b->isStream())
      continue;
    StageTiming t;
    t.steps = cycle;
    for (auto &ch : b->chans) {
      t.writes += ch.writes;
      t.reads += ch.reads;
      t.lastWrite = std::max(t.lastWrite, ch.lastWrite);
      t.lastRead = std::max(t.lastRead, ch.lastRead);
    }
    out[l.name] = t;
  }
  return out;
}

} // namespace miniallo
