/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/composer.hpp"
#include "miniallo/frontend.hpp"
#include "miniallo/script.hpp"
#include "miniallo/sim.hpp"
#include "miniallo/stream_sizing.hpp"

#include "fifo_oracle.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <random>

using namespace miniallo;

namespace {

RateSpec rate(int64_t cs, int64_t iis, int64_t cd, int64_t iid, int64_t v) {
  RateSpec r;
  r.cSrc = cs;
  r.iiSrc = iis;
  r.cDst = cd;
  r.iiDst = iid;
  r.v = v;
  return r;
}

RateSpec randomRate(std::mt19937_64 &rng) {
  return rate(1 + rng() % 16, 1 + rng() % 16, 1 + rng() % 16, 1 + rng() % 16,
              1 + rng() % 256);
}

// Two stages joined by stream S: the producer pushes cs samples on the
// last of every iis steps, the consumer takes cd samples on the last of
// every iid steps.
std::string twoStage(const RateSpec &r) {
  auto n = [](int64_t v) { return std::to_string(v); };
  std::string s = "def top(A: int32[" + n(r.v) + "], B: int32[" + n(r.v) +
                  "]):\n  S: int32[" + n(r.v) + "]\n";
  s += "  for p in range(" + n(r.v / r.cSrc) + "):\n";
  s += "    for q in range(" + n(r.iiSrc) + "):\n";
  s += "      if q == " + n(r.iiSrc - 1) + ":\n";
  for (int64_t k = 0; k < r.cSrc; ++k)
    s += "        S[p * " + n(r.cSrc) + " + " + n(k) + "] = A[p * " +
         n(r.cSrc) + " + " + n(k) + "]\n";
  s += "  for c in range(" + n(r.v / r.cDst) + "):\n";
  s += "    for q in range(" + n(r.iiDst) + "):\n";
  s += "      if q == " + n(r.iiDst - 1) + ":\n";
  for (int64_t k = 0; k < r.cDst; ++k)
    s += "        B[c * " + n(r.cDst) + " + " + n(k) + "] = S[c * " +
         n(r.cDst) + " + " + n(k) + "]\n";
  return s;
}

Module streamed(const RateSpec &r) {
  Module m = loadKernel(twoStage(r));
  Func &f = m.get("top");
  f.attrs["dataflow"] = "1";
  f.findMem("S")->storage.kind = StorageKind::Stream;
  return m;
}

} // namespace

TEST_CASE("production and consumption curves") {
  CHECK(fProd(3, rate(1, 1, 1, 1, 10)) == 3);
  CHECK(fProd(5, rate(2, 1, 1, 1, 4)) == 4);
  CHECK(fProd(0, rate(2, 1, 1, 1, 4)) == 0);
  RateSpec r = rate(2, 1, 1, 1, 4);
  CHECK(fCon(2, r) == 2);
  CHECK(fProd(2, r) == 4);
  RateSpec u = rate(3, 2, 3, 2, 30);
  for (int64_t t = 0; t < 30; ++t)
    CHECK(fCon(t, u) == fProd(t, u));
}

TEST_CASE("worked depth examples") {
  CHECK(fifoDepth(rate(1, 1, 1, 1, 10)) == 1);
  CHECK(fifoDepth(rate(2, 1, 1, 1, 4)) == 3);
  CHECK(fifoDepth(rate(5, 3, 1, 7, 1)) == 2);
  CHECK(fifoDepth(rate(1, 9, 16, 1, 1)) == 1);
}

TEST_CASE("invalid rate specs are rejected") {
  CHECK_THROWS_AS(fifoDepth(rate(0, 1, 1, 1, 1)), Error);
  CHECK_THROWS_AS(fifoDepth(rate(1, 1, 1, 1, 0)), Error);
}

TEST_CASE("consumption never runs ahead of production") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    RateSpec r = randomRate(rng);
    int64_t done = doneTime(r);
    CHECK(fCon(done, r) == r.v);
    for (int64_t t = 0; t <= done; ++t)
      CHECK(fCon(t, r) <= fProd(t, r));
  }
}

TEST_CASE("depth matches the cycle simulation and is tight") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    RateSpec r = randomRate(rng);
    int64_t d = fifoDepth(r);
    CAPTURE(r.cSrc);
    CAPTURE(r.iiSrc);
    CAPTURE(r.cDst);
    CAPTURE(r.iiDst);
    CAPTURE(r.v);
    CHECK(oracle::blockedWrites(r, d) == 0);
    if (d > 1)
      CHECK(oracle::blockedWrites(r, d - 1) >= 1);
  }
}

TEST_CASE("faster production never shrinks the depth") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    RateSpec r = randomRate(rng);
    RateSpec more = r;
    more.cSrc += 1 + rng() % 4;
    CHECK(fifoDepth(more) >= fifoDepth(r));
    if (r.iiSrc > 1) {
      RateSpec quicker = r;
      quicker.iiSrc -= 1 + rng() % (r.iiSrc - 1);
      CHECK(fifoDepth(quicker) >= fifoDepth(r));
    }
  }
}

TEST_CASE("effective II propagation") {
  // C_src=4, II_src=2, C_dst=2 -> II' = 1.
  std::vector<StageEdge> e1{{0, 1, rate(4, 2, 2, 5, 8)}};
  CHECK(propagateIi({2, 5}, e1) == std::vector<int64_t>{2, 1});
  CHECK(propagateIi({3}, {}) == std::vector<int64_t>{3});
  // Producers asking for 2 and 3: the slowest wins.
  std::vector<StageEdge> e2{{0, 2, rate(1, 1, 1, 1, 4)},
                            {1, 2, rate(1, 1, 1, 1, 4)}};
  CHECK(propagateIi({2, 3, 1}, e2)[2] == 3);
  // Three-stage chain.
  std::vector<StageEdge> e3{{0, 1, rate(2, 1, 4, 1, 8)},
                            {1, 2, rate(3, 1, 1, 1, 8)}};
  auto ii = propagateIi({3, 1, 1}, e3);
  CHECK(ii == std::vector<int64_t>{3, 6, 2});
  std::vector<StageEdge> cyc{{0, 1, rate(1, 1, 1, 1, 1)},
                             {1, 0, rate(1, 1, 1, 1, 1)}};
  CHECK_THROWS_AS(propagateIi({1, 1}, cyc), Error);
}

TEST_CASE("two-stage kernels run stall-free at the computed depth") {
  int total = 0, stalled = 0, loose = 0;
  std::string first;
  for (int64_t cs = 1; cs <= 3; ++cs)
    for (int64_t iis = 1; iis <= 3; ++iis)
      for (int64_t cd = 1; cd <= 3; ++cd)
        for (int64_t iid = 1; iid <= 3; ++iid) {
          RateSpec r = rate(cs, iis, cd, iid, 2 * cs * cd);
          Module m = streamed(r);
          TensorValues in = randomInputs(m.get("top"), 1);
          int64_t d = fifoDepth(r);
          DataflowResult ok = runDataflow(m, "top", in, {{"S", d}});
          bool clean = !ok.report.deadlock &&
                       ok.report.streams.at("S").blockedWrites == 0;
          if (clean)
            CHECK(ok.outputs.at("B") == in.at("A"));
          bool tight = true;
          if (d > 1) {
            DataflowResult less = runDataflow(m, "top", in, {{"S", d - 1}});
            tight = less.report.deadlock ||
                    less.report.streams.at("S").blockedWrites >= 1;
          }
          ++total;
          stalled += !clean;
          loose += !tight;
          if ((!clean || !tight) && first.empty())
            first = "(" + std::to_string(cs) + "," + std::to_string(iis) +
                    "," + std::to_string(cd) + "," + std::to_string(iid) +
                    "," + std::to_string(r.v) + ") depth " + std::to_string(d);
        }
  CAPTURE(first);
  CHECK_MESSAGE(stalled == 0, stalled << " of " << total
                                      << " kernels stall at the depth");
  CHECK_MESSAGE(loose == 0, loose << " of " << total
                                  << " kernels run clean one slot shallower");
}

TEST_CASE("dataflow cycles never grow with a deeper FIFO") {
  Module m = streamed(rate(3, 1, 1, 2, 12));
  TensorValues in = randomInputs(m.get("top"), 2);
  int64_t last = INT64_MAX;
  // Below the burst size of three the producer can never write.
  for (int64_t d = 3; d <= 14; ++d) {
    DataflowResult r = runDataflow(m, "top", in, {{"S", d}});
    CHECK_FALSE(r.report.deadlock);
    CHECK(r.report.cycles <= last);
    last = r.report.cycles;
  }
}

TEST_CASE("module streams are sized from stage rates") {
  Module m = testutil::loadNamed("two_mm.adl");
  ScriptResult r = runScriptFile(m, testutil::kernelPath("two_mm_fixed.sch"));
  REQUIRE(r.edges.size() == 1);
  const StreamEdge &e = r.edges[0];
  CHECK(e.func == "two_mm");
  CHECK(e.memory == "C");
  CHECK(e.sized);
  CHECK(e.rate.v == 64);
  CHECK(e.depth == fifoDepth(e.rate));
  const Module &p = r.schedules.at("s").program();
  CHECK(p.get("two_mm").findMem("C")->storage.depth == e.depth);
}
