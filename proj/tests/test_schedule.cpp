/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/render.hpp"
#include "miniallo/schedule.hpp"
#include "miniallo/script.hpp"
#include "miniallo/sim.hpp"
#include "miniallo/verify.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <random>

using namespace miniallo;

namespace {

void checkSame(const Module &orig, Schedule &s, int trials = 4) {
  const Module &m = s.program();
  CHECK(verify(m).empty());
  Verdict v = equivalent(orig, m, s.func, trials, 99);
  CHECK_MESSAGE(v.pass, v.message);
}

std::string errorOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.what();
  }
  return "";
}

} // namespace

TEST_CASE("loop primitives preserve gemm results") {
  Module m = testutil::loadNamed("gemm16.adl");
  SUBCASE("split") {
    Schedule s = customize(m, "gemm");
    s.split("k", 4);
    checkSame(m, s);
    Func f = s.program().get("gemm");
    CHECK(findLoop(f, "k_outer")->extent == 4);
    CHECK(findLoop(f, "k_inner")->extent == 4);
  }
  SUBCASE("reorder") {
    Schedule s = customize(m, "gemm");
    s.reorder({"k", "j"});
    checkSame(m, s);
    Func f = s.program().get("gemm");
    CHECK(f.body[0].body[0].var == "k");
  }
  SUBCASE("fuse") {
    Schedule s = customize(m, "gemm");
    s.fuse({"i", "j"});
    checkSame(m, s);
    Func f = s.program().get("gemm");
    CHECK(f.body[0].extent == 256);
  }
  SUBCASE("unroll and pipeline set attributes only") {
    Schedule s = customize(m, "gemm");
    s.unroll("k", 4);
    s.pipeline("j", 2);
    checkSame(m, s);
    Func f = s.program().get("gemm");
    CHECK(findLoop(f, "k")->attrs.unroll == 4);
    CHECK(findLoop(f, "j")->attrs.pipeline == 2);
  }
  SUBCASE("buffer_at adds load and write-back phases") {
    Schedule s = customize(m, "gemm");
    s.reorder({"k", "j"});
    std::string h = s.bufferAt("C", "i", "buf_C");
    CHECK(h == "buf_C");
    checkSame(m, s);
    Func f = s.program().get("gemm");
    const Memory *b = f.findMem("buf_C");
    REQUIRE(b);
    CHECK(b->type.shape == std::vector<int64_t>{16});
    CHECK(f.body[0].body.size() == 3);
  }
}

TEST_CASE("primitive errors name the offending input") {
  Module m = testutil::loadNamed("gemm16.adl");
  Schedule s = customize(m, "gemm");
  CHECK(errorOf([&] { s.split("k", 3); }).find("non-divisible") !=
        std::string::npos);
  CHECK(errorOf([&] { s.reorder({"q", "j"}); }) ==
        "unknown loop 'q' in function 'gemm'");
  CHECK(errorOf([&] { s.partition("A", PartKind::Cyclic, {1}, 3); })
            .find("illegal factor 3") != std::string::npos);
  CHECK(errorOf([&] { s.unroll("k", 0); }) != "");
  CHECK_THROWS_AS(customize(m, "nope"), Error);
}

TEST_CASE("a failing primitive leaves the schedule untouched") {
  Module m = testutil::loadNamed("gemm16.adl");
  Schedule s = customize(m, "gemm");
  s.split("k", 4);
  std::string before = render(s.program());
  size_t n = s.records.size();
  CHECK_THROWS_AS(s.reorder({"k_inner", "nope"}), Error);
  CHECK(s.records.size() == n);
  CHECK(render(s.program()) == before);
}

TEST_CASE("replaying the records reproduces the program") {
  Module m = testutil::loadNamed("gemm16.adl");
  Schedule s = customize(m, "gemm");
  s.reorder({"k", "j"});
  s.bufferAt("C", "i", "buf_C");
  s.pipeline("j");
  s.partition("buf_C", PartKind::Cyclic, {0}, 4);
  CHECK(render(replay(s.pristine, s.records)) == render(s.program()));
  CHECK(s.records[0].str().find("reorder") == 0);
}

TEST_CASE("unfold and relay build a 4x4 PE grid") {
  Module m = testutil::loadNamed("systolic.adl");
  ScriptResult r = runScriptFile(m, testutil::kernelPath("systolic.sch"));
  const Module &p = r.schedules.at("s").program();
  int pes = 0;
  for (auto &f : p.funcs)
    pes += f.name.rfind("kernel_", 0) == 0;
  CHECK(pes == 16);
  const Func &top = p.get("gemm");
  CHECK(top.attrs.count("dataflow"));
  const Memory *fifo = top.findMem("A_fifo");
  REQUIRE(fifo);
  CHECK(fifo->type.shape == std::vector<int64_t>{4, 5});
  CHECK(fifo->storage.kind == StorageKind::StreamArray);
  CHECK(fifo->storage.depth == 5);
  CHECK(equivalent(m, p, "gemm", 5, 3, true).pass);
}

TEST_CASE("reuse_at builds line and window buffers") {
  Module m = testutil::loadNamed("jacobi.adl");
  Schedule s = customize(m, "compute_A");
  std::string lb = s.reuseAt("A0", "i0", "lb0");
  std::string wb = s.reuseAt(lb, "j0", "wb0");
  const Func &f = s.program().get("compute_A");
  CHECK(f.findMem("lb0")->type.shape == std::vector<int64_t>{3, 32});
  CHECK(f.findMem("wb0")->type.shape == std::vector<int64_t>{3, 3});
  checkSame(m, s, 3);
}

TEST_CASE("single-offset reuse is a buffer of one") {
  Module m = loadKernel("def f(A: int32[8], B: int32[8]):\n"
                        "  for i in range(8):\n"
                        "    B[i] = A[i] + 1\n");
  Schedule s = customize(m, "f");
  s.reuseAt("A", "i", "r");
  const Memory *r = s.program().get("f").findMem("r");
  REQUIRE(r);
  CHECK(r->type.numel() == 1);
  checkSame(m, s);
}

// Random primitive sequences never change results; illegal steps are
// rejected and skipped.
TEST_CASE("random schedules preserve semantics") {
  Module m = testutil::loadNamed("gemm16.adl");
  std::mt19937_64 rng(5);
  const std::vector<std::string> names{"i", "j", "k", "k_outer", "k_inner",
                                       "j_outer", "j_inner"};
  const std::vector<int64_t> factors{2, 4, 8};
  for (int trial = 0; trial < 30; ++trial) {
    CAPTURE(trial);
    Schedule s = customize(m, "gemm");
    for (int step = 0; step < 4; ++step) {
      auto pick = [&] { return names[rng() % names.size()]; };
      try {
        switch (rng() % 6) {
        case 0:
          s.split(pick(), factors[rng() % factors.size()]);
          break;
        case 1:
          s.reorder({pick(), pick()});
          break;
        case 2:
          s.unroll(pick(), factors[rng() % factors.size()]);
          break;
        case 3:
          s.pipeline(pick());
          break;
        case 4:
          s.fuse({pick(), pick()});
          break;
        case 5:
          s.bufferAt("C", pick(), "");
          break;
        }
      } catch (const Error &) {
      }
    }
    checkSame(m, s, 2);
  }
}
