/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/composer.hpp"
#include "miniallo/hls.hpp"
#include "miniallo/render.hpp"
#include "miniallo/script.hpp"
#include "miniallo/sim.hpp"
#include "miniallo/verify.hpp"

#include "test_util.hpp"

#include <doctest.h>

using namespace miniallo;

namespace {

// The cascade with the callee's interface partitioned in source and the
// caller's intermediate left unpartitioned.
std::string mismatchedCascade() {
  std::string src = testutil::readFile(testutil::kernelPath("rp_cascade.adl"));
  const std::string sig =
      "def rp_gemm(A: float32[N, N], B: float32[N, N], C: float32[N, N]):";
  const std::string part = " @[partition=\"none,cyclic(4)\"]";
  size_t p = src.find(sig);
  REQUIRE(p != std::string::npos);
  src.replace(p, sig.size(),
              "def rp_gemm(A: float32[N, N]" + part + ", B: float32[N, N]" +
                  part + ", C: float32[N, N]" + part + "):");
  return src;
}

Conflict::Kind conflictOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const ConflictError &e) {
    return e.conflict.kind;
  }
  FAIL("no conflict raised");
  return Conflict::ComputeOnSameOp;
}

} // namespace

TEST_CASE("compose remaps records onto the named instance") {
  Module m = testutil::loadNamed("ffn.adl");
  Schedule sa = customize(m, "systolic");
  sa.bufferAt("A", "j", "buf_A");
  Schedule s = customize(m, "tiled_systolic");
  compose(s, sa);
  Schedule top = customize(m, "top");
  compose(top, s, "FFN2");
  bool onFfn2 = false, onFfn1 = false;
  for (auto &r : top.records) {
    onFfn2 |= r.kind == PrimKind::BufferAt &&
              r.func == "systolic_int16_int8_int16_8_8_64";
    onFfn1 |= r.kind == PrimKind::BufferAt &&
              r.func == "systolic_int8_int8_int16_8_8_64";
  }
  CHECK(onFfn2);
  CHECK_FALSE(onFfn1);
  CHECK(top.program().get("systolic_int16_int8_int16_8_8_64").findMem("buf_A"));
  CHECK_FALSE(
      top.program().get("systolic_int8_int8_int16_8_8_64").findMem("buf_A"));
}

TEST_CASE("compose rejects an unknown instance id") {
  Module m = testutil::loadNamed("ffn.adl");
  Schedule s = customize(m, "tiled_systolic");
  Schedule top = customize(m, "top");
  try {
    compose(top, s, "FFN3");
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(std::string(e.what()).find("unknown instance id 'FFN3'") !=
          std::string::npos);
  }
}

TEST_CASE("two loop rewrites of the same op conflict") {
  Module m = testutil::loadNamed("two_mm.adl");
  Schedule top = customize(m, "two_mm");
  top.split("gemm1:k", 2);
  Schedule sub = customize(m, "gemm1");
  sub.split("k", 4);
  size_t before = top.records.size();
  CHECK(conflictOf([&] { compose(top, sub); }) == Conflict::ComputeOnSameOp);
  CHECK(top.records.size() == before);
}

TEST_CASE("relaying one array twice conflicts") {
  Module m = loadKernel("def p(A: int32[8], C: int32[8]):\n"
                        "  for i in range(8):\n"
                        "    C[i] = A[i] + 1\n"
                        "def q(C: int32[8], D: int32[8]):\n"
                        "  for i in range(8):\n"
                        "    D[i] = C[i] * 2\n"
                        "def top(A: int32[8], D: int32[8]):\n"
                        "  C: int32[8]\n"
                        "  call p(A, C)\n"
                        "  call q(C, D)\n");
  Schedule top = customize(m, "top");
  top.relay("C", "q", -1, 0);
  Schedule sub = customize(m, "top");
  sub.relay("C", "q", -1, 4);
  CHECK(conflictOf([&] { compose(top, sub); }) == Conflict::RelayDuplicate);
}

TEST_CASE("mismatched call interface is rejected before unification") {
  Module m = loadKernel(mismatchedCascade());
  const Memory &param = m.get("rp_gemm").params[0];
  const Memory &z = *m.get("top").findMem("Z");
  CHECK_FALSE(callCompatible(param.part, z.part));
  bool flagged = false;
  for (auto &d : verify(m))
    flagged |= d.rule == "layout-mismatch";
  CHECK(flagged);
  Schedule t = customize(m, "top");
  CHECK(conflictOf([&] { build(t); }) == Conflict::LayoutContradiction);
}

TEST_CASE("unified cascade shares one kernel definition") {
  Module m = testutil::loadNamed("rp_cascade.adl");
  ScriptResult r = runScriptFile(m, testutil::kernelPath("rp_cascade.sch"));
  Schedule &t = r.schedules.at("t");
  const Module &p = t.program();
  CHECK(verify(p).empty());
  const Func &top = p.get("top");
  for (auto *n : {"X", "W_A", "W_B", "Y", "Z"})
    CHECK(top.findMem(n)->part == p.get("rp_gemm").params[0].part);
  std::string text = emitHls(p);
  CHECK(testutil::countOf(text, "void rp_gemm(") == 1);
  CHECK(equivalent(m, p, "top", 4, 1).pass);
}

TEST_CASE("unification records its changes") {
  Module m = testutil::loadNamed("call_chain.adl");
  Schedule s = customize(m, "mul");
  s.partition("C", PartKind::Bottom, {0, 1});
  Schedule top = customize(m, "top");
  compose(top, s);
  unifyInterfaces(top);
  CHECK(render(replay(top.pristine, top.records)) == render(top.program()));
  CHECK(top.program().get("add").findMem("A")->part.str() ==
        "complete,complete");
}

TEST_CASE("composed records replay to the built program") {
  Module m = testutil::loadNamed("ffn.adl");
  ScriptResult r = runScriptFile(m, testutil::kernelPath("ffn.sch"));
  Schedule &st = r.schedules.at("st");
  CHECK(r.built == "st");
  CHECK(render(replay(st.pristine, st.records)) == render(st.program()));
  std::vector<std::string> outer;
  for (auto &rec : st.records)
    if (rec.kind == PrimKind::Compose && rec.func == "top")
      outer.push_back(rec.str());
  CHECK(outer == std::vector<std::string>{
                     "compose top tiled_systolic id=FFN1",
                     "compose top tiled_systolic id=FFN2"});
}
