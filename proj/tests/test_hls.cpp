/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/frontend.hpp"
#include "miniallo/hls.hpp"
#include "miniallo/script.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <map>
#include <regex>
#include <sstream>

using namespace miniallo;

namespace {

std::string emitScripted(const std::string &adl, const std::string &sch) {
  Module m = testutil::loadNamed(adl);
  ScriptResult r = runScriptFile(m, testutil::kernelPath(sch));
  Schedule &s = r.schedules.at(r.built);
  return emitHls(s.program(), scheduleHash(s.records));
}

struct ArrayPragma {
  std::string var, kind;
  int factor = 0, dim = 0;
};

std::vector<ArrayPragma> arrayPragmas(const std::string &text) {
  static const std::regex re(
      R"(#pragma HLS array_partition variable=(\w+) (\w+)(?: factor=(\d+))? dim=(\d+))");
  std::vector<ArrayPragma> out;
  for (std::sregex_iterator it(text.begin(), text.end(), re), end; it != end;
       ++it) {
    ArrayPragma p;
    p.var = (*it)[1];
    p.kind = (*it)[2];
    p.factor = (*it)[3].matched ? std::stoi((*it)[3]) : 0;
    p.dim = std::stoi((*it)[4]);
    out.push_back(p);
  }
  return out;
}

} // namespace

TEST_CASE("emitted designs match the goldens") {
  CHECK(emitScripted("systolic.adl", "systolic.sch") ==
        testutil::readFile(testutil::goldenPath("systolic.cpp")));
  CHECK(emitScripted("gemm16.adl", "gemm16_rowwise.sch") ==
        testutil::readFile(testutil::goldenPath("gemm16_rowwise.cpp")));
  CHECK(emitHls(testutil::loadNamed("gemm16.adl")) ==
        testutil::readFile(testutil::goldenPath("gemm16.cpp")));
}

TEST_CASE("emission is byte-stable") {
  CHECK(emitScripted("systolic.adl", "systolic.sch") ==
        emitScripted("systolic.adl", "systolic.sch"));
}

TEST_CASE("an unscheduled kernel carries no pragmas") {
  CHECK(emitHls(testutil::loadNamed("gemm16.adl")).find("#pragma") ==
        std::string::npos);
}

TEST_CASE("partition pragmas use one-based dimensions") {
  Module m = testutil::loadNamed("gemm1024.adl");
  ScriptResult r =
      runScriptFile(m, testutil::kernelPath("gemm1024_rowwise.sch"));
  Schedule &s = r.schedules.at("s");
  const Func &f = s.program().get("gemm");
  auto ps = arrayPragmas(emitHls(s.program()));
  REQUIRE(ps.size() == 3);
  for (auto &p : ps) {
    CAPTURE(p.var);
    const Memory *mem = f.findMem(p.var);
    REQUIRE(mem);
    REQUIRE(p.dim >= 1);
    REQUIRE(p.dim <= int(mem->part.dims.size()));
    const PartitionBase &d = mem->part.dims[p.dim - 1];
    CHECK(d.kind == PartKind::Cyclic);
    CHECK(p.kind == "cyclic");
    CHECK(p.factor == d.factor);
    for (size_t k = 0; k < mem->part.dims.size(); ++k)
      if (int(k) != p.dim - 1)
        CHECK(mem->part.dims[k].kind == PartKind::Top);
  }
}

TEST_CASE("every stream gets exactly one depth pragma") {
  std::string text = emitScripted("systolic.adl", "systolic.sch");
  CHECK(testutil::countOf(text, "void kernel_") == 16);
  // Each PE and the top declare both FIFO arrays.
  CHECK(testutil::countOf(text, "#pragma HLS stream variable=A_fifo depth=5") ==
        17);
  std::istringstream in(text);
  std::string line, fn;
  std::map<std::string, int> perFunc;
  while (std::getline(in, line)) {
    if (line.rfind("void ", 0) == 0)
      fn = line;
    if (line.find("#pragma HLS stream variable=A_fifo") != std::string::npos)
      ++perFunc[fn];
  }
  for (auto &[f, n] : perFunc) {
    CAPTURE(f);
    CHECK(n == 1);
  }
  CHECK(text.find("hls::stream< int8_t > A_fifo[4][5]") != std::string::npos);
}

TEST_CASE("a stream without a depth cannot be emitted") {
  Module m = loadKernel("def f(A: int32[4], B: int32[4]):\n"
                        "  S: int32[4]\n"
                        "  for i in range(4):\n"
                        "    S[i] = A[i]\n"
                        "  for j in range(4):\n"
                        "    B[j] = S[j]\n");
  m.get("f").findMem("S")->storage.kind = StorageKind::Stream;
  m.get("f").findMem("S")->storage.depth = 0;
  CHECK_THROWS_AS(emitHls(m), Error);
  m.get("f").findMem("S")->storage.depth = 4;
  CHECK(emitHls(m).find("#pragma HLS stream variable=S depth=4") !=
        std::string::npos);
}

TEST_CASE("element types are spelled for HLS") {
  CHECK(hlsType(ElemType::intTy(8)) == "int8_t");
  CHECK(hlsType(ElemType::intTy(32)) == "int32_t");
  CHECK(hlsType(ElemType::intTy(5)) == "ap_int<5>");
  CHECK(hlsType(ElemType::fixedTy(8, 4)) == "ap_fixed<8, 4>");
  CHECK(hlsType(*parseElemType("float32")) == "float");
  CHECK(hlsType(*parseElemType("float64")) == "double");
}

TEST_CASE("schedule hashes depend on the records") {
  Module m = testutil::loadNamed("gemm16.adl");
  Schedule a = customize(m, "gemm");
  a.pipeline("k");
  Schedule b = customize(m, "gemm");
  b.pipeline("k", 2);
  CHECK(scheduleHash(a.records).size() == 16);
  CHECK(scheduleHash(a.records) != scheduleHash(b.records));
  CHECK(scheduleHash(a.records) == scheduleHash(a.records));
}
