/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/cli.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace miniallo;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "miniallo");
  std::vector<const char *> argv;
  for (auto &a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = runCli(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string k(const std::string &name) { return testutil::kernelPath(name); }

std::string scratch(const std::string &name, const std::string &text) {
  auto p = std::filesystem::temp_directory_path() / ("miniallo_cli_" + name);
  std::ofstream(p) << text;
  return p.string();
}

bool oneLine(const std::string &s) {
  return !s.empty() && s.find('\n') == s.size() - 1;
}

} // namespace

TEST_CASE("build writes HLS to stdout") {
  Outcome o = cli({"build", k("systolic.adl"), "--schedule", k("systolic.sch")});
  CHECK(o.code == 0);
  CHECK(o.err.empty());
  CHECK(o.out == testutil::readFile(testutil::goldenPath("systolic.cpp")));
}

TEST_CASE("build can emit the IR") {
  Outcome o = cli({"build", k("gemm16.adl"), "--emit", "ir"});
  CHECK(o.code == 0);
  CHECK(o.out.find("def gemm") != std::string::npos);
}

TEST_CASE("check accepts the fixed schedule and rejects the buggy one") {
  Outcome good =
      cli({"check", k("two_mm.adl"), "--schedule", k("two_mm_fixed.sch")});
  CHECK(good.code == 0);
  CHECK(good.out.find("check: pass") == 0);
  Outcome bad =
      cli({"check", k("two_mm.adl"), "--schedule", k("two_mm_buggy.sch")});
  CHECK(bad.code == 1);
  CHECK(oneLine(bad.err));
  CHECK(bad.err.find("stream-order-violation") != std::string::npos);
}

TEST_CASE("source errors are one line with a location") {
  std::string path = scratch("bad.adl", "def f(A: int32[4]):\n"
                                        "  for i in range(4):\n"
                                        "    A[i] = 1.5\n");
  Outcome o = cli({"build", path});
  CHECK(o.code == 1);
  CHECK(oneLine(o.err));
  CHECK(std::regex_search(o.err, std::regex(R"(bad\.adl:3:\d+: error: )")));
}

TEST_CASE("schedule errors point into the script") {
  std::string path =
      scratch("bad.sch", "customize gemm as s\ns.split q 4\nbuild s\n");
  Outcome o = cli({"build", k("gemm16.adl"), "--schedule", path});
  CHECK(o.code == 1);
  CHECK(oneLine(o.err));
  CHECK(o.err.find("bad.sch:2:") != std::string::npos);
  CHECK(o.err.find("unknown loop 'q'") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  Outcome o = cli({"build"});
  CHECK(o.code == 1);
  CHECK(oneLine(o.err));
  CHECK(cli({"check", k("gemm16.adl"), "--trials", "0"}).code == 1);
  CHECK(cli({"build", k("gemm16.adl"), "--emit", "vhdl"}).code == 1);
  CHECK(cli({"build", "/nonexistent/x.adl"}).code == 1);
}

TEST_CASE("help and version succeed") {
  CHECK(cli({"--help"}).code == 0);
  Outcome v = cli({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out == "0.1.0\n");
}

TEST_CASE("simulation is reproducible from the seed") {
  auto run = [](const std::string &seed) {
    return cli({"sim", k("gemm16.adl"), "--seed", seed}).out;
  };
  CHECK(run("4") == run("4"));
  CHECK(run("4") != run("5"));
  CHECK(run("4").find("tensor C int32 16x16") != std::string::npos);
}

TEST_CASE("simulation reads given inputs") {
  std::string text = "tensor A int32 16x16\n";
  for (int i = 0; i < 256; ++i)
    text += (i / 16 == i % 16) ? "1 " : "0 ";
  text += "\ntensor C int32 16x16\n";
  for (int i = 0; i < 256; ++i)
    text += "0 ";
  text += "\n";
  std::string in = scratch("in.txt", text);
  Outcome a = cli({"sim", k("gemm16.adl"), "--input", in, "--seed", "3"});
  REQUIRE(a.code == 0);
  // With A = I the result is B.
  size_t b = a.out.find("tensor B");
  size_t c = a.out.find("tensor C");
  REQUIRE(b != std::string::npos);
  REQUIRE(c != std::string::npos);
  std::string bBody = a.out.substr(a.out.find('\n', b) + 1);
  std::string cBody = a.out.substr(a.out.find('\n', c) + 1);
  bBody = bBody.substr(0, bBody.find("tensor"));
  CHECK(cBody.substr(0, bBody.size()) == bBody);
  std::string wrong = scratch("wrong.txt", "tensor A int8 2\n1 2\n");
  CHECK(cli({"sim", k("gemm16.adl"), "--input", wrong}).code == 1);
}

TEST_CASE("dataflow simulation reports stream statistics") {
  Outcome o = cli({"sim", k("systolic.adl"), "--schedule", k("systolic.sch"),
                   "--dataflow"});
  CHECK(o.code == 0);
  CHECK(o.out.find("# cycles ") != std::string::npos);
  CHECK(o.out.find("# stream A_fifo depth=5") != std::string::npos);
}

TEST_CASE("report prints loops, streams and layouts") {
  Outcome o = cli({"report", k("two_mm.adl"), "--schedule",
                   k("two_mm_fixed.sch")});
  CHECK(o.code == 0);
  CHECK(o.out.find("layout ") != std::string::npos);
  Outcome p = cli({"report", k("gemm1024.adl"), "--schedule",
                   k("gemm1024_vanilla.sch"), "--perf"});
  CHECK(p.code == 0);
  CHECK(p.out.find("7516192781") != std::string::npos);
}
