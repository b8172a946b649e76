/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

//===----------------------------------------------------------------------===//
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any fails.
//===----------------------------------------------------------------------===//

#include "miniallo/cli.hpp"
#include "miniallo/composer.hpp"
#include "miniallo/dfg.hpp"
#include "miniallo/frontend.hpp"
#include "miniallo/hls.hpp"
#include "miniallo/perf.hpp"
#include "miniallo/render.hpp"
#include "miniallo/script.hpp"
#include "miniallo/sim.hpp"
#include "miniallo/stream_sizing.hpp"

#include "fifo_oracle.hpp"
#include "lattice_oracle.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace miniallo;

namespace {

// Pinned tolerances.
constexpr double kLatticeSeconds = 1.0;
constexpr double kGemmSpeedup = 223.0;
constexpr double kSpeedupTolerance = 0.10;
constexpr double kStencilRelTolerance = 1e-5;
constexpr int kRandomDags = 200;
constexpr int kMaxDagNodes = 200;
constexpr int kRateSpecs = 1000;

struct Failure {
  std::string why;
};

void require(bool ok, const std::string &why) {
  if (!ok)
    throw Failure{why};
}

std::string kernel(const std::string &n) {
  return std::string(MINIALLO_KERNEL_DIR) + "/" + n;
}

std::string readFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Module load(const std::string &n) { return loadKernelFile(kernel(n)); }

size_t countOf(const std::string &text, const std::string &needle) {
  size_t n = 0;
  for (size_t p = text.find(needle); p != std::string::npos;
       p = text.find(needle, p + needle.size()))
    ++n;
  return n;
}

int64_t wrap(int64_t v, int w) {
  uint64_t mask = (uint64_t(1) << w) - 1;
  uint64_t u = uint64_t(v) & mask;
  return (u >> (w - 1)) ? int64_t(u) - int64_t(uint64_t(1) << w)
                        : int64_t(u);
}

int64_t at(const TensorValue &t, size_t k) { return int64_t(t.raw[k]); }

// C_out = wrap_w(C_in + A x B) for row-major integer tensors.
std::vector<int64_t> matmul(const TensorValue &a, const TensorValue &b,
                            const TensorValue *c, int64_t m, int64_t n,
                            int64_t k, int w) {
  std::vector<int64_t> out(m * n);
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j) {
      int64_t s = c ? at(*c, i * n + j) : 0;
      for (int64_t q = 0; q < k; ++q)
        s += at(a, i * k + q) * at(b, q * n + j);
      out[i * n + j] = wrap(s, w);
    }
  return out;
}

std::vector<int64_t> ints(const TensorValue &t) {
  std::vector<int64_t> v;
  for (size_t k = 0; k < t.size(); ++k)
    v.push_back(at(t, k));
  return v;
}

//===----------------------------------------------------------------------===//
// Criteria
//===----------------------------------------------------------------------===//

void latticeCriterion() {
  auto t0 = std::chrono::steady_clock::now();
  const int64_t extent = 8;
  std::vector<PartitionBase> elems = latticeElements(extent);
  require(elems.size() == 6,
          "lattice has " + std::to_string(elems.size()) + " elements");
  oracle::Closure c(extent);
  require(c.elems.size() == 6, "closure size");
  int pairs = 0;
  for (auto &a : elems)
    for (auto &b : elems) {
      ++pairs;
      require(subtypeBase(a, b, extent) == c.sub(a, b),
              "subtype " + a.str() + " <: " + b.str());
      PartitionBase m = meetBase(a, b, extent);
      require(m == c.glb(a, b), "meet " + a.str() + " /\\ " + b.str());
      // GLB by brute force: a lower bound that every lower bound is below.
      require(c.sub(m, a) && c.sub(m, b), "meet is not a lower bound");
      for (auto &l : c.elems)
        if (c.sub(l, a) && c.sub(l, b))
          require(c.sub(l, m), "meet is not greatest");
    }
  require(pairs == 36, "pair count");
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  require(secs < kLatticeSeconds, "took " + std::to_string(secs) + " s");
}

void propagationCriterion() {
  Module m = load("call_chain.adl");
  PartitionType bot = PartitionType::none({8, 8});
  bot.dims = {PartitionBase::bottom(), PartitionBase::bottom()};
  propagateLayout(m, "top", "C", bot);
  for (auto &f : m.funcs)
    for (auto *mems : {&f.params, &f.locals})
      for (auto &mem : *mems) {
        std::string label = f.name + ":" + mem.name;
        bool hit = label == "top:C" || label == "mul:C" || label == "add:A";
        require(mem.part == (hit ? bot : PartitionType::none(mem.type.shape)),
                label + " is " + mem.part.str());
      }

  std::mt19937_64 rng(6);
  std::vector<int64_t> shape{8};
  int depth = oracle::Closure(8).height();
  for (int trial = 0; trial < kRandomDags; ++trial) {
    oracle::RandomGraph rg = oracle::randomGraph(rng, shape, kMaxDagNodes);
    const LayoutGraph &g = rg.graph;
    int n = int(g.type.size());
    int start = int(rng() % n);
    PartitionType target = oracle::randomType(rng, shape);
    PropagateResult r = propagate(g, start, target);
    require(r.updates <= n * depth,
            "trial " + std::to_string(trial) + ": " +
                std::to_string(r.updates) + " updates");
    require(r.types == oracle::relax(g, start, target),
            "trial " + std::to_string(trial) + ": fixed point differs");
  }
}

void interfaceCriterion() {
  std::string src = readFile(kernel("rp_cascade.adl"));
  const std::string sig =
      "def rp_gemm(A: float32[N, N], B: float32[N, N], C: float32[N, N]):";
  const std::string part = " @[partition=\"none,cyclic(4)\"]";
  size_t p = src.find(sig);
  require(p != std::string::npos, "cascade signature not found");
  src.replace(p, sig.size(),
              "def rp_gemm(A: float32[N, N]" + part + ", B: float32[N, N]" +
                  part + ", C: float32[N, N]" + part + "):");
  Module bad = loadKernel(src);
  require(!callCompatible(bad.get("rp_gemm").params[0].part,
                          bad.get("top").findMem("Z")->part),
          "callCompatible accepted the mismatch");
  Schedule t = customize(bad, "top");
  bool rejected = false;
  try {
    build(t);
  } catch (const ConflictError &e) {
    rejected = e.conflict.kind == Conflict::LayoutContradiction;
  }
  require(rejected, "build did not report a layout contradiction");

  Module m = load("rp_cascade.adl");
  ScriptResult r = runScriptFile(m, kernel("rp_cascade.sch"));
  const Module &built = r.schedules.at(r.built).program();
  std::string text = emitHls(built);
  for (auto &f : built.funcs) {
    if (f.isTemplate())
      continue;
    require(countOf(text, "void " + f.name + "(") == 1,
            "function " + f.name + " not emitted exactly once");
  }
  require(countOf(text, "void rp_gemm(") == 1, "rp_gemm duplicated");
}

void gemmCriterion() {
  Module m = load("gemm16.adl");
  ScriptResult r = runScriptFile(m, kernel("gemm16_rowwise.sch"));
  Verdict v = equivalent(m, r.schedules.at("s").program(), "gemm", 20, 41);
  require(v.pass && v.trials == 20, "schedule differs: " + v.message);

  auto report = [](const std::string &sch) {
    Module big = load("gemm1024.adl");
    ScriptResult s = runScriptFile(big, kernel(sch));
    return latency(s.schedules.at("s").program(), "gemm");
  };
  PerfReport vanilla = report("gemm1024_vanilla.sch");
  PerfReport rowwise = report("gemm1024_rowwise.sch");
  bool sawK = false;
  for (auto &l : vanilla.loops)
    if (l.label == "L2_k") {
      sawK = true;
      require(l.achievedIi == 7,
              "vanilla II " + std::to_string(l.achievedIi));
    }
  require(sawK, "vanilla k loop missing");
  bool sawPipe = false;
  for (auto &l : rowwise.loops)
    if (l.pipelined) {
      sawPipe = true;
      require(l.achievedIi == 1,
              "row-wise II " + std::to_string(l.achievedIi));
    }
  require(sawPipe, "row-wise has no pipelined loop");
  double speedup = double(vanilla.cycles) / double(rowwise.cycles);
  require(std::fabs(speedup - kGemmSpeedup) <= kGemmSpeedup * kSpeedupTolerance,
          "speedup " + std::to_string(speedup));
}

void systolicCriterion() {
  Module m = load("systolic.adl");
  ScriptResult r = runScriptFile(m, kernel("systolic.sch"));
  Schedule &s = r.schedules.at("s");
  const Module &p = s.program();
  const Func &f = m.get("gemm");
  for (uint64_t seed = 0; seed < 20; ++seed) {
    TensorValues in = randomInputs(f, 1000 + seed);
    DataflowResult d = runDataflow(p, "gemm", in);
    require(!d.report.deadlock, "deadlock: " + d.report.snapshot);
    auto want = matmul(in.at("A"), in.at("B"), &in.at("C"), 4, 4, 4, 16);
    require(ints(d.outputs.at("C")) == want,
            "mismatch on input " + std::to_string(seed));
  }
  int pes = 0;
  for (auto &fn : p.funcs)
    pes += fn.name.rfind("kernel_", 0) == 0;
  require(pes == 16, std::to_string(pes) + " PE functions");
  for (auto *name : {"A_fifo", "B_fifo"}) {
    const Memory *fifo = p.get("gemm").findMem(name);
    require(fifo && fifo->type.shape == std::vector<int64_t>{4, 5},
            std::string(name) + " shape");
  }
  std::string text = emitHls(p, scheduleHash(s.records));
  require(countOf(text, "#pragma HLS stream variable=A_fifo depth=5") == 17 &&
              countOf(text, "#pragma HLS stream variable=B_fifo depth=5") ==
                  17,
          "stream depth pragmas");
  require(text == readFile(std::string(MINIALLO_GOLDEN_DIR) + "/systolic.cpp"),
          "HLS differs from the golden");
}

void fifoCriterion() {
  std::mt19937_64 rng(66);
  for (int trial = 0; trial < kRateSpecs; ++trial) {
    RateSpec r;
    r.cSrc = 1 + rng() % 16;
    r.iiSrc = 1 + rng() % 16;
    r.cDst = 1 + rng() % 16;
    r.iiDst = 1 + rng() % 16;
    r.v = 1 + rng() % 256;
    int64_t want = oracle::minStallFreeDepth(r);
    require(fifoDepth(r) == want,
            "rate (" + std::to_string(r.cSrc) + "," + std::to_string(r.iiSrc) +
                "," + std::to_string(r.cDst) + "," + std::to_string(r.iiDst) +
                "," + std::to_string(r.v) + "): " +
                std::to_string(fifoDepth(r)) + " vs " + std::to_string(want));
  }
  RateSpec worked;
  worked.cSrc = 2;
  worked.v = 4;
  require(fifoDepth(worked) == 3, "worked example");

  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int64_t> ii{int64_t(1 + rng() % 8), int64_t(1 + rng() % 8),
                            int64_t(1 + rng() % 8)};
    std::vector<StageEdge> edges;
    for (int e = 0; e < 2; ++e) {
      StageEdge s;
      s.src = e;
      s.dst = e + 1;
      s.rate.cSrc = 1 + rng() % 8;
      s.rate.cDst = 1 + rng() % 8;
      s.rate.v = 64;
      edges.push_back(s);
    }
    std::vector<int64_t> want = ii;
    for (auto &e : edges)
      want[e.dst] = (want[e.src] * e.rate.cDst + e.rate.cSrc - 1) / e.rate.cSrc;
    require(propagateIi(ii, edges) == want, "chain II propagation");
  }
  StageEdge a{0, 2, {}}, b{1, 2, {}};
  a.rate.cSrc = 2;
  b.rate.cDst = 3;
  require(propagateIi({4, 2, 1}, {a, b})[2] == 6, "max over producers");
}

void cascadeCriterion() {
  Module m = load("ffn.adl");
  ScriptResult r = runScriptFile(m, kernel("ffn.sch"));
  Schedule &st = r.schedules.at("st");
  const Module &p = st.program();
  require(p.find("tiled_systolic_FFN1") && p.find("tiled_systolic_FFN2"),
          "instance ids missing");
  const Memory *z = p.get("top").findMem("Z");
  require(z && z->storage.isStream() && z->storage.depth > 0,
          "Z is not a sized stream");
  bool sizedZ = false;
  for (auto &e : r.edges)
    sizedZ |= e.memory == "Z" && e.sized && e.depth == z->storage.depth;
  require(sizedZ, "Z depth was not computed");
  for (uint64_t seed = 0; seed < 3; ++seed) {
    TensorValues in = randomInputs(m.get("top"), 500 + seed);
    DataflowResult d = runDataflow(p, "top", in);
    require(!d.report.deadlock, "deadlock: " + d.report.snapshot);
    TensorValue zt = TensorValue::zeros(z->type);
    auto zv = matmul(in.at("X"), in.at("W_A"), nullptr, 32, 64, 64, 16);
    for (size_t k = 0; k < zv.size(); ++k)
      zt.raw[k] = zv[k];
    auto want = matmul(zt, in.at("W_B"), nullptr, 32, 32, 64, 16);
    require(ints(d.outputs.at("Y")) == want,
            "mismatch on input " + std::to_string(seed));
  }
  require(render(replay(st.pristine, st.records)) == render(p),
          "replay differs from the built program");
}

void stencilCriterion() {
  Module m = load("jacobi.adl");
  ScriptResult r = runScriptFile(m, kernel("jacobi.sch"));
  const Module &p = r.schedules.at("sch").program();
  const Memory *wb = p.get("compute_A").findMem("wb0");
  require(wb && wb->type.shape == std::vector<int64_t>{3, 3}, "window shape");
  const int n = 32;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    TensorValues in = randomInputs(m.get("kernel_jacobi_2d"), 70 + seed);
    std::vector<float> a(n * n), b(n * n);
    for (int k = 0; k < n * n; ++k) {
      a[k] = float(in.at("A").fl[k]);
      b[k] = float(in.at("B").fl[k]);
    }
    auto sweep = [&](const std::vector<float> &src, std::vector<float> &dst,
                     int off) {
      for (int i = 0; i < n - 2; ++i)
        for (int j = 0; j < n - 2; ++j) {
          float s = src[i * n + j + 1] + src[(i + 1) * n + j];
          s = s + src[(i + 1) * n + j + 1];
          s = s + src[(i + 1) * n + j + 2];
          s = s + src[(i + 2) * n + j + 1];
          dst[(i + off) * n + j + off] = 0.2f * s;
        }
    };
    for (int t = 0; t < 2; ++t) {
      sweep(a, b, 0);
      sweep(b, a, 1);
    }
    TensorValues out = run(p, "kernel_jacobi_2d", in);
    for (auto &[name, want] :
         std::vector<std::pair<std::string, std::vector<float> *>>{{"A", &a},
                                                                   {"B", &b}})
      for (int k = 0; k < n * n; ++k) {
        double got = out.at(name).fl[k], w = (*want)[k];
        require(std::fabs(got - w) <=
                    kStencilRelTolerance * std::max(1.0, std::fabs(w)),
                name + "[" + std::to_string(k) + "] on input " +
                    std::to_string(seed));
      }
  }
}

void checkCriterion() {
  auto check = [](const std::string &sch) {
    std::string k = kernel("two_mm.adl"), s = kernel(sch);
    const char *argv[] = {"miniallo", "check", k.c_str(), "--schedule",
                          s.c_str()};
    std::ostringstream out, err;
    int code = runCli(5, argv, out, err);
    return std::make_pair(code, err.str());
  };
  auto buggy = check("two_mm_buggy.sch");
  require(buggy.first != 0, "buggy schedule passed check");
  auto fixed = check("two_mm_fixed.sch");
  require(fixed.first == 0, "fixed schedule failed: " + fixed.second);
}

} // namespace

int main() {
  struct Criterion {
    const char *name;
    std::function<void()> run;
  };
  const std::vector<Criterion> all{
      {"partition lattice meet and subtyping", latticeCriterion},
      {"layout propagation", propagationCriterion},
      {"interface unification", interfaceCriterion},
      {"row-wise gemm", gemmCriterion},
      {"4x4 systolic array", systolicCriterion},
      {"FIFO sizing", fifoCriterion},
      {"two-layer cascade", cascadeCriterion},
      {"jacobi line and window buffers", stencilCriterion},
      {"check rejects the buggy schedule", checkCriterion},
  };
  int failed = 0;
  for (size_t i = 0; i < all.size(); ++i) {
    std::string why;
    try {
      all[i].run();
    } catch (const Failure &f) {
      why = f.why;
    } catch (const std::exception &e) {
      why = std::string("exception: ") + e.what();
    }
    std::cout << (why.empty() ? "PASS" : "FAIL") << " criterion " << i + 1
              << ": " << all[i].name << (why.empty() ? "" : ": " + why)
              << "\n";
    failed += !why.empty();
  }
  return failed ? 1 : 0;
}
