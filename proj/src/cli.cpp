/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/cli.hpp"
#include "miniallo/frontend.hpp"
#include "miniallo/hls.hpp"
#include "miniallo/perf.hpp"
#include "miniallo/render.hpp"
#include "miniallo/script.hpp"
#include "miniallo/tensor_io.hpp"

#include <CLI11.hpp>

#include <fstream>

namespace miniallo {

namespace {

struct Design {
  Module original;
  Module built;
  std::string func;
  std::string hash;
  std::vector<StreamEdge> edges;
};

// Loads the kernel, runs the schedule script and builds the last built (or
// last defined) schedule.
Design load(const std::string &kernel, const std::string &schedule,
            const std::string &func) {
  Design d;
  d.original = loadKernelFile(kernel);
  d.built = d.original;
  if (!schedule.empty()) {
    ScriptResult r = runScriptFile(d.original, schedule);
    std::string name = r.built;
    if (name.empty() && !r.order.empty()) {
      name = r.order.back();
      try {
        build(r.schedules.at(name), &r.edges);
      } catch (Error &e) {
        e.setFile(schedule);
        throw;
      }
    }
    if (!name.empty()) {
      Schedule &s = r.schedules.at(name);
      d.built = s.program();
      d.func = s.func;
      d.hash = scheduleHash(s.records);
      d.edges = r.edges;
    }
  }
  if (!func.empty())
    d.func = func;
  if (d.func.empty())
    d.func = d.original.top;
  if (d.func.empty()) {
    for (auto &f : d.original.funcs)
      if (!f.isTemplate())
        d.func = f.name;
  }
  if (d.func.empty())
    throw Error("no function to run", {}, kernel);
  if (!d.built.find(d.func))
    throw Error("unknown function '" + d.func + "'", {}, kernel);
  return d;
}

void writeOut(const std::string &path, const std::string &text,
              std::ostream &out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f)
    throw Error("cannot write '" + path + "'", {}, path);
  f << text;
}

std::string fifoReport(const std::vector<StreamEdge> &edges) {
  std::string s;
  for (auto &e : edges)
    s += "fifo " + e.func + ":" + e.memory + " V=" + std::to_string(e.rate.v) +
         " src=" + std::to_string(e.rate.cSrc) + "/" +
         std::to_string(e.rate.iiSrc) + " dst=" +
         std::to_string(e.rate.cDst) + "/" + std::to_string(e.rate.iiDst) +
         " depth=" + std::to_string(e.depth) +
         (e.sized ? " (computed)" : " (given)") + "\n";
  if (edges.empty())
    s += "fifo: no streams\n";
  return s;
}

std::string layoutReport(const Module &m) {
  std::string s;
  for (auto &f : m.funcs) {
    if (f.isTemplate())
      continue;
    auto line = [&](const Memory &mem) {
      if (mem.part.isNone() && !mem.storage.isStream())
        return;
      s += "layout " + f.name + ":" + mem.name + " " + mem.part.str();
      if (mem.storage.isStream())
        s += " " + storageStr(mem.storage);
      s += "\n";
    };
    for (auto &p : f.params)
      line(p);
    for (auto &l : f.locals)
      line(l);
  }
  if (s.empty())
    s = "layout: all memories unpartitioned\n";
  return s;
}

std::string stallReport(const StallReport &r) {
  std::string s = "# cycles " + std::to_string(r.cycles) + "\n";
  for (auto &[name, st] : r.streams)
    s += "# stream " + name + " depth=" +
         (st.depth ? std::to_string(st.depth) : std::string("inf")) +
         " max=" + std::to_string(st.maxOccupancy) +
         " blocked_writes=" + std::to_string(st.blockedWrites) +
         " blocked_reads=" + std::to_string(st.blockedReads) + "\n";
  return s;
}

} // namespace

int runCli(int argc, const char *const *argv, std::ostream &out,
           std::ostream &err) {
  CLI::App app{"mini-allo accelerator design compiler", "miniallo"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string kernel, schedule, func, emit = "hls", output, input;
  uint64_t seed = 1;
  int trials = 20;
  bool dataflow = false, perf = false, fifo = false, layout = false;

  auto common = [&](CLI::App *c) {
    c->add_option("kernel", kernel, "Kernel source (.adl)")->required();
    c->add_option("--schedule", schedule, "Schedule script (.sch)");
    c->add_option("--func", func, "Function to run");
  };
  CLI::App *cb = app.add_subcommand("build", "Build and emit a design");
  common(cb);
  cb->add_option("--emit", emit, "Output form")
      ->check(CLI::IsMember({"hls", "ir"}));
  cb->add_option("-o", output, "Output file");
  CLI::App *cs = app.add_subcommand("sim", "Simulate a design");
  common(cs);
  cs->add_option("--input", input, "Input tensors");
  cs->add_option("--seed", seed, "Seed for inputs not given");
  cs->add_flag("--dataflow", dataflow, "Cycle-level dataflow simulation");
  cs->add_option("-o", output, "Output file");
  CLI::App *cc = app.add_subcommand("check", "Compare against the kernel");
  common(cc);
  cc->add_option("--trials", trials, "Random trials")
      ->check(CLI::PositiveNumber);
  cc->add_option("--seed", seed, "Seed");
  CLI::App *cr = app.add_subcommand("report", "Performance and layout");
  common(cr);
  cr->add_flag("--perf", perf, "Loop IIs and cycles");
  cr->add_flag("--fifo", fifo, "Stream rates and depths");
  cr->add_flag("--layout", layout, "Memory partitions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion &) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError &e) {
    std::string msg = e.what();
    for (auto &c : msg)
      if (c == '\n')
        c = ' ';
    err << "miniallo: error: " << msg << "\n";
    return 1;
  }

  try {
    Design d = load(kernel, schedule, func);
    if (cb->parsed()) {
      std::string text = emit == "ir" ? render(d.built)
                                      : emitHls(d.built, d.hash);
      writeOut(output, text, out);
    } else if (cs->parsed()) {
      const Func &f = d.built.get(d.func);
      TensorValues in = randomInputs(f, seed);
      if (!input.empty()) {
        TensorValues given = readTensorFile(input);
        checkInputs(f, given);
        for (auto &[n, v] : given)
          in[n] = v;
      }
      std::string text;
      if (dataflow) {
        DataflowResult r = runDataflow(d.built, d.func, in);
        if (r.report.deadlock)
          throw Error("deadlock after " + std::to_string(r.report.cycles) +
                          " cycles: " + r.report.snapshot,
                      {}, kernel);
        text = formatTensors(r.outputs) + stallReport(r.report);
      } else {
        text = formatTensors(run(d.built, d.func, in));
      }
      writeOut(output, text, out);
    } else if (cc->parsed()) {
      const Func *f = d.built.find(d.func);
      if (!d.original.find(d.func))
        throw Error("function '" + d.func + "' is not in the kernel", {},
                    kernel);
      bool df = f->attrs.count("dataflow") > 0;
      Verdict v = equivalent(d.original, d.built, d.func, trials, seed, df);
      if (!v.pass)
        throw Error("check failed: " + v.message, {}, kernel);
      out << "check: pass (" << v.trials << " trials"
          << (df ? ", dataflow" : "") << ")\n";
    } else if (cr->parsed()) {
      bool all = !perf && !fifo && !layout;
      if (perf || all)
        out << latency(d.built, d.func).str();
      if (fifo || all)
        out << fifoReport(d.edges);
      if (layout || all)
        out << layoutReport(d.built);
    }
  } catch (Error &e) {
    e.setFile(kernel);
    err << e.format() << "\n";
    return 1;
  } catch (std::exception &e) {
    std::string msg = e.what();
    for (auto &c : msg)
      if (c == '\n')
        c = ' ';
    err << "miniallo: internal error: " << msg << "\n";
    return 2;
  }
  return 0;
}

} // namespace miniallo
