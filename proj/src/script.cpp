/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/script.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace miniallo {

namespace {

struct Word {
  std::string text;
  int col = 0;
};

std::vector<Word> splitWords(const std::string &line) {
  std::vector<Word> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
      ++i;
    if (i >= line.size())
      break;
    size_t b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t')
      ++i;
    out.push_back({line.substr(b, i - b), static_cast<int>(b) + 1});
  }
  return out;
}

class Interp {
public:
  Interp(const Module &m, std::string file) : m_(m), file_(std::move(file)) {}

  void line(const std::string &raw, int lineNo) {
    std::string text = raw.substr(0, raw.find('#'));
    words_ = splitWords(text);
    line_ = lineNo;
    if (words_.empty())
      return;
    try {
      dispatch();
    } catch (Error &e) {
      if (e.loc().line == line_ && e.file() == file_)
        throw;
      throw Error(e.what(), {line_, words_[0].col}, file_);
    }
  }

  ScriptResult result;

private:
  [[noreturn]] void fail(const std::string &msg, size_t word) {
    int col = word < words_.size() ? words_[word].col
                                   : (words_.empty() ? 1 : words_.back().col);
    throw Error(msg, {line_, col}, file_);
  }

  const std::string &word(size_t k, const char *what) {
    if (k >= words_.size())
      fail(std::string("expected ") + what, k);
    return words_[k].text;
  }

  int64_t integer(size_t k, const std::string &s) {
    int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      fail("expected an integer, found '" + s + "'", k);
    return v;
  }

  std::vector<int> list(size_t k, const std::string &s) {
    std::string t;
    for (char c : s)
      if (c != '[' && c != ']')
        t += c;
    std::vector<int> out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty())
        out.push_back(static_cast<int>(integer(k, item)));
    if (out.empty())
      fail("expected a list of integers", k);
    return out;
  }

  // Splits `key=value`; returns false when the word has another key.
  bool option(size_t k, const std::string &key, std::string &value) {
    if (k >= words_.size())
      return false;
    const std::string &w = words_[k].text;
    if (w.rfind(key + "=", 0) != 0)
      return false;
    value = w.substr(key.size() + 1);
    return true;
  }

  Schedule &sched(const std::string &name, size_t k) {
    auto it = result.schedules.find(name);
    if (it == result.schedules.end())
      fail("unknown schedule '" + name + "'", k);
    return it->second;
  }

  void expectEnd(size_t n) {
    if (words_.size() > n)
      fail("unexpected '" + words_[n].text + "'", n);
  }

  std::string asName(size_t k) {
    if (k >= words_.size())
      return "";
    if (words_[k].text != "as")
      fail("expected 'as'", k);
    std::string n = word(k + 1, "a name after 'as'");
    expectEnd(k + 2);
    return n;
  }

  void dispatch() {
    const std::string &head = words_[0].text;
    if (head == "customize") {
      std::string func = word(1, "a function name");
      if (word(2, "'as'") != "as")
        fail("expected 'as'", 2);
      std::string name = word(3, "a schedule name");
      expectEnd(4);
      if (result.schedules.count(name))
        fail("schedule '" + name + "' is already defined", 3);
      result.schedules.emplace(name, customize(m_, func));
      result.order.push_back(name);
      return;
    }
    if (head == "build") {
      std::string name = word(1, "a schedule name");
      std::string target = "sim";
      for (size_t k = 2; k < words_.size(); ++k)
        if (!option(k, "target", target))
          fail("unexpected '" + words_[k].text + "'", k);
      if (target != "sim" && target != "hls")
        fail("unknown target '" + target + "'", 2);
      Schedule &s = sched(name, 1);
      build(s, &result.edges);
      result.built = name;
      result.target = target;
      return;
    }
    auto dot = head.find('.');
    if (dot == std::string::npos)
      fail("unknown command '" + head + "'", 0);
    Schedule &s = sched(head.substr(0, dot), 0);
    std::string op = head.substr(dot + 1);

    if (op == "split" || op == "unroll") {
      std::string loop = word(1, "a loop name");
      int64_t f = integer(2, word(2, "a factor"));
      expectEnd(3);
      if (op == "split")
        s.split(loop, f);
      else
        s.unroll(loop, f);
    } else if (op == "reorder" || op == "fuse") {
      std::vector<std::string> loops;
      for (size_t k = 1; k < words_.size(); ++k)
        loops.push_back(words_[k].text);
      if (loops.empty())
        fail("expected loop names", 1);
      if (op == "reorder")
        s.reorder(loops);
      else
        s.fuse(loops);
    } else if (op == "pipeline") {
      std::string loop = word(1, "a loop name");
      int64_t ii = 1;
      if (words_.size() > 2) {
        std::string v = words_[2].text;
        option(2, "ii", v);
        ii = integer(2, v);
      }
      expectEnd(3);
      s.pipeline(loop, ii);
    } else if (op == "unfold") {
      std::string band = word(1, "a band name");
      std::string v;
      if (!option(2, "axis", v))
        fail("expected axis=<list>", 2);
      s.unfold(band, list(2, v), asName(3));
    } else if (op == "buffer_at" || op == "reuse_at") {
      std::string array = word(1, "an array name");
      std::string loop = word(2, "a loop name");
      std::string as = asName(3);
      if (op == "buffer_at")
        s.bufferAt(array, loop, as);
      else
        s.reuseAt(array, loop, as);
    } else if (op == "partition") {
      std::string array = word(1, "an array name");
      std::string mode = word(2, "a partition mode");
      PartKind kind;
      if (mode == "complete")
        kind = PartKind::Bottom;
      else if (mode == "cyclic")
        kind = PartKind::Cyclic;
      else if (mode == "block")
        kind = PartKind::Block;
      else
        fail("unknown partition mode '" + mode + "'", 2);
      std::vector<int> dims;
      int64_t factor = 0;
      for (size_t k = 3; k < words_.size(); ++k) {
        std::string v;
        if (option(k, "dim", v))
          dims = list(k, v);
        else if (option(k, "factor", v))
          factor = integer(k, v);
        else
          fail("unexpected '" + words_[k].text + "'", k);
      }
      if (kind != PartKind::Bottom && factor == 0)
        fail("partition mode '" + mode + "' needs factor=<f>", 2);
      s.partition(array, kind, dims, factor);
    } else if (op == "relay") {
      std::string array = word(1, "an array name");
      std::string dst = word(2, "a destination");
      int axis = -1;
      int64_t depth = 0;
      for (size_t k = 3; k < words_.size(); ++k) {
        std::string v;
        if (option(k, "axis", v))
          axis = static_cast<int>(integer(k, v));
        else if (option(k, "depth", v))
          depth = integer(k, v);
        else
          fail("unexpected '" + words_[k].text + "'", k);
      }
      s.relay(array, dst, axis, depth);
    } else if (op == "compose") {
      std::string sub = word(1, "a schedule name");
      std::string id;
      for (size_t k = 2; k < words_.size(); ++k)
        if (!option(k, "id", id))
          fail("unexpected '" + words_[k].text + "'", k);
      if (sub == head.substr(0, dot))
        fail("a schedule cannot compose itself", 1);
      compose(s, sched(sub, 1), id);
    } else {
      fail("unknown primitive '" + op + "'", 0);
    }
  }

  const Module &m_;
  std::string file_;
  std::vector<Word> words_;
  int line_ = 0;
};

} // namespace

ScriptResult runScript(const Module &m, const std::string &text,
                       const std::string &file) {
  Interp in(m, file);
  std::istringstream is(text);
  std::string line;
  int n = 0;
  while (std::getline(is, line))
    in.line(line, ++n);
  return std::move(in.result);
}

ScriptResult runScriptFile(const Module &m, const std::string &path) {
  std::ifstream f(path);
  if (!f)
    throw Error("cannot open '" + path + "'", {}, path);
  std::stringstream ss;
  ss << f.rdbuf();
  return runScript(m, ss.str(), path);
}

} // namespace miniallo
