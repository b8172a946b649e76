/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/tensor_io.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace miniallo {

using boost::multiprecision::cpp_int;

namespace {

cpp_int toBig(i128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v)
                            : static_cast<unsigned __int128>(v);
  cpp_int r = static_cast<uint64_t>(u >> 64);
  r <<= 64;
  r += static_cast<uint64_t>(u);
  return neg ? cpp_int(-r) : r;
}

i128 fromBig(const cpp_int &v) {
  cpp_int a = v < 0 ? cpp_int(-v) : v;
  uint64_t lo = static_cast<uint64_t>(a & cpp_int(UINT64_MAX));
  uint64_t hi = static_cast<uint64_t>(a >> 64);
  unsigned __int128 u = (static_cast<unsigned __int128>(hi) << 64) | lo;
  return v < 0 ? -static_cast<i128>(u) : static_cast<i128>(u);
}

struct Range {
  cpp_int lo, hi;
};

Range rangeOf(const ElemType &t) {
  cpp_int one = 1;
  if (t.isSigned())
    return {-(one << (t.width - 1)), (one << (t.width - 1)) - 1};
  return {0, (one << t.width) - 1};
}

std::string shapeStr(const std::vector<int64_t> &shape) {
  if (shape.empty())
    return "scalar";
  std::string s;
  for (size_t i = 0; i < shape.size(); ++i)
    s += (i ? "x" : "") + std::to_string(shape[i]);
  return s;
}

class Reader {
public:
  Reader(const std::string &text, std::string file) : file_(std::move(file)) {
    std::istringstream is(text);
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
      ++n;
      line = line.substr(0, line.find('#'));
      size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
          ++i;
        if (i >= line.size())
          break;
        size_t b = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
          ++i;
        toks_.push_back({line.substr(b, i - b), {n, static_cast<int>(b) + 1}});
      }
    }
  }

  TensorValues read() {
    TensorValues out;
    while (pos_ < toks_.size()) {
      expect("tensor");
      Tok name = next("a tensor name");
      Tok ty = next("an element type");
      auto elem = parseElemType(ty.text);
      if (!elem)
        fail("unknown element type '" + ty.text + "'", ty.loc);
      Tok sh = next("a shape");
      TensorType t{*elem, parseShape(sh)};
      if (out.count(name.text))
        fail("tensor '" + name.text + "' appears twice", name.loc);
      TensorValue v = TensorValue::zeros(t);
      for (size_t k = 0; k < v.size(); ++k) {
        Tok e = next("a tensor element");
        if (e.text == "tensor")
          fail("tensor '" + name.text + "' has " + std::to_string(k) +
                   " elements, expected " + std::to_string(v.size()),
               e.loc);
        if (t.elem.isFloat())
          v.fl[k] = roundFloat(parseFloat(e), t.elem.width);
        else
          v.raw[k] = parseFixed(e, t.elem);
      }
      out.emplace(name.text, std::move(v));
    }
    return out;
  }

private:
  struct Tok {
    std::string text;
    Loc loc;
  };

  [[noreturn]] void fail(const std::string &msg, Loc loc) {
    throw Error(msg, loc, file_);
  }

  Tok next(const char *what) {
    if (pos_ >= toks_.size()) {
      Loc l = toks_.empty() ? Loc{1, 1} : toks_.back().loc;
      fail(std::string("expected ") + what + " at end of input", l);
    }
    return toks_[pos_++];
  }

  void expect(const std::string &w) {
    Tok t = next(w.c_str());
    if (t.text != w)
      fail("expected '" + w + "', found '" + t.text + "'", t.loc);
  }

  std::vector<int64_t> parseShape(const Tok &t) {
    std::vector<int64_t> shape;
    if (t.text == "scalar")
      return shape;
    std::stringstream ss(t.text);
    std::string item;
    while (std::getline(ss, item, 'x')) {
      int64_t v = 0;
      auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || p != item.data() + item.size() || v < 1)
        fail("malformed shape '" + t.text + "'", t.loc);
      shape.push_back(v);
    }
    if (shape.empty())
      fail("malformed shape '" + t.text + "'", t.loc);
    return shape;
  }

  double parseFloat(const Tok &t) {
    double v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size())
      fail("malformed number '" + t.text + "'", t.loc);
    return v;
  }

  // Exact decimal to raw fixed point, flooring extra precision.
  i128 parseFixed(const Tok &t, const ElemType &elem) {
    const std::string &s = t.text;
    size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+'))
      neg = s[i++] == '-';
    cpp_int num = 0, den = 1;
    bool digits = false, point = false;
    for (; i < s.size(); ++i) {
      char c = s[i];
      if (c == '.' && !point) {
        point = true;
        continue;
      }
      if (c < '0' || c > '9')
        fail("malformed number '" + s + "'", t.loc);
      digits = true;
      num = num * 10 + (c - '0');
      if (point)
        den *= 10;
    }
    if (!digits)
      fail("malformed number '" + s + "'", t.loc);
    if (point && elem.frac == 0 && num % den != 0)
      fail("'" + s + "' is not an integer", t.loc);
    if (neg)
      num = -num;
    cpp_int scaled = num << elem.frac;
    cpp_int q = scaled / den;
    if (scaled % den != 0 && scaled < 0)
      q -= 1;
    Range r = rangeOf(elem);
    if (q < r.lo || q > r.hi)
      fail("'" + s + "' is out of range for " + elem.str(), t.loc);
    return fromBig(q);
  }

  std::vector<Tok> toks_;
  size_t pos_ = 0;
  std::string file_;
};

} // namespace

TensorValues parseTensors(const std::string &text, const std::string &file) {
  return Reader(text, file).read();
}

TensorValues readTensorFile(const std::string &path) {
  std::ifstream f(path);
  if (!f)
    throw Error("cannot open '" + path + "'", {}, path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parseTensors(ss.str(), path);
}

std::string formatElem(const TensorValue &v, size_t k) {
  if (v.type.elem.isFloat()) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v.fl[k]);
    (void)ec;
    return std::string(buf, p);
  }
  int frac = v.type.elem.frac;
  if (frac == 0)
    return i128ToString(v.raw[k]);
  // raw / 2^frac = raw * 5^frac / 10^frac
  cpp_int x = toBig(v.raw[k]);
  bool neg = x < 0;
  if (neg)
    x = -x;
  x *= boost::multiprecision::pow(cpp_int(5), static_cast<unsigned>(frac));
  std::string d = x.str();
  if (d.size() <= static_cast<size_t>(frac))
    d = std::string(frac + 1 - d.size(), '0') + d;
  std::string ip = d.substr(0, d.size() - frac);
  std::string fp = d.substr(d.size() - frac);
  while (!fp.empty() && fp.back() == '0')
    fp.pop_back();
  std::string s = (neg ? "-" : "") + ip;
  if (!fp.empty())
    s += "." + fp;
  return s;
}

std::string formatTensors(const TensorValues &values) {
  std::string out;
  for (auto &[name, v] : values) {
    out += "tensor " + name + " " + v.type.elem.str() + " " +
           shapeStr(v.type.shape) + "\n";
    int64_t row = v.type.shape.empty() ? 1 : v.type.shape.back();
    for (size_t k = 0; k < v.size(); ++k) {
      out += formatElem(v, k);
      out += (static_cast<int64_t>(k + 1) % row == 0) ? "\n" : " ";
    }
  }
  return out;
}

void checkInputs(const Func &f, const TensorValues &values) {
  for (auto &[name, v] : values) {
    const Memory *p = nullptr;
    for (auto &q : f.params)
      if (q.name == name)
        p = &q;
    if (!p)
      throw Error("input '" + name + "' is not a parameter of '" + f.name +
                  "'");
    if (!(p->type == v.type))
      throw Error("input '" + name + "' has type " + v.type.str() +
                  ", expected " + p->type.str());
  }
}

} // namespace miniallo
