/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/render.hpp"
#include "miniallo/frontend.hpp"

#include <sstream>

namespace miniallo {

namespace {

std::string quote(const std::string &s) { return "\"" + s + "\""; }

std::string memAnnot(const Memory &m) {
  std::vector<std::string> items;
  if (!m.part.isNone())
    items.push_back("partition=" + quote(m.part.str()));
  if (m.storage.kind != StorageKind::Bram)
    items.push_back("storage=" + quote(storageStr(m.storage)));
  if (!m.scope.empty())
    items.push_back("scope=" + quote(m.scope));
  if (items.empty())
    return "";
  std::string s = " @[";
  for (size_t i = 0; i < items.size(); ++i)
    s += (i ? ", " : "") + items[i];
  return s + "]";
}

std::string typeStr(const TensorType &t) {
  std::string s = t.elem.str();
  if (!t.shape.empty()) {
    s += "[";
    for (size_t i = 0; i < t.shape.size(); ++i)
      s += (i ? ", " : "") + std::to_string(t.shape[i]);
    s += "]";
  }
  return s;
}

void renderBody(std::ostream &os, const std::vector<Stmt> &body, int ind) {
  std::string pad(ind * 2, ' ');
  for (auto &s : body) {
    switch (s.kind) {
    case StmtKind::For: {
      os << pad << "for " << s.var << " in range(" << s.extent << ") @[label="
         << quote(s.label);
      if (!s.band.empty())
        os << ", band=" << quote(s.band);
      if (s.attrs.pipeline)
        os << ", pipeline=" << s.attrs.pipeline;
      if (s.attrs.unroll)
        os << ", unroll=" << s.attrs.unroll;
      for (auto &[k, v] : s.tags)
        os << ", " << k << "=" << quote(v);
      os << "]:\n";
      renderBody(os, s.body, ind + 1);
      break;
    }
    case StmtKind::If:
      os << pad << "if " << exprStr(s.cond) << ":\n";
      renderBody(os, s.body, ind + 1);
      break;
    case StmtKind::Store:
    case StmtKind::Fill: {
      os << pad << s.array;
      if (!s.idx.empty()) {
        os << "[";
        for (size_t i = 0; i < s.idx.size(); ++i)
          os << (i ? ", " : "") << exprStr(s.idx[i]);
        os << "]";
      }
      os << (s.update ? " += " : " = ") << exprStr(s.value) << "\n";
      break;
    }
    case StmtKind::Call: {
      os << pad;
      if (!s.result.empty())
        os << s.result << " = ";
      else
        os << "call ";
      os << s.callee << "(";
      for (size_t i = 0; i < s.args.size(); ++i) {
        os << (i ? ", " : "") << s.args[i].name;
        if (!s.args[i].prefix.empty()) {
          os << "[";
          for (size_t k = 0; k < s.args[i].prefix.size(); ++k)
            os << (k ? ", " : "") << exprStr(s.args[i].prefix[k]);
          os << "]";
        }
      }
      os << ")\n";
      break;
    }
    }
  }
}

} // namespace

std::string renderFunc(const Func &f) {
  if (f.isTemplate())
    return f.templateText;
  std::ostringstream os;
  os << "def " << f.name << "(";
  for (size_t i = 0; i < f.params.size(); ++i) {
    auto &p = f.params[i];
    os << (i ? ", " : "") << p.name << ": " << typeStr(p.type)
       << memAnnot(p);
  }
  os << ")";
  if (f.hasRet)
    os << " -> " << typeStr(f.retType);
  if (!f.attrs.empty()) {
    os << " @[";
    bool first = true;
    for (auto &[k, v] : f.attrs) {
      os << (first ? "" : ", ") << k << "=" << quote(v);
      first = false;
    }
    os << "]";
  }
  os << ":\n";
  for (auto &l : f.locals)
    os << "  " << l.name << ": " << typeStr(l.type) << memAnnot(l) << "\n";
  renderBody(os, f.body, 1);
  if (!f.result.empty())
    os << "  return " << f.result << "\n";
  if (f.body.empty() && f.locals.empty() && f.result.empty())
    os << "  pass\n";
  return os.str();
}

std::string render(const Module &m) {
  std::ostringstream os;
  os << kIrHeader << "\n";
  for (auto &[k, v] : m.consts)
    os << "const " << k << " = " << v << "\n";
  if (!m.top.empty())
    os << "top = " << m.top << "\n";
  for (auto &f : m.funcs) {
    os << "\n";
    os << renderFunc(f);
  }
  return os.str();
}

Module readIr(const std::string &text, const std::string &file) {
  if (text.rfind(kIrHeader, 0) != 0)
    throw Error("missing IR header '" + std::string(kIrHeader) + "'", {1, 1},
                file);
  return loadKernel(text, file);
}

} // namespace miniallo
