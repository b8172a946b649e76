/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/hls.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

namespace miniallo {

std::string scheduleHash(const std::vector<PrimitiveRecord> &records) {
  uint64_t h = 1469598103934665603ull;
  for (auto &r : records) {
    for (char c : r.str() + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string hlsType(const ElemType &t) {
  std::string w = std::to_string(t.width);
  bool native = t.width == 8 || t.width == 16 || t.width == 32 || t.width == 64;
  switch (t.kind) {
  case ElemKind::Int:
    return native ? "int" + w + "_t" : "ap_int<" + w + ">";
  case ElemKind::UInt:
    if (t.width == 1)
      return "bool";
    return native ? "uint" + w + "_t" : "ap_uint<" + w + ">";
  case ElemKind::Index:
    return "int";
  case ElemKind::Float:
    return t.width == 16 ? "half" : t.width == 32 ? "float" : "double";
  case ElemKind::Fixed:
    return "ap_fixed<" + w + ", " + std::to_string(t.width - t.frac) + ">";
  case ElemKind::UFixed:
    return "ap_ufixed<" + w + ", " + std::to_string(t.width - t.frac) + ">";
  }
  return "?";
}

namespace {

std::string ident(const std::string &s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  return out;
}

std::string dims(const std::vector<int64_t> &shape) {
  std::string s;
  for (auto d : shape)
    s += "[" + std::to_string(d) + "]";
  return s;
}

std::string partMode(const PartitionBase &b) {
  switch (b.kind) {
  case PartKind::Bottom:
    return "complete";
  case PartKind::Cyclic:
    return "cyclic factor=" + std::to_string(b.factor);
  case PartKind::Block:
    return "block factor=" + std::to_string(b.factor);
  case PartKind::Top:
    break;
  }
  return "";
}

std::string cOp(const std::string &op) {
  if (op == "and")
    return "&&";
  if (op == "or")
    return "||";
  if (op == "not")
    return "!";
  if (op == "//")
    return "/";
  return op;
}

class Emitter {
public:
  explicit Emitter(const Module &m) : m_(m) {}

  std::string func(const Func &f) {
    f_ = &f;
    os_.str("");
    os_ << "void " << ident(f.name) << "(\n";
    std::vector<std::string> ps;
    for (auto &p : f.params)
      ps.push_back(decl(p, true));
    if (!f.result.empty())
      ps.push_back(decl(*f.findMem(f.result), true));
    for (size_t i = 0; i < ps.size(); ++i)
      os_ << "  " << ps[i] << (i + 1 < ps.size() ? ",\n" : "\n");
    os_ << ") {\n";
    if (f.attrs.count("dataflow"))
      os_ << "  #pragma HLS dataflow\n";
    for (auto &p : f.params)
      pragmas(p, 1);
    if (!f.result.empty())
      pragmas(*f.findMem(f.result), 1);
    for (auto &l : f.locals) {
      if (l.name == f.result)
        continue;
      os_ << "  " << decl(l, false) << ";\n";
      pragmas(l, 1);
    }
    body(f.body, 1);
    os_ << "}\n";
    return os_.str();
  }

private:
  std::string decl(const Memory &mem, bool param) {
    std::string t = hlsType(mem.type.elem);
    std::string n = ident(mem.name);
    if (mem.storage.kind == StorageKind::Stream) {
      std::string s = "hls::stream< " + t + " > " + (param ? "&" : "") + n;
      if (!mem.type.shape.empty())
        s += " /* " + n + dims(mem.type.shape) + " */";
      return s;
    }
    if (mem.storage.kind == StorageKind::StreamArray)
      return "hls::stream< " + t + " > " + n + dims(mem.type.shape);
    if (mem.type.shape.empty())
      return t + (param ? " &" : " ") + n;
    return t + " " + n + dims(mem.type.shape);
  }

  void pragmas(const Memory &mem, int ind) {
    std::string pad(ind * 2, ' ');
    std::string n = ident(mem.name);
    if (mem.storage.isStream()) {
      if (mem.storage.depth <= 0)
        throw Error("stream '" + mem.name + "' in '" + f_->name +
                    "' has no depth; size streams before emitting");
      os_ << pad << "#pragma HLS stream variable=" << n
          << " depth=" << mem.storage.depth << "\n";
      return;
    }
    for (size_t d = 0; d < mem.part.dims.size(); ++d) {
      std::string mode = partMode(mem.part.dims[d]);
      if (!mode.empty())
        os_ << pad << "#pragma HLS array_partition variable=" << n << " "
            << mode << " dim=" << d + 1 << "\n";
    }
  }

  const Memory *mem(const std::string &n) const { return f_->findMem(n); }

  std::string index(const std::vector<ExprP> &idx) {
    std::string s;
    for (auto &e : idx)
      s += "[" + expr(e, true) + "]";
    return s;
  }

  std::string expr(const ExprP &e, bool top = false) {
    switch (e->kind) {
    case ExprKind::IntLit:
      return i128ToString(e->ival);
    case ExprKind::FloatLit: {
      char buf[64];
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, e->fval);
      (void)ec;
      std::string s(buf, p);
      if (s.find_first_of(".e") == std::string::npos && s != "inf" &&
          s != "-inf" && s != "nan")
        s += ".0";
      return s;
    }
    case ExprKind::Var:
      return ident(e->name);
    case ExprKind::Load: {
      const Memory *m = mem(e->name);
      if (m && m->storage.kind == StorageKind::Stream)
        return ident(e->name) + ".read()";
      if (m && m->storage.kind == StorageKind::StreamArray)
        return ident(e->name) + index(e->args) + ".read()";
      return ident(e->name) + index(e->args);
    }
    case ExprKind::Cast:
      return "(" + hlsType(e->type) + ")(" + expr(e->args[0], true) + ")";
    case ExprKind::Unary:
      return cOp(e->name) + expr(e->args[0]);
    case ExprKind::Binary: {
      std::string s = expr(e->args[0]) + " " + cOp(e->name) + " " +
                      expr(e->args[1]);
      return top ? s : "(" + s + ")";
    }
    }
    return "?";
  }

  void body(const std::vector<Stmt> &b, int ind) {
    std::string pad(ind * 2, ' ');
    for (auto &s : b) {
      switch (s.kind) {
      case StmtKind::For: {
        std::string v = ident(s.var);
        os_ << pad << "l_" << ident(s.label) << ": for (int " << v
            << " = 0; " << v << " < " << s.extent << "; " << v << "++) {\n";
        if (s.attrs.pipeline)
          os_ << pad << "  #pragma HLS pipeline II=" << s.attrs.pipeline
              << "\n";
        if (s.attrs.unroll)
          os_ << pad << "  #pragma HLS unroll factor=" << s.attrs.unroll
              << "\n";
        body(s.body, ind + 1);
        os_ << pad << "}\n";
        break;
      }
      case StmtKind::If:
        os_ << pad << "if (" << expr(s.cond, true) << ") {\n";
        body(s.body, ind + 1);
        os_ << pad << "}\n";
        break;
      case StmtKind::Store: {
        const Memory *m = mem(s.array);
        std::string n = ident(s.array);
        if (m && m->storage.kind == StorageKind::Stream)
          os_ << pad << n << ".write(" << expr(s.value, true) << ");\n";
        else if (m && m->storage.kind == StorageKind::StreamArray)
          os_ << pad << n << index(s.idx) << ".write(" << expr(s.value, true)
              << ");\n";
        else
          os_ << pad << n << index(s.idx) << (s.update ? " += " : " = ")
              << expr(s.value, true) << ";\n";
        break;
      }
      case StmtKind::Fill: {
        const Memory *m = mem(s.array);
        std::vector<int64_t> shape = m ? m->type.shape : std::vector<int64_t>{};
        std::string n = ident(s.array), idx;
        std::string p = pad;
        for (size_t d = 0; d < shape.size(); ++d) {
          std::string v = "_f" + std::to_string(d);
          os_ << p << "for (int " << v << " = 0; " << v << " < " << shape[d]
              << "; " << v << "++) {\n";
          idx += "[" + v + "]";
          p += "  ";
        }
        os_ << p << n << idx << " = " << expr(s.value, true) << ";\n";
        for (size_t d = shape.size(); d > 0; --d) {
          p.resize(p.size() - 2);
          os_ << p << "}\n";
        }
        break;
      }
      case StmtKind::Call: {
        const Func *c = m_.find(s.callee);
        std::vector<std::string> args;
        for (auto &a : s.args)
          args.push_back(ident(a.name) + index(a.prefix));
        if (c && !c->result.empty())
          args.push_back(ident(s.result));
        os_ << pad << ident(s.callee) << "(";
        for (size_t i = 0; i < args.size(); ++i)
          os_ << (i ? ", " : "") << args[i];
        os_ << ");\n";
        break;
      }
      }
    }
  }

  const Module &m_;
  const Func *f_ = nullptr;
  std::ostringstream os_;
};

void postOrder(const Module &m, const std::string &name,
               std::set<std::string> &seen, std::vector<const Func *> &out) {
  if (!seen.insert(name).second)
    return;
  const Func *f = m.find(name);
  if (!f || f->isTemplate())
    return;
  for (auto &c : callees(*f))
    postOrder(m, c, seen, out);
  out.push_back(f);
}

} // namespace

std::string emitHls(const Module &m, const std::string &hash) {
  std::set<std::string> seen;
  std::vector<const Func *> order;
  for (auto &f : m.funcs)
    postOrder(m, f.name, seen, order);

  std::string out = "// Generated by miniallo " + std::string(kToolVersion);
  if (!hash.empty())
    out += ", schedule " + hash;
  out += "\n#include <ap_fixed.h>\n#include <ap_int.h>\n"
         "#include <hls_stream.h>\n#include <stdint.h>\n";
  Emitter em(m);
  for (auto *f : order)
    out += "\n" + em.func(*f);
  return out;
}

} // namespace miniallo
