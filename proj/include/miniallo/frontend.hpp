/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_FRONTEND_HPP
#define MINIALLO_FRONTEND_HPP

#include "miniallo/ir.hpp"

#include <map>
#include <string>
#include <variant>

namespace miniallo {

//===----------------------------------------------------------------------===//
// Tokens
//===----------------------------------------------------------------------===//

enum class TokKind { Name, Int, Float, String, Punct, Newline, Indent, Dedent, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  Loc loc;
};

std::vector<Token> lex(const std::string &text, int firstLine = 1);

//===----------------------------------------------------------------------===//
// Kernel language
//===----------------------------------------------------------------------===//

// Template binding: an element type or an index constant.
using Binding = std::variant<ElemType, int64_t>;

// Parses kernel source into an unchecked module. Template bodies are kept
// as source text and parsed on instantiation.
Module parseKernel(const std::string &text, const std::string &file = "");

// Parses one function definition with template bindings applied.
Func parseFunction(const std::string &text, int firstLine,
                   const std::map<std::string, int64_t> &consts,
                   const std::map<std::string, Binding> &bindings);

// Type checks every concrete function, instantiating templates reachable
// from call sites, and annotates every expression with its type.
void checkAndInfer(Module &m);

// Adds a concrete clone of a template. Returns the instance name.
std::string instantiateTemplate(Module &m, const std::string &func,
                                const std::vector<TemplateArg> &args,
                                const std::string &id = "");

// parse + check + lower in one step.
Module loadKernel(const std::string &text, const std::string &file = "");
Module loadKernelFile(const std::string &path);

} // namespace miniallo

#endif // MINIALLO_FRONTEND_HPP
