/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_VERIFY_HPP
#define MINIALLO_VERIFY_HPP

#include "miniallo/ir.hpp"

#include <string>
#include <vector>

namespace miniallo {

struct Diagnostic {
  std::string rule;
  std::string func;
  std::string message;
  Loc loc;
  std::string str() const;
};

// Structural and semantic checks on a module. Empty iff well formed.
std::vector<Diagnostic> verify(const Module &m);

} // namespace miniallo

#endif // MINIALLO_VERIFY_HPP
