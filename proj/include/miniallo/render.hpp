/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_RENDER_HPP
#define MINIALLO_RENDER_HPP

#include "miniallo/ir.hpp"

#include <string>

namespace miniallo {

constexpr const char *kIrHeader = "# miniallo-ir v1";

// Deterministic text form of a module: the kernel language plus `@[...]`
// annotations for attributes that the source syntax cannot express.
std::string render(const Module &m);
std::string renderFunc(const Func &f);

// Debug reader for render() output.
Module readIr(const std::string &text, const std::string &file = "");

} // namespace miniallo

#endif // MINIALLO_RENDER_HPP
