/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

// Internal helpers shared by the primitive implementations.

#ifndef MINIALLO_SRC_PRIMS_HPP
#define MINIALLO_SRC_PRIMS_HPP

#include "miniallo/schedule.hpp"

#include <set>
#include <string>

namespace miniallo {

void primSplit(Module &m, const PrimitiveRecord &r);
void primReorder(Module &m, const PrimitiveRecord &r);
void primFuse(Module &m, const PrimitiveRecord &r);
void primUnroll(Module &m, const PrimitiveRecord &r);
void primPipeline(Module &m, const PrimitiveRecord &r);
void primUnfold(Module &m, const PrimitiveRecord &r);
void primBufferAt(Module &m, const PrimitiveRecord &r);
void primReuseAt(Module &m, const PrimitiveRecord &r);
void primPartition(Module &m, const PrimitiveRecord &r);
void primRelay(Module &m, const PrimitiveRecord &r);

// Index-typed expression builders.
ExprP ixInt(int64_t v);
ExprP ixBin(const std::string &op, ExprP a, ExprP b);
ExprP ixCmp(const std::string &op, ExprP a, ExprP b);

std::set<std::string> loopVars(const Func &f);
std::set<std::string> loopLabels(const Func &f);
std::string freshName(const std::set<std::string> &used,
                      const std::string &base);
// Fresh memory name in `f` (memories and loop variables share a namespace).
std::string freshMemName(const Func &f, const std::string &base);

// The statement list directly containing `target`, or nullptr.
std::vector<Stmt> *parentBody(std::vector<Stmt> &body, const Stmt *target);
// Labels of every loop in a statement list, including nested ones.
std::set<std::string> labelsIn(const std::vector<Stmt> &body);
// Whether any statement in `body` reads or writes memory `mem`.
bool touches(const std::vector<Stmt> &body, const std::string &mem);

Func &targetFunc(Module &m, const PrimitiveRecord &r);

} // namespace miniallo

#endif // MINIALLO_SRC_PRIMS_HPP
