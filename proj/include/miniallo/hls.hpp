/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_HLS_HPP
#define MINIALLO_HLS_HPP

#include "miniallo/schedule.hpp"

#include <string>
#include <vector>

namespace miniallo {

constexpr const char *kToolVersion = "0.1.0";

// Stable 64-bit FNV-1a hash of the record descriptions, as 16 hex digits.
std::string scheduleHash(const std::vector<PrimitiveRecord> &records);

// C++ spelling of an element type: int8_t, ap_int<5>, ap_fixed<8,4>, ...
std::string hlsType(const ElemType &t);

// HLS C++ text for every concrete function, callees first. A function's
// returned local becomes a trailing output parameter. Throws Error on a
// stream without a depth.
std::string emitHls(const Module &m, const std::string &scheduleHash = "");

} // namespace miniallo

#endif // MINIALLO_HLS_HPP
