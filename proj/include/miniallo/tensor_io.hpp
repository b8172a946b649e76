/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_TENSOR_IO_HPP
#define MINIALLO_TENSOR_IO_HPP

#include "miniallo/sim.hpp"

#include <string>

namespace miniallo {

// Tensor text format. Each tensor is a header line followed by its
// elements in row-major order, separated by whitespace:
//
//   tensor A int32 4x4
//   1 0 0 0
//   ...
//   tensor s fixed(8,4) scalar
//   1.5
//
// Integers are decimal, fixed-point values are exact decimals (inputs are
// floored to the nearest representable value), floats use the shortest
// round-trip form. `#` starts a comment.
TensorValues parseTensors(const std::string &text, const std::string &file = "");
TensorValues readTensorFile(const std::string &path);
std::string formatTensors(const TensorValues &values);
std::string formatElem(const TensorValue &v, size_t k);

// Checks that every tensor names a parameter of `f` with its exact type.
void checkInputs(const Func &f, const TensorValues &values);

} // namespace miniallo

#endif // MINIALLO_TENSOR_IO_HPP
