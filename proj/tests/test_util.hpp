/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_TEST_UTIL_HPP
#define MINIALLO_TEST_UTIL_HPP

#include "miniallo/frontend.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace testutil {

inline std::string kernelPath(const std::string &name) {
  return std::string(MINIALLO_KERNEL_DIR) + "/" + name;
}

inline std::string goldenPath(const std::string &name) {
  return std::string(MINIALLO_GOLDEN_DIR) + "/" + name;
}

inline std::string readFile(const std::string &path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline miniallo::Module loadNamed(const std::string &name) {
  return miniallo::loadKernelFile(kernelPath(name));
}

inline size_t countOf(const std::string &text, const std::string &needle) {
  size_t n = 0;
  for (size_t p = text.find(needle); p != std::string::npos;
       p = text.find(needle, p + needle.size()))
    ++n;
  return n;
}

} // namespace testutil

#endif // MINIALLO_TEST_UTIL_HPP
