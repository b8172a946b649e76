/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/diag.hpp"

#include <cstdlib>
#include <iostream>

namespace miniallo {

std::string Error::format() const {
  std::string out = file_.empty() ? "<input>" : file_;
  out += ":" + std::to_string(loc_.line) + ":" + std::to_string(loc_.col);
  std::string msg = what();
  for (auto &c : msg)
    if (c == '\n')
      c = ' ';
  return out + ": error: " + msg;
}

LogLevel logLevel() {
  const char *env = std::getenv("MINIALLO_LOG");
  if (!env)
    return LogLevel::Quiet;
  std::string v = env;
  if (v == "debug")
    return LogLevel::Debug;
  if (v == "info")
    return LogLevel::Info;
  return LogLevel::Quiet;
}

void logInfo(const std::string &msg) {
  if (logLevel() != LogLevel::Quiet)
    std::cerr << "[info] " << msg << "\n";
}

void logDebug(const std::string &msg) {
  if (logLevel() == LogLevel::Debug)
    std::cerr << "[debug] " << msg << "\n";
}

} // namespace miniallo
