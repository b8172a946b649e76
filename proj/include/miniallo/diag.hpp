/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_DIAG_HPP
#define MINIALLO_DIAG_HPP

#include <stdexcept>
#include <string>

namespace miniallo {

struct Loc {
  int line = 0;
  int col = 0;
};

// A user-facing error: bad input, illegal schedule, failed check.
class Error : public std::runtime_error {
public:
  Error(std::string msg, Loc loc = {}, std::string file = "")
      : std::runtime_error(msg), loc_(loc), file_(std::move(file)) {}
  const Loc &loc() const { return loc_; }
  const std::string &file() const { return file_; }
  void setFile(const std::string &f) {
    if (file_.empty())
      file_ = f;
  }
  void setLoc(Loc l) {
    if (loc_.line == 0)
      loc_ = l;
  }
  // "file:line:col: error: msg" on a single line.
  std::string format() const;

private:
  Loc loc_;
  std::string file_;
};

// Broken internal invariant (exit code 2 in the driver).
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

enum class LogLevel { Quiet, Info, Debug };
LogLevel logLevel();
void logInfo(const std::string &msg);
void logDebug(const std::string &msg);

} // namespace miniallo

#endif // MINIALLO_DIAG_HPP
