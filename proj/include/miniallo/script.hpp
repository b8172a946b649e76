/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_SCRIPT_HPP
#define MINIALLO_SCRIPT_HPP

#include "miniallo/composer.hpp"

#include <map>
#include <string>
#include <vector>

namespace miniallo {

struct ScriptResult {
  std::map<std::string, Schedule> schedules;
  std::vector<std::string> order; // schedule names in definition order
  std::string built;              // last `build` target, "" if none
  std::string target;             // "sim" or "hls"
  std::vector<StreamEdge> edges;  // of the last build
};

// Executes a `.sch` schedule script against `m`. Errors carry the script
// line and column.
ScriptResult runScript(const Module &m, const std::string &text,
                       const std::string &file = "");
ScriptResult runScriptFile(const Module &m, const std::string &path);

} // namespace miniallo

#endif // MINIALLO_SCRIPT_HPP
