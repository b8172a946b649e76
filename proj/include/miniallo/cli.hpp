/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef MINIALLO_CLI_HPP
#define MINIALLO_CLI_HPP

#include <ostream>

namespace miniallo {

// Command-line entry point. Returns 0 on success, 1 on a user error and 2
// on an internal failure; every failure writes one line to `err`.
int runCli(int argc, const char *const *argv, std::ostream &out,
           std::ostream &err);

} // namespace miniallo

#endif // MINIALLO_CLI_HPP
