/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
  return miniallo::runCli(argc, argv, std::cout, std::cerr);
}
