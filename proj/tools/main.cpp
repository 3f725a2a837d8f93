// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  lengthctl::cli::Cli cli;
  return cli.run(argc, argv, std::cout, std::cerr);
}
