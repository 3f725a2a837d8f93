// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>

namespace CLI {
class App;
}

namespace lengthctl::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { k_ok = 0, k_user_error = 1, k_runtime_error = 2 };

/// The lengthctl command line. Holds the parsed flag values, so an instance
/// serves a single invocation.
class Cli {
 public:
  Cli();
  ~Cli();

  CLI::App& app() noexcept;

  int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

  struct Flags;  // defined in cli.cpp

 private:
  std::unique_ptr<Flags> flags_;
  std::unique_ptr<CLI::App> app_;
};

}  // namespace lengthctl::cli
