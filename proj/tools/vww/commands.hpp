#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "vww/error.hpp"

namespace vww::cli {

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::size_t threads = 0;  // 0: VWW_THREADS, else 1
};

/// 2 configuration/validation, 3 numerical failure, 4 I/O.
int exit_code(ErrorCode code);

/// Runs one subcommand; reports errors on `err` and returns the exit code.
int run_command(const std::string& command, const RunOptions& options, std::ostream& err);

/// In-process battery of the closed-form examples behind a subcommand.
int run_selftest(const std::string& command, std::ostream& out);

}  // namespace vww::cli
