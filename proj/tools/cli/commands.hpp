#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bsp/error.hpp"

namespace bsp::cli {

// Exit statuses of the bsptree driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumerical = 3;

int exit_code(ErrorKind kind);

// Entry point of the `bsptree` executable, callable in-process. Subcommands:
// sample | toy | relational | consistency | density.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bsp::cli
