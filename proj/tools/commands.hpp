#pragma once

#include <functional>
#include <vector>

#include "cli_support.hpp"

namespace srg::cli {

struct Command {
  CLI::App* app;
  std::function<int()> run;
};

/// Registers flag, nilpotent, metric, distance, ball, group, perimeter, blowup, verify.
std::vector<Command> register_commands(CLI::App& app);

}  // namespace srg::cli
