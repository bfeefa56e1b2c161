#pragma once

#include <memory>
#include <vector>

#include "runner.hpp"

namespace rpt {

// Registers every subcommand on the root app. The returned objects own the
// parameter storage and must outlive parsing.
std::vector<std::shared_ptr<Command>> register_commands(CLI::App& root);

}  // namespace rpt
