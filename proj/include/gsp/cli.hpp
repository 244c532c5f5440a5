#pragma once

#include <string>
#include <vector>

namespace gsp::cli {

// Full CLI entry point (testable without spawning a process).
int run(const std::vector<std::string>& args);

}  // namespace gsp::cli
