#pragma once

#include <string>
#include <vector>

namespace attishift {

// Runs `command` through the shell with `input` fed to stdin one entry per
// line and returns stdout split into lines. Throws Error on a nonzero exit.
std::vector<std::string> run_filter(const std::string& command,
                                    const std::vector<std::string>& input);

}  // namespace attishift
