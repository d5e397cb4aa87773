#ifndef HERALDSIM_RUNNER_HPP
#define HERALDSIM_RUNNER_HPP

#include <string>
#include <utility>
#include <vector>

#include "heraldsim/run_config.hpp"

namespace heraldsim::cli {

inline constexpr const char* tool_version = "1.0.0";

// Figure id -> one-line recipe, shown in --help.
const std::vector<std::pair<std::string, std::string>>& figure_recipes();

// Output file the command will write when config.output_path is empty.
std::string default_output_path(const RunConfig& config);

// Executes the command and writes its CSV artifact(s).  ConfigError and
// SimError propagate to the caller; the tool maps them to exit codes 2
// and 3.
void run(const RunConfig& config);

}  // namespace heraldsim::cli

#endif
