#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gptd_app/config.hpp"

namespace gptd::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitAllVariantsFailed = 3,
  kExitIo = 4,
};

// Each command writes into config.output_dir and logs progress to `log`.
// Errors propagate as ConfigError, IoError or NumericalFailure.
int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_fit(const RunConfig& config, std::ostream& log);
int cmd_profile(const RunConfig& config, std::ostream& log);
int cmd_eval_grid(const RunConfig& config, std::ostream& log);

// Parses `args` (without the program name), runs the subcommand and maps
// errors to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gptd::app
