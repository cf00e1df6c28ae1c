#pragma once

#include <iosfwd>

#include "mvsenti/config.hpp"
#include "mvsenti/errors.hpp"

namespace mvsenti {

/// Exit code for a failure class: 2 for usage and configuration problems,
/// 3 for bad data or model state.
int exit_code_for(Errc code);

// Subcommand bodies. Each throws Error on failure and writes its normal
// output to `out`; run_cli maps the codes to process exit status.
void cmd_train(const RunConfig& cfg, std::ostream& out);
void cmd_predict(const RunConfig& cfg, std::ostream& out);
void cmd_evaluate(const RunConfig& cfg, std::ostream& out);
void cmd_inspect(const RunConfig& cfg, std::ostream& out);

/// Full command line: parses flags, layers defaults -> config file -> flag
/// overrides, dispatches the subcommand and returns the process exit code
/// (0 success, 2 usage/config, 3 data/model state, 1 unexpected).
int run_cli(int argc, const char* const* argv);

}  // namespace mvsenti
