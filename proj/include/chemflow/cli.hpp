#pragma once

namespace chemflow {

/// Command-line entry point. Subcommands: run, oracle, eps-study, check,
/// resume. Exit codes: 0 clean, 2 invariant violation, 3 configuration
/// error, 4 solver failure.
int cli_main(int argc, const char* const* argv);

} // namespace chemflow
