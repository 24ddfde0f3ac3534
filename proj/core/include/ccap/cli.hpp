#pragma once

namespace ccap {

/// Pipeline driver. argv[1] selects the subcommand:
///   sample | capacity | subgoals | train-predictor | eval-predictor |
///   train | eval | ablate | render | verify
/// Exit codes: 0 ok, 1 verification/runtime failure, 2 usage, 3 config.
int dispatch(int argc, const char* const* argv);

}  // namespace ccap
