#pragma once

// Command-line front end: train, experiment, validate.
//
// Exit codes: 0 success, 2 invalid arguments or config, 3 output directory
// not writable, 130 interrupted (partial artifacts, manifest marked incomplete).

#include <atomic>
#include <string>
#include <vector>

namespace qcsm {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitIo = 3, kExitInterrupted = 130 };

/// Runs one invocation. `cancel`, when given, is polled for interruption.
int run_cli(const std::vector<std::string>& args, const std::atomic<bool>* cancel = nullptr);

}  // namespace qcsm
