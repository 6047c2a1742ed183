#pragma once

#include <string>

#include "abv/config.hpp"

namespace abv {

// Exit codes of the command-line tool.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_guard_error = 3;
inline constexpr int exit_statistical_failure = 4;

struct RunStatus {
    int exit_code = exit_ok;
    std::string summary_path;
    bool partial = false;
};

/// Execute one run: build the scenario, write distributions/fourier/samples as
/// CSV or JSON plus summary.json and a config echo into cfg.directory. Output
/// bytes are a pure function of (config, seed) on a given build. Sweeps run
/// their points in a thread pool sized by ABV_THREADS (default: hardware).
RunStatus run(const RunConfig& cfg);

}  // namespace abv
