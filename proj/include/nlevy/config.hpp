#pragma once

#include <string>

#include <json.hpp>

#include "nlevy/report.hpp"

namespace nlevy {

struct RunFlags {
    bool dry_run = false;
    int threads = 0;  // 0 = leave as configured
    std::vector<std::array<double, 4>> extra_probes;  // (t, x[, y[, z]]) rows
};

/// Parses, validates and executes one experiment configuration.
/// Returns the report; writes JSON/CSV outputs when the config names them.
ExperimentReport run_experiment_config(const nlohmann::json& config, const RunFlags& flags);

/// Loads the file, runs it and maps the outcome to the process exit code:
/// 0 all verdicts pass, 1 verdict failure, 2 config error, 3 numerical
/// contract violation.
int run_config_file(const std::string& path, const RunFlags& flags);

/// Canonical digest of a config (whitespace-insensitive).
std::string config_digest(const nlohmann::json& config);

}  // namespace nlevy
