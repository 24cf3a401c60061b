#pragma once

// wonham_lab subcommands. Exit codes: 0 success, 1 check or bound failure,
// 2 configuration error, 3 I/O error.

#include <filesystem>
#include <iosfwd>

#include "wonham/stability.hpp"

namespace wonham::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kIoError = 3 };

/// "lambda_star=<x> C=<y>" with 12 significant digits.
int cmd_rate(const ExperimentConfig& cfg, std::ostream& out);

/// signal_<r>.csv and observations_<r>.csv per replicate.
int cmd_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                 std::ostream& out, std::ostream& err);

/// replicate_<r>.csv per replicate plus summary.json. With `trajectories`,
/// also the filter, smoothing and spread CSVs of every replicate.
int cmd_stability(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                  bool trajectories, std::ostream& out, std::ostream& err);

/// Filters and smoothing for a recorded observation CSV.
int cmd_filter(const ExperimentConfig& cfg, const std::filesystem::path& observations,
               const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

/// Invariant suite with a pass/fail table.
int cmd_verify(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace wonham::cli
