#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cht/config.hpp"
#include "cht/monitor.hpp"
#include "cht/stepper.hpp"

namespace cht {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInvariantFailure = 2,
  kExitBlowUp = 3,
  kExitSolverFailure = 4,
  kExitIo = 5,
};

/// 0 iff the run completed and every invariant passed; a stopped run maps
/// by its status (positivity loss counts as an invariant failure).
int exit_code_for(RunStatus status, const InvariantReport& report);

/// One monitored simulation, without file output.
struct RunResult {
  Trajectory trajectory;
  InvariantReport report;
  std::vector<Monitor::NamedVerdict> verdicts;
  std::optional<Monitor> monitor;
  int exit_code = kExitOk;
};

RunResult execute(const RunConfig& config);

/// Column-per-series CSV of the sample records and monitored series.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const Monitor& monitor);

/// Writes config.ini, trajectory.csv, report.json and final/<field>_<n>.csv
/// (plus snapshots/ when snapshots were stored) into dir. Throws IoError.
void write_run_outputs(const std::filesystem::path& dir, const RunConfig& config, const RunResult& result,
                       std::span<const std::string> warnings);

/// CHTSIM_WORKERS when set to a positive integer, else 0 (hardware).
unsigned workers_from_env();

// Subcommands. Diagnostics go to log; the return value is the exit code.
int run_command(const ParsedConfig& parsed, std::ostream& log);
int sweep_m_command(const ParsedConfig& parsed, std::span<const double> values, unsigned workers,
                    std::ostream& log);
int sweep_eps_command(const ParsedConfig& parsed, std::span<const double> values, unsigned workers,
                      std::ostream& log);
int verify_command(const ParsedConfig& parsed, std::ostream& log);

}  // namespace cht
