#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "polyrep/dynamics.hpp"
#include "polyrep/scenario.hpp"

namespace polyrep {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides neighborhood.seed
};

struct RunResult {
  int exit_status = 0;  // 0 all verdicts pass, 1 a verdict failed, 2 an analysis errored
  std::string report;   // JSON text, as written to disk
  std::filesystem::path report_path;
  std::optional<std::filesystem::path> trajectory_path;
  std::optional<std::filesystem::path> legend_path;
};

/// Runs the requested analyses in the order rest_point, samplers, simulation,
/// certificate, basin, and writes the report plus any trajectory artifacts.
/// Throws IoError if an output file cannot be written.
RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options = {});

/// Trajectory as CSV: t, w_1..w_n, V, dist, mass_err, 17 significant digits.
std::string trajectory_csv(const Trajectory<double>& traj);

/// Column legend mapping each w_i to its atom coordinates.
std::string atom_legend(const Trajectory<double>& traj);

}  // namespace polyrep
