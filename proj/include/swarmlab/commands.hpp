#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swarmlab/integrator.hpp"

namespace swarm {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numerical = 3 };

struct CommandOptions {
  std::optional<std::filesystem::path> out;  ///< overrides the config's output directory
  std::optional<std::uint64_t> seed;         ///< overrides the config seed
  std::optional<int> jobs;                   ///< overrides region.jobs
};

/// trajectory.csv and summary.json.
int cmd_simulate(const std::filesystem::path& config, const CommandOptions& options, std::ostream& err);
/// sweep.csv and sweep_summary.json: one run per value of the dotted parameter.
int cmd_sweep(const std::filesystem::path& config, const std::string& param, const std::vector<double>& values,
              const CommandOptions& options, std::ostream& err);
/// grid.csv, boundary_<k>_<name>.csv per requested curve, contour.csv.
int cmd_region(const std::filesystem::path& config, const CommandOptions& options, std::ostream& err);

/// Exponential decay rate of V (or E when recorded) fitted by least squares
/// to log samples up to the first region entry.
double fitted_decay_rate(const TrajectoryRecord& record);

/// Run summary as written to summary.json.
nlohmann::json run_summary(const TrajectoryRecord& record);

}  // namespace swarm
