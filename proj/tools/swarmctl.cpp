// swarmctl: run scenarios, parameter sweeps and consensus-region grids from JSON configs.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "swarmlab/commands.hpp"

namespace {

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double value = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument(item);
    out.push_back(value);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and control of alignment and attraction-repulsion swarms"};
  app.require_subcommand(1);

  std::string config, out, param, values;
  int jobs = 0;

  auto* simulate = app.add_subcommand("simulate", "Run one scenario; writes trajectory.csv and summary.json");
  simulate->add_option("config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out, "Output directory (default: the config's output.dir)");

  auto* sweep = app.add_subcommand("sweep", "Rerun a scenario for several values of one numeric field");
  sweep->add_option("config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--param", param, "Dotted path of the field, e.g. control.M")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--out", out, "Output directory");

  auto* region = app.add_subcommand("region", "Estimate consensus probabilities on an (X0, V0) grid");
  region->add_option("config", config, "Scenario JSON with a region block")->required()->check(CLI::ExistingFile);
  region->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  region->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : swarm::exit_config;
  }

  swarm::CommandOptions options;
  if (!out.empty()) options.out = out;
  if (jobs > 0) options.jobs = jobs;
  if (const char* seed = std::getenv("SWARMCTL_SEED")) {
    try {
      options.seed = std::stoull(seed);
    } catch (const std::exception&) {
      std::cerr << "config error: SWARMCTL_SEED must be a nonnegative integer\n";
      return swarm::exit_config;
    }
  }

  if (simulate->parsed()) return swarm::cmd_simulate(config, options, std::cerr);
  if (region->parsed()) return swarm::cmd_region(config, options, std::cerr);
  std::vector<double> list;
  try {
    list = parse_values(values);
  } catch (const std::exception&) {
    std::cerr << "config error: --values must be comma-separated numbers\n";
    return swarm::exit_config;
  }
  return swarm::cmd_sweep(config, param, list, options, std::cerr);
}
