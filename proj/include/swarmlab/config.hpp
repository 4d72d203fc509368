#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swarmlab/control.hpp"
#include "swarmlab/dynamics.hpp"
#include "swarmlab/integrator.hpp"
#include "swarmlab/kernels.hpp"
#include "swarmlab/state.hpp"

namespace swarm {

struct KernelConfig {
  std::string family = "rational";  ///< rational | indicator | plateau | tabulated
  std::string argument;             ///< distance | squared_distance; empty means the model's default
  double H = 1.0;
  double sigma = 1.0;
  double beta = 1.0;
  double R = 1.0;
  double M = 1.0;
  double tail_integral = 1.0;
  std::vector<double> r;
  std::vector<double> a;
  bool operator==(const KernelConfig&) const = default;
};

struct DeviationConfig {
  std::string type = "zero";  ///< zero | self | leader | structured | local_average
  std::optional<double> p;
  double q = 2.0;
  double R = 1.0;
  std::string eta_mode = "per_agent";
  KernelConfig phi;
  bool operator==(const DeviationConfig&) const = default;
};

struct ModelConfig {
  std::string type = "cucker_smale";
  KernelConfig kernel;
  std::string repulsion = "none";  ///< none | power_law
  double p = 2.0;
  double lambda = 0.0;
  std::vector<double> friction;  ///< constant b_i; one value applies to all agents
  double R = 1.0;
  double speed = 1.0;
  double beta = 2.0;  ///< reduced_pair_cd exponent
  std::vector<std::vector<double>> weights;
  double alpha = 0.0;      ///< perturbed_cs
  double beta_coef = 0.0;  ///< perturbed_cs
  DeviationConfig deviation;
  bool operator==(const ModelConfig&) const = default;
};

struct ControlConfig {
  std::string law = "none";
  double alpha = 0.0;
  double beta = 0.0;
  double M = 0.0;
  std::optional<double> epsilon;
  double eta = 0.0;
  double gamma = 0.0;
  std::optional<double> p;  ///< leader law; defaults to q/(q-1)
  double q = 2.0;
  double R = 0.0;
  KernelConfig phi;
  std::string eta_mode = "per_agent";
  double sample_hold_dt = 0.0;
  bool operator==(const ControlConfig&) const = default;
};

struct InitialConfig {
  std::string type = "explicit";  ///< explicit | random | rescaled
  int dim = 1;
  int count = 1;
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> heading;
  std::vector<double> x_range{-1.0, 1.0};
  std::vector<double> v_range{-1.0, 1.0};
  double X0 = 0.0;
  double V0 = 0.0;
  bool operator==(const InitialConfig&) const = default;
};

struct AxisConfig {
  double min = 0.0;
  double max = 10.0;
  int n = 21;
  bool operator==(const AxisConfig&) const = default;
};

struct BoundaryConfig {
  std::string name = "uncontrolled";  ///< uncontrolled | local_average
  double strength = 0.0;
  double R = 0.0;
  bool operator==(const BoundaryConfig&) const = default;
};

struct RegionConfig {
  AxisConfig X0;
  AxisConfig V0;
  int trials = 20;
  double success_V = 1e-5;
  double level = 0.8;
  int jobs = 1;
  double h = 1e-3;
  double t_end = 100.0;
  double stop_below_V = 1e-6;
  std::vector<BoundaryConfig> boundaries;
  bool operator==(const RegionConfig&) const = default;
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  ModelConfig model;
  ControlConfig control;
  InitialConfig initial;
  SimConfig sim;
  std::string output_dir = "out";
  std::optional<RegionConfig> region;
  bool operator==(const ScenarioConfig&) const = default;
};

/// Parses and validates a scenario. Errors are ConfigError with a
/// "line:column" anchor for syntax errors and a JSON pointer for field errors.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json load_config_json(const std::filesystem::path& path);

nlohmann::json to_json(const ScenarioConfig& cfg);

KernelSpec build_kernel(const KernelConfig& k, KernelArgument default_argument);
ModelSpec build_model(const ScenarioConfig& cfg);
ControlSpec build_control(const ScenarioConfig& cfg);
AgentState build_initial_state(const ScenarioConfig& cfg);

/// Sets the numeric field at a dotted path ("control.M"). Throws ConfigError
/// when the path does not lead to a number.
void set_numeric(nlohmann::json& doc, const std::string& dotted_path, double value);

}  // namespace swarm
