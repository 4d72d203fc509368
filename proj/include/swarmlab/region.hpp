#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "swarmlab/control.hpp"
#include "swarmlab/dynamics.hpp"
#include "swarmlab/integrator.hpp"
#include "swarmlab/kernels.hpp"
#include "swarmlab/state.hpp"

namespace swarm {

/// Rescales a raw draw so that B(x, x) = X0 and B(v, v) = V0.
/// Throws DomainError when the draw has no spread but a positive target is requested.
AgentState rescale_to(const AgentState& raw, double X0, double V0);

/// Uniform in [-1, 1] from the top 53 bits of one generator output
/// (portable, unlike std::uniform_real_distribution).
double uniform_pm1(std::mt19937_64& rng);

/// Positions and velocities drawn uniformly from [-1, 1]^{dN}.
AgentState draw_uniform_state(int count, int dim, std::mt19937_64& rng);

/// Generator for one trial, derived from (seed, cell, trial).
std::mt19937_64 trial_generator(std::uint64_t seed, std::uint64_t cell, std::uint64_t trial);

/// Draws and rescales, regenerating degenerate draws up to 100 times.
AgentState draw_rescaled(int count, int dim, double X0, double V0, std::mt19937_64& rng);

struct TrialSetup {
  ModelSpec model;
  ControlSpec control;
  SimConfig cfg;
  int count = 2;
  int dim = 2;
  double success_V = 1e-5;
};

/// Default trial horizon: t_end = 100, early exit at V <= 1e-6.
SimConfig default_trial_config();

struct TrialOutcome {
  int trials = 0;
  int successes = 0;
  int blowups = 0;
};

TrialOutcome run_trials(double X0, double V0, const TrialSetup& setup, int trials, std::uint64_t seed,
                        std::uint64_t cell = 0);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};
/// 95% Wilson score interval for a binomial proportion.
WilsonInterval wilson_interval(int successes, int trials, double z = 1.959963984540054);

struct GridCell {
  int trials = 0;
  int successes = 0;
  int blowups = 0;
  double probability = 0.0;
  WilsonInterval wilson;
};

struct RegionGrid {
  std::vector<double> X0;
  std::vector<double> V0;
  /// Indexed cell(i, j) with i along X0 and j along V0.
  std::vector<GridCell> cells;

  GridCell& cell(std::size_t i, std::size_t j) { return cells[i * V0.size() + j]; }
  const GridCell& cell(std::size_t i, std::size_t j) const { return cells[i * V0.size() + j]; }
  double probability(std::size_t i, std::size_t j) const { return cell(i, j).probability; }
};

/// n evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

/// Fills every cell with `trials` runs, spreading cells over `jobs` threads.
/// The result does not depend on `jobs`.
RegionGrid probability_grid(const std::vector<double>& X0_axis, const std::vector<double>& V0_axis,
                            const TrialSetup& setup, int trials, std::uint64_t seed, int jobs = 1);

struct BoundaryVariant {
  /// Local-average feedback parameters; strength 0 gives the uncontrolled region.
  double strength = 0.0;
  double R = 0.0;
};

/// V0*(X0) = threshold(X0)^2 on the axis; +inf where everything is inside.
std::vector<double> theoretical_boundary(const std::vector<double>& X0_axis, const KernelSpec& a, int count,
                                         BoundaryVariant variant = {});

struct ContourPoint {
  double X0 = 0.0;
  double V0 = 0.0;
};
using Polyline = std::vector<ContourPoint>;

/// Marching-squares isolines of the probability field at `level`.
/// Ambiguous cells are resolved by the average of their four corners.
std::vector<Polyline> contour_extract(const RegionGrid& grid, double level = 0.8);

/// Area of {probability >= level} under bilinear interpolation, estimated by
/// sampling every cell on a `sub` x `sub` lattice.
double superlevel_area(const RegionGrid& grid, double level, int sub = 32);

}  // namespace swarm
