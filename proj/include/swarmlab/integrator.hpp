#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmlab/control.hpp"
#include "swarmlab/dynamics.hpp"
#include "swarmlab/functionals.hpp"
#include "swarmlab/state.hpp"

namespace swarm {

/// Writes dy/dt at (t, y) into dy.
using VectorField = std::function<void(double t, std::span<const double> y, std::span<double> dy)>;

/// Classical fourth-order Runge-Kutta step with a reusable workspace.
class Rk4Stepper {
 public:
  explicit Rk4Stepper(std::size_t n) : k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}
  /// Advances y in place. Throws NumericalBlowup on a non-finite stage.
  void step(const VectorField& f, double t, std::span<double> y, double h);

 private:
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

std::vector<double> rk4_step(const VectorField& f, double t, std::span<const double> y, double h);

struct SimConfig {
  double h = 1e-3;
  double t_end = 50.0;
  int record_stride = 1;
  bool stop_on_region_entry = false;
  /// Switch external control off for good once the region is entered.
  bool release_control_on_region_entry = false;
  double divergence_radius = 1e8;
  double collision_floor = 1e-6;
  /// Stop early once V drops to this level (alignment models only).
  std::optional<double> stop_below_V;

  void validate() const;
  bool operator==(const SimConfig&) const = default;
};

enum class EventKind { region_entry, divergence, collision, blowup, end };
const char* event_name(EventKind kind);

struct Event {
  double t = 0.0;
  EventKind kind = EventKind::end;
  std::string detail;
};

struct TrajectoryRecord {
  std::string model;
  std::string control;
  int count = 0;
  int dim = 0;
  double budget = 0.0;
  std::vector<double> times;
  std::vector<AgentState> states;
  std::vector<double> X;
  std::vector<double> V;
  std::vector<double> E;  ///< empty unless the model has an energy
  std::vector<std::vector<double>> controls;
  std::vector<double> control_norms;
  std::vector<int> active_agent;  ///< -1 when zero or more than one block is active
  std::vector<Event> events;
  bool admissible = true;
  double max_control_norm = 0.0;
  AgentState final_state;
  double final_time = 0.0;
  double final_X = 0.0;
  double final_V = 0.0;
  std::optional<double> final_E;

  std::optional<double> first_event(EventKind kind) const;
  bool has_event(EventKind kind) const { return first_event(kind).has_value(); }
};

/// Runs the closed loop. Config errors throw; runtime failures (blowup,
/// collision, divergence) end the run with an event.
TrajectoryRecord simulate(const ModelSpec& model, const ControlSpec& control, const AgentState& state0,
                          const SimConfig& cfg);

enum class ConservedQuantity { mean_velocity, energy, arctan_invariant };

/// max_t |Q(t) - Q(0)| over the recorded samples.
double conserved_quantity_check(const TrajectoryRecord& record, ConservedQuantity kind);

/// Functionals of a recorded state as the record reports them (reduced pair
/// models are lifted to their two-agent system).
SpreadFunctionals model_functionals(const ModelSpec& model, const AgentState& state);
std::optional<double> model_energy(const ModelSpec& model, const AgentState& state);

}  // namespace swarm
