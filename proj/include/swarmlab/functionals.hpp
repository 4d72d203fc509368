#pragma once

#include <span>
#include <vector>

#include "swarmlab/kernels.hpp"
#include "swarmlab/state.hpp"

namespace swarm {

/// Symmetric bilinear form B(v, w) = (1/2N^2) sum_{i,j} (v_i - v_j).(w_i - w_j),
/// evaluated through the equivalent O(N) representation (1/N) sum v_i.w_i - vbar.wbar.
double bilinear_b(std::span<const double> v, std::span<const double> w, int count, int dim);

/// Direct O(N^2) pairwise evaluation of B. Used to cross-check the fast path.
double bilinear_b_pairwise(std::span<const double> v, std::span<const double> w, int count, int dim);

struct Decomposition {
  std::vector<double> consensus;  ///< every block equals the mean
  std::vector<double> perp;       ///< zero-mean remainder
};

/// Splits v into its consensus component and its zero-mean component.
Decomposition perp_decompose(std::span<const double> v, int count, int dim);

/// v_i - vbar for every agent.
std::vector<double> perp_part(std::span<const double> v, int count, int dim);

struct SpreadFunctionals {
  double X = 0.0;  ///< B(x, x)
  double V = 0.0;  ///< B(v, v)
};

SpreadFunctionals functionals_xv(const AgentState& state);

/// Kinetic plus pairwise attraction and repulsion energy of an
/// attraction-repulsion state. Each unordered pair contributes its full
/// potential, which makes E conserved by the frictionless uncontrolled flow.
/// Throws SingularConfiguration when two agents are closer than 1e-12.
double total_energy(const AgentState& state, const KernelSpec& a, const RepulsionSpec& f);

struct EnergyParts {
  double kinetic = 0.0;
  double attraction = 0.0;
  double repulsion = 0.0;
  double total() const { return kinetic + attraction + repulsion; }
};

EnergyParts energy_parts(const AgentState& state, const KernelSpec& a, const RepulsionSpec& f);

}  // namespace swarm
