#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace swarm {

/// Positions and velocities of N agents in R^d, stored agent-major
/// (component k of agent i lives at index i*d + k).
///
/// First-order models (graph dynamics, Hegselmann-Krause) keep their single
/// state variable in `v`; `x` is then unused but still sized N*d.
/// Vicsek runs additionally carry the unwrapped headings in `heading`.
struct AgentState {
  int dim = 1;
  int count = 0;
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> heading;

  AgentState() = default;
  AgentState(int d, int n);
  AgentState(int d, int n, std::vector<double> positions, std::vector<double> velocities);

  std::size_t size() const noexcept { return static_cast<std::size_t>(dim) * count; }

  std::span<const double> pos(int i) const { return {x.data() + i * dim, static_cast<std::size_t>(dim)}; }
  std::span<double> pos(int i) { return {x.data() + i * dim, static_cast<std::size_t>(dim)}; }
  std::span<const double> vel(int i) const { return {v.data() + i * dim, static_cast<std::size_t>(dim)}; }
  std::span<double> vel(int i) { return {v.data() + i * dim, static_cast<std::size_t>(dim)}; }

  /// Throws DimensionMismatch unless x and v hold exactly N vectors of size d.
  void validate() const;

  bool operator==(const AgentState&) const = default;
};

/// Throws DimensionMismatch if `values` cannot be read as N vectors in R^d.
void check_layout(std::span<const double> values, int count, int dim, const char* what);

double norm(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);
double distance_squared(std::span<const double> a, std::span<const double> b);

/// Mean of N vectors in R^d.
std::vector<double> mean_vector(std::span<const double> values, int count, int dim);

/// Sum over agents of the Euclidean norms of the per-agent blocks.
double block_norm_sum(std::span<const double> values, int count, int dim);

/// Smallest pairwise distance; +infinity for fewer than two agents.
double min_pair_distance(const AgentState& s);

}  // namespace swarm
