#include "swarmlab/state.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "swarmlab/error.hpp"

namespace swarm {

AgentState::AgentState(int d, int n) : dim(d), count(n), x(static_cast<std::size_t>(d) * n, 0.0), v(x.size(), 0.0) {
  if (d <= 0 || n <= 0) throw DimensionMismatch("agent state needs positive dimension and count");
}

AgentState::AgentState(int d, int n, std::vector<double> positions, std::vector<double> velocities)
    : dim(d), count(n), x(std::move(positions)), v(std::move(velocities)) {
  validate();
}

void AgentState::validate() const {
  if (dim <= 0 || count <= 0) throw DimensionMismatch("agent state needs positive dimension and count");
  check_layout(x, count, dim, "positions");
  check_layout(v, count, dim, "velocities");
  if (!heading.empty() && heading.size() != static_cast<std::size_t>(count)) {
    throw DimensionMismatch("heading vector must hold one angle per agent");
  }
}

void check_layout(std::span<const double> values, int count, int dim, const char* what) {
  if (count <= 0 || dim <= 0 || values.size() != static_cast<std::size_t>(count) * dim) {
    throw DimensionMismatch(std::string(what) + ": expected " + std::to_string(count) + "x" + std::to_string(dim) +
                            " values, got " + std::to_string(values.size()));
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double distance_squared(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

std::vector<double> mean_vector(std::span<const double> values, int count, int dim) {
  check_layout(values, count, dim, "values");
  std::vector<double> m(static_cast<std::size_t>(dim), 0.0);
  for (int i = 0; i < count; ++i)
    for (int k = 0; k < dim; ++k) m[k] += values[i * dim + k];
  for (double& c : m) c /= count;
  return m;
}

double block_norm_sum(std::span<const double> values, int count, int dim) {
  check_layout(values, count, dim, "values");
  double s = 0.0;
  for (int i = 0; i < count; ++i) s += norm(values.subspan(static_cast<std::size_t>(i) * dim, dim));
  return s;
}

double min_pair_distance(const AgentState& s) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < s.count; ++i)
    for (int j = i + 1; j < s.count; ++j) best = std::min(best, distance_squared(s.pos(i), s.pos(j)));
  return std::sqrt(best);
}

}  // namespace swarm
