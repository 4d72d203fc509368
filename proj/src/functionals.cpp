#include "swarmlab/functionals.hpp"

#include <cmath>

#include "swarmlab/error.hpp"
#include "swarmlab/quadrature.hpp"

namespace swarm {

double bilinear_b(std::span<const double> v, std::span<const double> w, int count, int dim) {
  check_layout(v, count, dim, "v");
  check_layout(w, count, dim, "w");
  const auto vbar = mean_vector(v, count, dim);
  const auto wbar = mean_vector(w, count, dim);
  // Centre first so the subtraction does not cancel catastrophically.
  double s = 0.0;
  for (int i = 0; i < count; ++i)
    for (int k = 0; k < dim; ++k) s += (v[i * dim + k] - vbar[k]) * (w[i * dim + k] - wbar[k]);
  return s / count;
}

double bilinear_b_pairwise(std::span<const double> v, std::span<const double> w, int count, int dim) {
  check_layout(v, count, dim, "v");
  check_layout(w, count, dim, "w");
  double s = 0.0;
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < count; ++j)
      for (int k = 0; k < dim; ++k) s += (v[i * dim + k] - v[j * dim + k]) * (w[i * dim + k] - w[j * dim + k]);
  return s / (2.0 * count * count);
}

Decomposition perp_decompose(std::span<const double> v, int count, int dim) {
  const auto vbar = mean_vector(v, count, dim);
  Decomposition out{std::vector<double>(v.size()), std::vector<double>(v.size())};
  for (int i = 0; i < count; ++i)
    for (int k = 0; k < dim; ++k) {
      out.consensus[i * dim + k] = vbar[k];
      out.perp[i * dim + k] = v[i * dim + k] - vbar[k];
    }
  return out;
}

std::vector<double> perp_part(std::span<const double> v, int count, int dim) {
  return perp_decompose(v, count, dim).perp;
}

SpreadFunctionals functionals_xv(const AgentState& state) {
  state.validate();
  return {bilinear_b(state.x, state.x, state.count, state.dim), bilinear_b(state.v, state.v, state.count, state.dim)};
}

EnergyParts energy_parts(const AgentState& state, const KernelSpec& a, const RepulsionSpec& f) {
  state.validate();
  EnergyParts e;
  for (int i = 0; i < state.count; ++i) e.kinetic += dot(state.vel(i), state.vel(i));
  for (int i = 0; i < state.count; ++i) {
    for (int j = i + 1; j < state.count; ++j) {
      const double s = distance_squared(state.pos(i), state.pos(j));
      if (s < 1e-24) {
        throw SingularConfiguration("agents " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
      e.attraction += a.argument() == KernelArgument::squared_distance
                          ? a.raw_integral(0.0, s)
                          : quad::integrate([&a](double r) { return a.at_squared_distance(r); }, 0.0, s).value;
      e.repulsion += f.tail_integral(s);
    }
  }
  return e;
}

double total_energy(const AgentState& state, const KernelSpec& a, const RepulsionSpec& f) {
  return energy_parts(state, a, f).total();
}

}  // namespace swarm
