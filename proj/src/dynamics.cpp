#include "swarmlab/dynamics.hpp"

#include <cmath>
#include <string>

#include "swarmlab/error.hpp"
#include "swarmlab/functionals.hpp"

namespace swarm {

namespace {

std::vector<double> copy_or_zero(std::span<const double> u, std::size_t n) {
  if (u.empty()) return std::vector<double>(n, 0.0);
  if (u.size() != n) throw DimensionMismatch("control has " + std::to_string(u.size()) + " entries, expected " +
                                             std::to_string(n));
  return {u.begin(), u.end()};
}

}  // namespace

std::vector<double> graph_rhs(double t, std::span<const double> v, int count, int dim, const WeightFunction& g) {
  check_layout(v, count, dim, "state");
  std::vector<double> dv(v.size(), 0.0);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < count; ++j) {
      const double w = g(t, i, j);
      if (w == 0.0) continue;
      for (int k = 0; k < dim; ++k) dv[i * dim + k] += w * (v[j * dim + k] - v[i * dim + k]);
    }
  }
  return dv;
}

std::vector<double> hk_rhs(std::span<const double> v, int count, int dim, double R) {
  check_layout(v, count, dim, "state");
  if (!(R > 0.0)) throw DomainError("confidence radius must be positive");
  std::vector<double> dv(v.size(), 0.0);
  const double R2 = R * R;
  for (int i = 0; i < count; ++i) {
    const auto vi = v.subspan(i * dim, dim);
    int neighbours = 0;
    for (int j = 0; j < count; ++j) {
      const auto vj = v.subspan(j * dim, dim);
      if (distance_squared(vi, vj) > R2) continue;
      ++neighbours;
      for (int k = 0; k < dim; ++k) dv[i * dim + k] += vj[k] - vi[k];
    }
    for (int k = 0; k < dim; ++k) dv[i * dim + k] /= neighbours;
  }
  return dv;
}

VicsekDerivative vicsek_rhs(std::span<const double> x, std::span<const double> theta, double R, double speed) {
  const int count = static_cast<int>(theta.size());
  check_layout(x, count, 2, "positions");
  VicsekDerivative out{std::vector<double>(x.size()), std::vector<double>(theta.size(), 0.0)};
  const double R2 = R * R;
  for (int i = 0; i < count; ++i) {
    out.dx[2 * i] = speed * std::cos(theta[i]);
    out.dx[2 * i + 1] = speed * std::sin(theta[i]);
    int neighbours = 0;
    for (int j = 0; j < count; ++j) {
      if (distance_squared(x.subspan(2 * i, 2), x.subspan(2 * j, 2)) > R2) continue;
      ++neighbours;
      out.dtheta[i] += theta[j] - theta[i];
    }
    out.dtheta[i] /= neighbours;
  }
  return out;
}

namespace accel {

void alignment(std::span<const double> x, std::span<const double> v, int count, int dim, const KernelSpec& a,
               std::span<double> dv) {
  const double inv_n = 1.0 / count;
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      const double w = inv_n * a.at_distance(std::sqrt(distance_squared(x.subspan(i * dim, dim), x.subspan(j * dim, dim))));
      for (int k = 0; k < dim; ++k) {
        const double diff = w * (v[j * dim + k] - v[i * dim + k]);
        dv[i * dim + k] += diff;
        dv[j * dim + k] -= diff;
      }
    }
  }
}

void attraction_repulsion(double t, std::span<const double> x, std::span<const double> v, int count, int dim,
                          const KernelSpec& a, const RepulsionSpec& f, const FrictionSpec& b, std::span<double> dv) {
  for (int i = 0; i < count; ++i) {
    const double bi = b.coefficient(i, t);
    if (bi != 0.0) {
      for (int k = 0; k < dim; ++k) dv[i * dim + k] -= bi * v[i * dim + k];
    }
  }
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      const double s = distance_squared(x.subspan(i * dim, dim), x.subspan(j * dim, dim));
      if (s < 1e-24) {
        throw SingularConfiguration("agents " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
      // positive w pulls the pair together
      const double w = a.at_squared_distance(s) - f(s);
      for (int k = 0; k < dim; ++k) {
        const double pull = w * (x[j * dim + k] - x[i * dim + k]);
        dv[i * dim + k] += pull;
        dv[j * dim + k] -= pull;
      }
    }
  }
}

}  // namespace accel

StateDerivative cs_rhs(const AgentState& state, const KernelSpec& a, std::span<const double> u) {
  state.validate();
  StateDerivative d{state.v, copy_or_zero(u, state.size())};
  accel::alignment(state.x, state.v, state.count, state.dim, a, d.dv);
  return d;
}

StateDerivative perturbed_cs_rhs(double t, const AgentState& state, const KernelSpec& a, double alpha, double beta,
                                 const PerturbationFn& delta) {
  if (!(alpha >= 0.0 && beta >= 0.0)) throw DomainError("perturbation coefficients must be nonnegative");
  auto d = cs_rhs(state, a);
  const auto perp = perp_part(state.v, state.count, state.dim);
  for (std::size_t k = 0; k < perp.size(); ++k) d.dv[k] -= alpha * perp[k];
  if (beta != 0.0) {
    const auto D = delta(t, state);
    check_layout(D, state.count, state.dim, "perturbation");
    for (std::size_t k = 0; k < D.size(); ++k) d.dv[k] += beta * D[k];
  }
  return d;
}

StateDerivative cd_rhs(double t, const AgentState& state, const KernelSpec& a, const RepulsionSpec& f,
                       const FrictionSpec& b, std::span<const double> u) {
  state.validate();
  StateDerivative d{state.v, copy_or_zero(u, state.size())};
  accel::attraction_repulsion(t, state.x, state.v, state.count, state.dim, a, f, b, d.dv);
  return d;
}

std::string model_name(const ModelSpec& model) {
  static constexpr const char* names[] = {"graph",        "hegselmann_krause", "vicsek",          "cucker_smale",
                                          "perturbed_cs", "cucker_dong",       "reduced_pair_cs", "reduced_pair_cd"};
  return names[model.index()];
}

void validate_model(const ModelSpec& model, const AgentState& state) {
  state.validate();
  if (const auto* m = std::get_if<HegselmannKrauseModel>(&model)) {
    if (!(m->R > 0.0)) throw ConfigError("confidence radius R must be positive");
  } else if (const auto* m = std::get_if<VicsekModel>(&model)) {
    if (!(m->R > 0.0)) throw ConfigError("interaction radius R must be positive");
    if (!(m->speed > 0.0)) throw ConfigError("speed must be positive");
    if (state.dim != 2) throw ConfigError("the heading model is planar (dim = 2)");
    if (state.heading.size() != static_cast<std::size_t>(state.count)) {
      throw ConfigError("the heading model needs one heading per agent");
    }
  } else if (const auto* m = std::get_if<CuckerSmaleModel>(&model)) {
    m->a.validate();
  } else if (const auto* m = std::get_if<PerturbedCsModel>(&model)) {
    m->a.validate();
    if (!m->alpha || !m->beta || !m->delta) throw ConfigError("perturbed model needs alpha, beta and a deviation");
  } else if (const auto* m = std::get_if<CuckerDongModel>(&model)) {
    if (m->a.argument() != KernelArgument::squared_distance) {
      throw ConfigError("attraction kernel must use the squared-distance convention");
    }
    m->a.validate();
    m->f.validate();
    if (state.count > 1 && min_pair_distance(state) < 1e-12) {
      throw ConfigError("initial positions must be pairwise distinct");
    }
  } else if (std::holds_alternative<ReducedPairCs>(model) || std::holds_alternative<ReducedPairCd>(model)) {
    if (state.count != 1 || state.dim != 1) throw ConfigError("reduced pair models use one agent in one dimension");
    if (const auto* m = std::get_if<ReducedPairCd>(&model); m && !(m->beta > 0.0)) {
      throw ConfigError("beta must be positive");
    }
  }
}

KernelSpec reduced_pair_kernel(const ReducedPairCs&) { return KernelSpec::rational(1.0, 1.0, 1.0); }

KernelSpec reduced_pair_kernel(const ReducedPairCd& m) {
  return KernelSpec::rational(0.5, 1.0, m.beta, KernelArgument::squared_distance);
}

AgentState lift_reduced_pair(double x, double v) { return AgentState(1, 2, {x / 2, -x / 2}, {v / 2, -v / 2}); }

}  // namespace swarm
