#include "swarmlab/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "swarmlab/error.hpp"
#include "swarmlab/functionals.hpp"
#include "swarmlab/thresholds.hpp"

namespace swarm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kTieTolerance * std::max(std::abs(a), std::abs(b));
}

std::vector<double> block_norms(std::span<const double> values, int count, int dim) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[i] = norm(values.subspan(static_cast<std::size_t>(i) * dim, dim));
  return out;
}

// Random weights on the simplex (flat Dirichlet).
std::vector<double> simplex_point(int n, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (double& x : w) total += (x = expo(rng));
  for (double& x : w) x /= total;
  return w;
}

double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace

PartitionLabel classify_magnitudes(std::span<const double> magnitudes, double threshold) {
  if (magnitudes.empty()) throw DimensionMismatch("no agents to classify");
  const double top = *std::max_element(magnitudes.begin(), magnitudes.end());
  PartitionLabel label;
  if (std::isinf(threshold)) return label;
  if (top < threshold && !nearly_equal(top, threshold)) return label;
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    if (nearly_equal(magnitudes[i], top)) label.argmax.push_back(static_cast<int>(i));
  }
  if (nearly_equal(top, threshold)) {
    label.value = Partition::P2;
  } else {
    label.value = label.argmax.size() == 1 ? Partition::P3 : Partition::P4;
  }
  return label;
}

PartitionLabel classify_partition_cs(const AgentState& state, const KernelSpec& a) {
  const auto fv = functionals_xv(state);
  const auto perp = perp_part(state.v, state.count, state.dim);
  const double threshold = threshold_gamma(fv.X, a, state.count).squared().as_double();
  return classify_magnitudes(block_norms(perp, state.count, state.dim), threshold);
}

PartitionLabel classify_partition_cd(const AgentState& state, double eta) {
  if (!(eta >= 0.0)) throw DomainError("eta must be nonnegative");
  state.validate();
  return classify_magnitudes(block_norms(state.v, state.count, state.dim), eta);
}

std::vector<double> total_control(const AgentState& state, double alpha, double M, double V0) {
  if (!(alpha >= 0.0)) throw ConfigError("total control gain must be nonnegative");
  if (V0 > 0.0 && alpha > M / (state.count * std::sqrt(V0)) * (1.0 + 1e-12)) {
    throw ConfigError("total control gain " + std::to_string(alpha) + " exceeds M/(N sqrt(V0)) = " +
                      std::to_string(M / (state.count * std::sqrt(V0))));
  }
  auto u = perp_part(state.v, state.count, state.dim);
  for (double& c : u) c *= -alpha;
  return u;
}

std::vector<double> sparse_control_cs(const AgentState& state, double M, const KernelSpec& a) {
  std::vector<double> u(state.size(), 0.0);
  const auto label = classify_partition_cs(state, a);
  if (label.value == Partition::P1 || label.value == Partition::P2) return u;
  const int j = label.argmax.front();
  const auto perp = perp_part(state.v, state.count, state.dim);
  const auto pj = std::span<const double>(perp).subspan(static_cast<std::size_t>(j) * state.dim, state.dim);
  const double n = norm(pj);
  if (n < kZeroDirection) return u;
  for (int k = 0; k < state.dim; ++k) u[j * state.dim + k] = -M * pj[k] / n;
  return u;
}

bool variational_membership_cs(std::span<const double> u, const AgentState& state, double M, const KernelSpec& a) {
  check_layout(u, state.count, state.dim, "control");
  const int d = state.dim;
  const double tol = 1e-9 * std::max(1.0, M);
  const auto perp = perp_part(state.v, state.count, d);
  std::vector<double> eps(static_cast<std::size_t>(state.count), 0.0);
  for (int i = 0; i < state.count; ++i) {
    const auto pi = std::span<const double>(perp).subspan(static_cast<std::size_t>(i) * d, d);
    const auto ui = u.subspan(static_cast<std::size_t>(i) * d, d);
    const double n = norm(pi);
    if (n < kZeroDirection) {
      if (norm(ui) > tol) return false;
      continue;
    }
    // u_i must be a nonnegative multiple of -perp_i
    eps[i] = -dot(ui, pi) / n;
    if (eps[i] < -tol) return false;
    double residual = 0.0;
    for (int k = 0; k < d; ++k) residual += std::pow(ui[k] + eps[i] * pi[k] / n, 2);
    if (std::sqrt(residual) > tol) return false;
  }
  double total = 0.0;
  for (double e : eps) total += e;
  if (total > M + tol) return false;

  const auto label = classify_partition_cs(state, a);
  auto outside_support_is_zero = [&] {
    for (int i = 0; i < state.count; ++i) {
      if (std::find(label.argmax.begin(), label.argmax.end(), i) == label.argmax.end() && eps[i] > tol) return false;
    }
    return true;
  };
  switch (label.value) {
    case Partition::P1:
      return total <= tol;
    case Partition::P2:
      return outside_support_is_zero();
    case Partition::P3:
      return outside_support_is_zero() && std::abs(eps[label.argmax.front()] - M) <= tol;
    case Partition::P4:
      return outside_support_is_zero() && std::abs(total - M) <= tol;
  }
  return false;
}

bool sparse_optimality_check_cs(const AgentState& state, double M, const KernelSpec& a, int samples,
                                std::mt19937_64& rng) {
  const auto label = classify_partition_cs(state, a);
  if (label.value != Partition::P1 && label.value != Partition::P3) {
    throw DomainError("optimality check needs a state with no or a unique maximizer above threshold");
  }
  const int N = state.count, d = state.dim;
  const auto u_sparse = sparse_control_cs(state, M, a);
  const double best = bilinear_b(u_sparse, state.v, N, d);
  if (label.value == Partition::P1) return true;

  const auto perp = perp_part(state.v, N, d);
  const auto norms = block_norms(perp, N, d);
  std::vector<double> u(state.size());
  auto beats_sparse = [&] { return bilinear_b(u, state.v, N, d) < best - 1e-12; };

  // total control scaled onto the budget
  const double spread = block_norm_sum(perp, N, d);
  if (spread > 0.0) {
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = -M * perp[k] / spread;
    if (beats_sparse()) return false;
  }
  for (int s = 0; s < samples; ++s) {
    const auto w = simplex_point(N, rng);
    const double mass = M * uniform01(rng);
    for (int i = 0; i < N; ++i) {
      for (int k = 0; k < d; ++k) {
        u[i * d + k] = norms[i] < kZeroDirection ? 0.0 : -mass * w[i] * perp[i * d + k] / norms[i];
      }
    }
    if (beats_sparse()) return false;
  }
  return true;
}

std::vector<double> delta_leader(const AgentState& state, double p, double q) {
  if (!(p > 1.0 && q > 1.0) || std::isinf(p) || std::isinf(q) || std::abs(1.0 / p + 1.0 / q - 1.0) > 1e-12) {
    throw ConfigError("leader exponents need p, q > 1 finite with 1/p + 1/q = 1");
  }
  const int d = state.dim;
  const auto perp = perp_part(state.v, state.count, d);
  std::vector<double> D(perp.size());
  for (int i = 0; i < state.count; ++i)
    for (int k = 0; k < d; ++k) D[i * d + k] = perp[i * d + k] / p + perp[k] / q;
  return D;
}

std::vector<double> delta_structured(const AgentState& state, const std::function<double(double)>& phi,
                                     EtaMode mode) {
  state.validate();
  const int N = state.count, d = state.dim;
  std::vector<double> w(static_cast<std::size_t>(N) * N);
  std::vector<double> eta(static_cast<std::size_t>(N), 0.0);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const double r = std::sqrt(distance_squared(state.pos(i), state.pos(j)));
      const double value = phi(r);
      if (!(value > 0.0) || !std::isfinite(value)) {
        throw ConfigError("structured weight must be positive, got " + std::to_string(value) + " at distance " +
                          std::to_string(r));
      }
      w[i * N + j] = value;
      eta[i] += value;
    }
  }
  if (mode == EtaMode::max_normalized) std::fill(eta.begin(), eta.end(), *std::max_element(eta.begin(), eta.end()));
  const auto perp = perp_part(state.v, N, d);
  std::vector<double> D(perp.size(), 0.0);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < d; ++k) D[i * d + k] += w[i * N + j] / eta[i] * perp[j * d + k];
  return D;
}

double local_average_eta(const AgentState& state, double R) {
  state.validate();
  if (!(R >= 0.0)) throw DomainError("local radius must be nonnegative");
  if (std::isinf(R)) return state.count;
  int best = 0;
  for (int i = 0; i < state.count; ++i) {
    int inside = 0;
    for (int k = 0; k < state.count; ++k) inside += distance_squared(state.pos(i), state.pos(k)) <= R * R;
    best = std::max(best, inside);
  }
  return best;
}

std::vector<double> delta_local_average(const AgentState& state, double R) {
  const double eta = local_average_eta(state, R);
  const int d = state.dim;
  std::vector<double> D(state.size(), 0.0);
  if (std::isinf(R)) return D;
  for (int i = 0; i < state.count; ++i) {
    for (int j = 0; j < state.count; ++j) {
      if (distance_squared(state.pos(i), state.pos(j)) <= R * R) continue;
      for (int k = 0; k < d; ++k) D[i * d + k] += (state.v[i * d + k] - state.v[j * d + k]) / eta;
    }
  }
  return D;
}

std::vector<double> sparse_control_cd_at_energy(const AgentState& state, double energy, double M, double E0,
                                                double eps) {
  if (!(E0 > 0.0)) throw ConfigError("initial energy must be positive");
  if (!(eps >= 0.0) || eps > M / E0 * (1.0 + 1e-12)) {
    throw ConfigError("epsilon must lie in [0, M/E(0)] = [0, " + std::to_string(M / E0) + "]");
  }
  std::vector<double> u(state.size(), 0.0);
  const auto label = classify_partition_cd(state, 0.0);
  if (label.argmax.empty()) return u;
  const int j = label.argmax.front();
  const auto vj = state.vel(j);
  const double n = norm(vj);
  if (n < kZeroDirection) return u;
  for (int k = 0; k < state.dim; ++k) u[j * state.dim + k] = -eps * energy * vj[k] / n;
  return u;
}

std::vector<double> sparse_control_cd(const AgentState& state, double M, double E0, double eps, const KernelSpec& a,
                                      const RepulsionSpec& f) {
  return sparse_control_cd_at_energy(state, total_energy(state, a, f), M, E0, eps);
}

double j_functional(std::span<const double> u, const AgentState& state, double eta) {
  check_layout(u, state.count, state.dim, "control");
  return dot(state.v, u) + eta * block_norm_sum(u, state.count, state.dim);
}

JMinimum j_functional_minimize_at_energy(const AgentState& state, double energy, double M, double E0, double eta,
                                         int samples, std::mt19937_64& rng) {
  if (!(E0 > 0.0)) throw ConfigError("initial energy must be positive");
  const int N = state.count, d = state.dim;
  const double budget = M * energy / E0;
  JMinimum out;
  out.u.assign(state.size(), 0.0);
  const auto label = classify_partition_cd(state, eta);
  if (label.value == Partition::P3 || label.value == Partition::P4) {
    const int j = label.argmax.front();
    const double n = norm(state.vel(j));
    for (int k = 0; k < d; ++k) out.u[j * d + k] = -budget * state.vel(j)[k] / n;
  }
  out.value = j_functional(out.u, state, eta);

  std::normal_distribution<double> gauss;
  std::vector<double> u(state.size()), dir(static_cast<std::size_t>(d));
  out.best_sampled = kInf;
  for (int s = 0; s < samples; ++s) {
    const auto w = simplex_point(N, rng);
    const double mass = budget * uniform01(rng);
    const bool along_velocity = s % 2 == 0;
    for (int i = 0; i < N; ++i) {
      const double speed = norm(state.vel(i));
      for (int k = 0; k < d; ++k) {
        dir[k] = gauss(rng);
        if (along_velocity && speed > 0.0) dir[k] = -state.vel(i)[k] / speed + 0.1 * dir[k];
      }
      const double dn = norm(dir);
      for (int k = 0; k < d; ++k) u[i * d + k] = dn > 0.0 ? mass * w[i] * dir[k] / dn : 0.0;
    }
    out.best_sampled = std::min(out.best_sampled, j_functional(u, state, eta));
  }
  out.verified = samples == 0 || out.best_sampled >= out.value - 1e-9;
  return out;
}

JMinimum j_functional_minimize(const AgentState& state, double M, double E0, double eta, const KernelSpec& a,
                               const RepulsionSpec& f, int samples, std::mt19937_64& rng) {
  return j_functional_minimize_at_energy(state, total_energy(state, a, f), M, E0, eta, samples, rng);
}

double ControlSpec::budget() const {
  if (const auto* c = std::get_if<TotalControl>(&law)) return c->M;
  if (const auto* c = std::get_if<SparseCsControl>(&law)) return c->M;
  if (const auto* c = std::get_if<SparseCdControl>(&law)) return c->M;
  if (std::holds_alternative<NoControl>(law)) return 0.0;
  return kInf;
}

bool ControlSpec::is_external() const {
  return std::holds_alternative<TotalControl>(law) || std::holds_alternative<SparseCsControl>(law) ||
         std::holds_alternative<SparseCdControl>(law);
}

void ControlSpec::validate() const {
  if (!(sample_hold_dt >= 0.0)) throw ConfigError("sample_hold_dt must be nonnegative");
  auto nonneg = [](double value, const char* name) {
    if (!(value >= 0.0)) throw ConfigError(std::string(name) + " must be nonnegative");
  };
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, TotalControl>) {
          nonneg(c.alpha, "alpha");
          nonneg(c.M, "M");
        } else if constexpr (std::is_same_v<T, SparseCsControl>) {
          nonneg(c.M, "M");
        } else if constexpr (std::is_same_v<T, SparseCdControl>) {
          nonneg(c.M, "M");
          nonneg(c.eta, "eta");
          if (c.epsilon) nonneg(*c.epsilon, "epsilon");
        } else if constexpr (std::is_same_v<T, LeaderControl>) {
          nonneg(c.gamma, "gamma");
          if (!(c.p > 1.0 && c.q > 1.0) || std::isinf(c.p) || std::isinf(c.q) ||
              std::abs(1.0 / c.p + 1.0 / c.q - 1.0) > 1e-12) {
            throw ConfigError("leader exponents need p, q > 1 finite with 1/p + 1/q = 1");
          }
        } else if constexpr (std::is_same_v<T, StructuredControl>) {
          nonneg(c.alpha, "alpha");
          nonneg(c.beta, "beta");
          if (!c.phi) throw ConfigError("structured law needs a weight function");
          for (double r : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0}) {
            const double value = c.phi(r);
            if (!(value > 0.0) || !std::isfinite(value)) {
              throw ConfigError("structured weight must be positive, got " + std::to_string(value) +
                                " at distance " + std::to_string(r));
            }
          }
        } else if constexpr (std::is_same_v<T, LocalAverageControl>) {
          nonneg(c.gamma, "gamma");
          nonneg(c.R, "R");
        }
      },
      law);
}

const char* control_name(const ControlSpec& c) {
  static constexpr const char* names[] = {"none",   "total",      "sparse_cs",    "sparse_cd",
                                          "leader", "structured", "local_average"};
  return names[c.law.index()];
}

void add_decentralized_feedback(const ControlSpec::Law& law, std::span<const double> x, std::span<const double> v,
                                int count, int dim, std::span<double> dv) {
  if (!std::holds_alternative<LeaderControl>(law) && !std::holds_alternative<StructuredControl>(law) &&
      !std::holds_alternative<LocalAverageControl>(law)) {
    return;
  }
  const auto vbar = mean_vector(v, count, dim);
  if (const auto* c = std::get_if<LeaderControl>(&law)) {
    // gamma (vbar - v_i) + gamma Delta_i collapses to (gamma/q)(perp_1 - perp_i)
    for (int i = 0; i < count; ++i)
      for (int k = 0; k < dim; ++k) dv[i * dim + k] += c->gamma / c->q * (v[k] - v[i * dim + k]);
    return;
  }
  if (const auto* c = std::get_if<StructuredControl>(&law)) {
    AgentState s(dim, count, {x.begin(), x.end()}, {v.begin(), v.end()});
    const auto D = delta_structured(s, c->phi, c->mode);
    for (int i = 0; i < count; ++i)
      for (int k = 0; k < dim; ++k) dv[i * dim + k] += c->alpha * (vbar[k] - v[i * dim + k]) + c->beta * D[i * dim + k];
    return;
  }
  const auto& c = std::get<LocalAverageControl>(law);
  if (c.gamma == 0.0) return;
  if (std::isinf(c.R)) {
    for (int i = 0; i < count; ++i)
      for (int k = 0; k < dim; ++k) dv[i * dim + k] += c.gamma * (vbar[k] - v[i * dim + k]);
    return;
  }
  // Summed directly as (gamma/eta) sum_j chi(r_ij)(v_j - v_i), the form the
  // mean-field split (N/eta)(vbar - v_i) + Delta_i came from.
  const double R2 = c.R * c.R;
  int eta = 0;
  std::vector<char> near(static_cast<std::size_t>(count) * count);
  for (int i = 0; i < count; ++i) {
    int inside = 0;
    for (int j = 0; j < count; ++j) {
      const bool in = distance_squared(x.subspan(i * dim, dim), x.subspan(j * dim, dim)) <= R2;
      near[i * count + j] = in;
      inside += in;
    }
    eta = std::max(eta, inside);
  }
  const double g = c.gamma / eta;
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < count; ++j)
      if (near[i * count + j])
        for (int k = 0; k < dim; ++k) dv[i * dim + k] += g * (v[j * dim + k] - v[i * dim + k]);
}

}  // namespace swarm
