#pragma once

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "swarmlab/kernels.hpp"
#include "swarmlab/state.hpp"

namespace swarm {

enum class Partition { P1, P2, P3, P4 };

/// Where a state sits relative to a threshold on per-agent magnitudes.
/// `argmax` lists the (tied) maximizers in ascending order for P2-P4.
struct PartitionLabel {
  Partition value = Partition::P1;
  std::vector<int> argmax;
};

/// Relative tolerance for ties between maximizers and with the threshold.
inline constexpr double kTieTolerance = 1e-9;
/// Below this norm a direction is treated as zero.
inline constexpr double kZeroDirection = 1e-14;

/// Four-way label of per-agent magnitudes against `threshold` (may be +inf).
PartitionLabel classify_magnitudes(std::span<const double> magnitudes, double threshold);

/// Labels max_i |v_i - vbar| against gamma(X)^2.
PartitionLabel classify_partition_cs(const AgentState& state, const KernelSpec& a);
/// Labels max_i |v_i| against eta.
PartitionLabel classify_partition_cd(const AgentState& state, double eta);

/// u = -alpha (v - vbar). Throws ConfigError when alpha > M / (N sqrt(V0)).
std::vector<double> total_control(const AgentState& state, double alpha, double M, double V0);

/// Full budget M on the smallest-index agent farthest from the mean, pointing
/// back to it, whenever that distance exceeds gamma(X)^2; zero otherwise.
std::vector<double> sparse_control_cs(const AgentState& state, double M, const KernelSpec& a);

/// True iff u belongs to the minimizer set of B(u, v) + gamma/N sum |u_i|
/// under the budget M, judged by the pattern the state's partition demands.
bool variational_membership_cs(std::span<const double> u, const AgentState& state, double M, const KernelSpec& a);

/// Compares B(u_sparse, v) with B(u, v) for `samples` random controls of the
/// form u_i = -eps_i (v_i - vbar)/|v_i - vbar|, sum eps_i <= M. The state must
/// be in P1 or P3.
bool sparse_optimality_check_cs(const AgentState& state, double M, const KernelSpec& a, int samples,
                                std::mt19937_64& rng);

/// Delta_i = (1/p)(v_i - vbar) + (1/q)(v_1 - vbar): every agent also listens to agent 0.
std::vector<double> delta_leader(const AgentState& state, double p, double q);

enum class EtaMode { per_agent, max_normalized };

/// Delta_i = sum_j phi(|x_i - x_j|)/eta_i (v_j - vbar).
std::vector<double> delta_structured(const AgentState& state, const std::function<double(double)>& phi, EtaMode mode);

/// max_i #{k : |x_i - x_k| <= R}.
double local_average_eta(const AgentState& state, double R);

/// Delta_i = (1/eta_R) sum_j [|x_i - x_j| > R] (v_i - v_j).
std::vector<double> delta_local_average(const AgentState& state, double R);

/// Budget -eps E v_i/|v_i| on the smallest-index fastest agent.
/// Throws ConfigError when eps > M / E0.
std::vector<double> sparse_control_cd(const AgentState& state, double M, double E0, double eps, const KernelSpec& a,
                                      const RepulsionSpec& f);
/// Same law with the current energy supplied by the caller.
std::vector<double> sparse_control_cd_at_energy(const AgentState& state, double energy, double M, double E0,
                                                double eps);

/// J(u, v) = v.u + eta sum |u_i|.
double j_functional(std::span<const double> u, const AgentState& state, double eta);

struct JMinimum {
  std::vector<double> u;
  double value = 0.0;
  double best_sampled = 0.0;  ///< smallest J among the random members of K
  bool verified = false;      ///< no sample beat `value` by more than 1e-9
};

/// Closed-form minimizer of J over K = {sum |u_i| <= M E / E0}, checked
/// against `samples` random points of K.
JMinimum j_functional_minimize(const AgentState& state, double M, double E0, double eta, const KernelSpec& a,
                               const RepulsionSpec& f, int samples, std::mt19937_64& rng);
JMinimum j_functional_minimize_at_energy(const AgentState& state, double energy, double M, double E0, double eta,
                                         int samples, std::mt19937_64& rng);

struct NoControl {};
struct TotalControl {
  double alpha = 0.0;
  double M = 0.0;
};
struct SparseCsControl {
  double M = 0.0;
};
struct SparseCdControl {
  double M = 0.0;
  std::optional<double> epsilon;  ///< defaults to M / E(0)
  double eta = 0.0;
};
struct LeaderControl {
  double gamma = 0.0;
  double p = 2.0;
  double q = 2.0;
};
struct StructuredControl {
  double alpha = 0.0;
  double beta = 0.0;
  std::function<double(double)> phi;
  EtaMode mode = EtaMode::per_agent;
};
struct LocalAverageControl {
  double gamma = 0.0;
  double R = 0.0;  ///< may be +infinity
};

struct ControlSpec {
  using Law = std::variant<NoControl, TotalControl, SparseCsControl, SparseCdControl, LeaderControl, StructuredControl,
                           LocalAverageControl>;
  Law law = NoControl{};
  /// Recompute period of external feedback; 0 means every step.
  double sample_hold_dt = 0.0;

  /// Budget of the law; +inf for the decentralized ones.
  double budget() const;
  /// External laws are sampled and held; decentralized feedback is part of the vector field.
  bool is_external() const;
  void validate() const;
};

const char* control_name(const ControlSpec& c);

/// Adds the decentralized feedback term of `law` (leader, structured, local
/// average) to dv. Other laws add nothing.
void add_decentralized_feedback(const ControlSpec::Law& law, std::span<const double> x, std::span<const double> v,
                                int count, int dim, std::span<double> dv);

}  // namespace swarm
