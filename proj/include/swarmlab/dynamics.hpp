#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "swarmlab/kernels.hpp"
#include "swarmlab/state.hpp"

namespace swarm {

struct StateDerivative {
  std::vector<double> dx;
  std::vector<double> dv;
};

/// Nonnegative interaction weight g_ij(t).
using WeightFunction = std::function<double(double t, int i, int j)>;

/// (dv)_i = sum_j g_ij(t) (v_j - v_i).
std::vector<double> graph_rhs(double t, std::span<const double> v, int count, int dim, const WeightFunction& g);

/// Bounded-confidence averaging over the agents within opinion distance R
/// (the agent itself included).
std::vector<double> hk_rhs(std::span<const double> v, int count, int dim, double R);

struct VicsekDerivative {
  std::vector<double> dx;
  std::vector<double> dtheta;
};

/// Planar constant-speed heading alignment. Headings are not wrapped.
VicsekDerivative vicsek_rhs(std::span<const double> x, std::span<const double> theta, double R, double speed);

/// dx_i = v_i, dv_i = (1/N) sum_j a(|x_i - x_j|)(v_j - v_i) + u_i.
/// An empty `u` means no control.
StateDerivative cs_rhs(const AgentState& state, const KernelSpec& a, std::span<const double> u = {});

/// Deviation Delta_i(t, state) fed into the perturbed alignment model.
using PerturbationFn = std::function<std::vector<double>(double t, const AgentState& state)>;

/// Alignment plus alpha (vbar - v_i) + beta Delta_i, with alpha, beta already evaluated at t.
StateDerivative perturbed_cs_rhs(double t, const AgentState& state, const KernelSpec& a, double alpha, double beta,
                                 const PerturbationFn& delta);

/// Attraction-repulsion model with friction:
/// dv_i = -b_i v_i + sum_j a(|x_ij|^2)(x_j - x_i) + sum_j f(|x_ij|^2)(x_i - x_j) + u_i.
/// Throws SingularConfiguration when two agents coincide.
StateDerivative cd_rhs(double t, const AgentState& state, const KernelSpec& a, const RepulsionSpec& f,
                       const FrictionSpec& b, std::span<const double> u = {});

/// In-place building blocks used by the integrator. Each adds its term to `dv`.
namespace accel {
void alignment(std::span<const double> x, std::span<const double> v, int count, int dim, const KernelSpec& a,
               std::span<double> dv);
void attraction_repulsion(double t, std::span<const double> x, std::span<const double> v, int count, int dim,
                          const KernelSpec& a, const RepulsionSpec& f, const FrictionSpec& b, std::span<double> dv);
}  // namespace accel

struct GraphModel {
  WeightFunction g;
};
struct HegselmannKrauseModel {
  double R = 1.0;
};
struct VicsekModel {
  double R = 1.0;
  double speed = 1.0;
};
struct CuckerSmaleModel {
  KernelSpec a;
};
struct PerturbedCsModel {
  KernelSpec a;
  std::function<double(double)> alpha;
  std::function<double(double)> beta;
  PerturbationFn delta;
};
struct CuckerDongModel {
  KernelSpec a;
  RepulsionSpec f;
  FrictionSpec b;
};
/// Relative coordinates of two aligning agents: x' = v, v' = -v / (1 + x^2).
/// Stored as a single agent in one dimension.
struct ReducedPairCs {};
/// Relative coordinates of two attracting agents without repulsion:
/// x' = v, v' = -x / (1 + x^2)^beta.
struct ReducedPairCd {
  double beta = 2.0;
};

using ModelSpec = std::variant<GraphModel, HegselmannKrauseModel, VicsekModel, CuckerSmaleModel, PerturbedCsModel,
                               CuckerDongModel, ReducedPairCs, ReducedPairCd>;

std::string model_name(const ModelSpec& model);

/// Throws ConfigError when parameters or the initial state do not fit the model.
void validate_model(const ModelSpec& model, const AgentState& state);

/// Kernel of the two-agent system the reduced models stand for: the full
/// pair with this kernel has exactly the reduced relative dynamics.
KernelSpec reduced_pair_kernel(const ReducedPairCs&);
KernelSpec reduced_pair_kernel(const ReducedPairCd& m);

/// Two-agent state (x/2, -x/2), (v/2, -v/2) in one dimension.
AgentState lift_reduced_pair(double x, double v);

}  // namespace swarm
