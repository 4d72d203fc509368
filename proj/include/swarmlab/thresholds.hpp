#pragma once

#include <compare>
#include <optional>

#include "swarmlab/kernels.hpp"
#include "swarmlab/state.hpp"

namespace swarm {

/// A nonnegative threshold that may be +infinity (non-integrable kernels).
class Threshold {
 public:
  static Threshold finite(double value);
  static Threshold infinite() { return Threshold(); }
  /// +infinity maps to `infinite()`.
  static Threshold from_double(double value);

  bool is_infinite() const noexcept { return !value_; }
  /// Throws DomainError when infinite.
  double value() const;
  /// +infinity for infinite thresholds.
  double as_double() const noexcept;

  /// q <= threshold.
  bool admits(double q) const noexcept { return is_infinite() || q <= *value_; }

  Threshold squared() const;

  friend bool operator==(const Threshold&, const Threshold&) = default;
  friend std::partial_ordering operator<=>(const Threshold& a, const Threshold& b);

 private:
  Threshold() = default;
  explicit Threshold(double v) : value_(v) {}
  std::optional<double> value_;
};

/// gamma(X) = integral over [sqrt(X), inf) of a(sqrt(2N) r) dr.
Threshold threshold_gamma(double X, const KernelSpec& a, int count);

/// Evaluates the same tail integral by adaptive quadrature only, bypassing
/// closed forms. Returns +infinity when the quadrature does not settle.
double threshold_gamma_quadrature(double X, const KernelSpec& a, int count);

struct RegionCertificate {
  double X0 = 0.0;
  double V0 = 0.0;
  Threshold threshold = Threshold::infinite();
  bool inside = true;
};

/// Sufficient condition for autonomous consensus: sqrt(V0) <= gamma(X0).
RegionCertificate cs_region_check(double X0, double V0, const KernelSpec& a, int count);

/// Enlarged region under the local-average feedback of strength `strength`:
/// gamma(X0) + (strength N / eta_sup) * integral of psi(sqrt(2N) r) over
/// [sqrt(X0), inf) >= sqrt(V0). `psi` is a [0,1]-valued nonincreasing
/// function given as a kernel (indicator for the ball of radius R).
RegionCertificate cs_region_check_extended(double X0, double V0, const KernelSpec& a, int count, double strength,
                                           const KernelSpec& psi, double eta_sup);

/// Critical total-energy level ((N-1)/2) * integral of a over [0, inf),
/// a taken in the squared-distance convention.
Threshold cd_threshold_vartheta(const KernelSpec& a, int count);

struct ConditionB {
  std::optional<double> c;  ///< empty when the mean velocity vanishes
  bool satisfied = false;
  double energy = 0.0;
  Threshold vartheta = Threshold::infinite();
};

/// Diagnostic for the energy window c * vartheta > E(0) > vartheta that
/// guarantees sparse stabilization of the attraction-repulsion model.
ConditionB cd_condition_b_constant(const AgentState& state0, double M, double lambda, const KernelSpec& a,
                                   const RepulsionSpec& f);

/// The c constant itself; exposed for independent re-evaluation in tests.
double condition_b_c(double M, double mean_speed, double energy, double lambda, int count);

}  // namespace swarm
