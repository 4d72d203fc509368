#include "swarmlab/thresholds.hpp"

#include <cmath>
#include <limits>

#include "swarmlab/error.hpp"
#include "swarmlab/functionals.hpp"
#include "swarmlab/quadrature.hpp"

namespace swarm {

Threshold Threshold::finite(double value) {
  if (!std::isfinite(value) || value < 0.0) throw DomainError("finite threshold must be a nonnegative real");
  return Threshold(value);
}

Threshold Threshold::from_double(double value) {
  if (value == std::numeric_limits<double>::infinity()) return infinite();
  return finite(value);
}

double Threshold::value() const {
  if (!value_) throw DomainError("threshold is infinite");
  return *value_;
}

double Threshold::as_double() const noexcept {
  return value_ ? *value_ : std::numeric_limits<double>::infinity();
}

Threshold Threshold::squared() const { return value_ ? Threshold(*value_ * *value_) : infinite(); }

std::partial_ordering operator<=>(const Threshold& a, const Threshold& b) {
  if (a.is_infinite() || b.is_infinite()) {
    if (a.is_infinite() && b.is_infinite()) return std::partial_ordering::equivalent;
    return a.is_infinite() ? std::partial_ordering::greater : std::partial_ordering::less;
  }
  return *a.value_ <=> *b.value_;
}

Threshold threshold_gamma(double X, const KernelSpec& a, int count) {
  if (!(X >= 0.0)) throw DomainError("threshold functional needs X >= 0");
  if (count <= 0) throw DomainError("threshold functional needs N >= 1");
  const double scale = std::sqrt(2.0 * count);
  const double tail = a.distance_tail_integral(scale * std::sqrt(X));
  return Threshold::from_double(tail / scale);
}

double threshold_gamma_quadrature(double X, const KernelSpec& a, int count) {
  if (!(X >= 0.0)) throw DomainError("threshold functional needs X >= 0");
  const double scale = std::sqrt(2.0 * count);
  const auto est = quad::integrate_to_infinity([&](double r) { return a.at_distance(scale * r); }, std::sqrt(X));
  return quad::looks_divergent(est) ? std::numeric_limits<double>::infinity() : est.value;
}

RegionCertificate cs_region_check(double X0, double V0, const KernelSpec& a, int count) {
  if (!(V0 >= 0.0)) throw DomainError("region check needs V0 >= 0");
  RegionCertificate cert{X0, V0, threshold_gamma(X0, a, count), true};
  cert.inside = cert.threshold.admits(std::sqrt(V0));
  return cert;
}

RegionCertificate cs_region_check_extended(double X0, double V0, const KernelSpec& a, int count, double strength,
                                           const KernelSpec& psi, double eta_sup) {
  if (!(strength >= 0.0)) throw DomainError("feedback strength must be nonnegative");
  if (!(eta_sup > 0.0 && eta_sup <= count)) throw DomainError("eta supremum must lie in (0, N]");
  auto cert = cs_region_check(X0, V0, a, count);
  if (strength == 0.0 || cert.threshold.is_infinite()) return cert;
  const double scale = std::sqrt(2.0 * count);
  const double psi_tail = psi.distance_tail_integral(scale * std::sqrt(X0)) / scale;
  const double extra = strength * count / eta_sup * psi_tail;
  cert.threshold = Threshold::from_double(cert.threshold.value() + extra);
  cert.inside = cert.threshold.admits(std::sqrt(V0));
  return cert;
}

Threshold cd_threshold_vartheta(const KernelSpec& a, int count) {
  if (a.argument() != KernelArgument::squared_distance) {
    throw DomainError("energy threshold is defined for squared-distance kernels");
  }
  if (count <= 1) return Threshold::finite(0.0);
  const double integral = a.raw_integral(0.0, std::numeric_limits<double>::infinity());
  return Threshold::from_double(0.5 * (count - 1) * integral);
}

double condition_b_c(double M, double mean_speed, double energy, double lambda, int count) {
  if (M == 0.0) return 1.0;
  const double root = std::sqrt(energy);
  const double exponent =
      (2.0 * std::sqrt(3.0) / 9.0) * M * std::pow(mean_speed, 3) / (energy * root * (lambda * root + M / count));
  return std::exp(-exponent);
}

ConditionB cd_condition_b_constant(const AgentState& state0, double M, double lambda, const KernelSpec& a,
                                   const RepulsionSpec& f) {
  ConditionB out;
  out.energy = total_energy(state0, a, f);
  out.vartheta = cd_threshold_vartheta(a, state0.count);
  const double mean_speed = norm(mean_vector(state0.v, state0.count, state0.dim));
  if (!(mean_speed > 0.0) || !(out.energy > 0.0)) return out;
  out.c = condition_b_c(M, mean_speed, out.energy, lambda, state0.count);
  if (!out.vartheta.is_infinite()) {
    const double theta = out.vartheta.value();
    out.satisfied = *out.c * theta > out.energy && out.energy > theta;
  }
  return out;
}

}  // namespace swarm
