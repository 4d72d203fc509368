#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace swarm {

/// Which quantity an interaction kernel is evaluated at.
/// Alignment models use a(|x_i - x_j|); the attraction-repulsion model uses
/// a(|x_i - x_j|^2).
enum class KernelArgument { distance, squared_distance };

/// H / (sigma^2 + r^2)^beta under the distance convention,
/// H / (sigma^2 + r)^beta under the squared-distance convention.
struct RationalKernel {
  double H = 1.0;
  double sigma = 1.0;
  double beta = 1.0;
};

/// 1 on [0, R], 0 beyond. R may be +infinity.
struct IndicatorKernel {
  double R = 1.0;
};

/// M on [0, R] followed by a decreasing integrable tail with tail(R) = M.
/// Without an explicit tail the exponential M exp(-(M/eps)(r - R)) is used,
/// whose integral over [R, inf) is `tail_integral` = eps.
struct PlateauKernel {
  double M = 1.0;
  double R = 1.0;
  double tail_integral = 1.0;
  std::function<double(double)> tail;
};

/// Piecewise-linear interpolation through (r_k, a_k); constant past the last node.
struct TabulatedKernel {
  std::vector<double> r;
  std::vector<double> a;
};

struct CustomKernel {
  std::function<double(double)> fn;
  std::string name = "custom";
};

class KernelSpec {
 public:
  using Family = std::variant<RationalKernel, IndicatorKernel, PlateauKernel, TabulatedKernel, CustomKernel>;

  KernelSpec() = default;
  KernelSpec(Family family, KernelArgument argument);

  static KernelSpec rational(double H, double sigma, double beta,
                             KernelArgument argument = KernelArgument::distance);
  static KernelSpec indicator(double R, KernelArgument argument = KernelArgument::distance);
  static KernelSpec plateau(double M, double R, double tail_integral,
                            KernelArgument argument = KernelArgument::distance);
  static KernelSpec tabulated(std::vector<double> r, std::vector<double> a,
                              KernelArgument argument = KernelArgument::distance);
  static KernelSpec custom(std::function<double(double)> fn, KernelArgument argument = KernelArgument::distance);

  /// Kernel value at its raw argument (distance or squared distance, per convention).
  double operator()(double arg) const;
  /// Kernel value for two agents at Euclidean distance `d`.
  double at_distance(double d) const;
  /// Kernel value for two agents at squared distance `s`.
  double at_squared_distance(double s) const;

  /// Integral of the raw kernel over [lo, hi]; hi may be +infinity.
  /// Returns +infinity for a divergent tail.
  double raw_integral(double lo, double hi) const;

  /// Integral of `at_distance(u)` over [d0, +infinity). +infinity when divergent.
  double distance_tail_integral(double d0) const;

  /// Throws ConfigError on invalid parameters or a sampled violation of
  /// nonnegativity / monotonicity.
  void validate() const;

  const Family& family() const noexcept { return family_; }
  KernelArgument argument() const noexcept { return argument_; }

 private:
  Family family_{RationalKernel{}};
  KernelArgument argument_ = KernelArgument::distance;
};

struct PowerLawRepulsion {
  double p = 2.0;
};
struct NoRepulsion {};
struct CustomRepulsion {
  std::function<double(double)> fn;
};

/// Repulsion f evaluated at squared distance; f(r) = r^-p by default.
class RepulsionSpec {
 public:
  using Family = std::variant<NoRepulsion, PowerLawRepulsion, CustomRepulsion>;

  RepulsionSpec() = default;
  explicit RepulsionSpec(Family family) : family_(std::move(family)) {}

  static RepulsionSpec none() { return RepulsionSpec(NoRepulsion{}); }
  static RepulsionSpec power_law(double p) { return RepulsionSpec(PowerLawRepulsion{p}); }
  static RepulsionSpec custom(std::function<double(double)> fn) { return RepulsionSpec(CustomRepulsion{std::move(fn)}); }

  double operator()(double s) const;
  /// Integral of f over [s, +infinity), s > 0.
  double tail_integral(double s) const;

  /// p > 1 for power laws; custom tails must be finite at delta in {0.1, 1, 10}.
  void validate() const;

  const Family& family() const noexcept { return family_; }

 private:
  Family family_{NoRepulsion{}};
};

/// Per-agent friction coefficients b_i(t) in [0, Lambda].
struct FrictionSpec {
  double lambda = 0.0;
  /// Empty means b_i == 0 for every agent. A single entry applies to all agents.
  std::vector<std::function<double(double)>> b;

  double coefficient(int agent, double t) const;
  /// Checks 0 <= b_i(t) <= Lambda on a sample of times in [0, t_end].
  void validate(int count, double t_end) const;

  static FrictionSpec constant(std::vector<double> values, double lambda);
};

}  // namespace swarm
