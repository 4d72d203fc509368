#include "swarmlab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

namespace swarm::quad {

namespace {
constexpr unsigned kMaxDepth = 30;
}

Estimate integrate(const std::function<double(double)>& f, double a, double b, double tolerance) {
  if (a == b) return {};
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, kMaxDepth, tolerance, &error);
  return {value, error};
}

Estimate integrate_to_infinity(const std::function<double(double)>& f, double a, double tolerance) {
  // [a, a + 1] directly, then r = (a + 1) e^y on the tail: algebraic decay
  // r^-p becomes exponential decay e^{(1-p) y}, which the mapped rule resolves.
  const double c = a + 1.0;
  const auto head = integrate(f, a, c, tolerance);
  auto g = [&](double y) {
    const double r = c * std::exp(y);
    return std::isinf(r) ? 0.0 : f(r) * r;
  };
  double error = 0.0;
  const double tail = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      g, 0.0, std::numeric_limits<double>::infinity(), kMaxDepth, tolerance, &error);
  return {head.value + tail, head.error + error};
}

bool looks_divergent(const Estimate& e) {
  return !std::isfinite(e.value) || !std::isfinite(e.error) || e.error > 1e-6 * std::max(1.0, std::abs(e.value));
}

}  // namespace swarm::quad
