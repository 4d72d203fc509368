#pragma once

#include <functional>

namespace swarm::quad {

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive 15-point Gauss-Kronrod on [a, b].
Estimate integrate(const std::function<double(double)>& f, double a, double b, double tolerance = 1e-12);

/// Adaptive Gauss-Kronrod on [a, +inf) via the substitution r = a + (1 - t)/t.
Estimate integrate_to_infinity(const std::function<double(double)>& f, double a, double tolerance = 1e-12);

/// True when an estimate of an improper integral should be read as divergent.
bool looks_divergent(const Estimate& e);

}  // namespace swarm::quad
