#include "swarmlab/region.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "swarmlab/error.hpp"
#include "swarmlab/functionals.hpp"
#include "swarmlab/thresholds.hpp"

namespace swarm {

AgentState rescale_to(const AgentState& raw, double X0, double V0) {
  if (!(X0 >= 0.0) || !(V0 >= 0.0)) throw DomainError("target functionals must be nonnegative");
  const auto fv = functionals_xv(raw);
  if ((X0 > 0.0 && !(fv.X > 0.0)) || (V0 > 0.0 && !(fv.V > 0.0))) {
    throw DomainError("raw draw has no spread to rescale");
  }
  AgentState out = raw;
  const double sx = X0 > 0.0 ? std::sqrt(X0 / fv.X) : 0.0;
  const double sv = V0 > 0.0 ? std::sqrt(V0 / fv.V) : 0.0;
  for (double& c : out.x) c *= sx;
  for (double& c : out.v) c *= sv;
  return out;
}

double uniform_pm1(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

AgentState draw_uniform_state(int count, int dim, std::mt19937_64& rng) {
  AgentState s(dim, count);
  for (double& c : s.x) c = uniform_pm1(rng);
  for (double& c : s.v) c = uniform_pm1(rng);
  return s;
}

std::mt19937_64 trial_generator(std::uint64_t seed, std::uint64_t cell, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(cell >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

AgentState draw_rescaled(int count, int dim, double X0, double V0, std::mt19937_64& rng) {
  for (int attempt = 0; attempt <= 100; ++attempt) {
    const auto raw = draw_uniform_state(count, dim, rng);
    const auto fv = functionals_xv(raw);
    if ((X0 > 0.0 && !(fv.X > 0.0)) || (V0 > 0.0 && !(fv.V > 0.0))) continue;
    return rescale_to(raw, X0, V0);
  }
  throw DomainError("raw draws stayed degenerate after 100 regenerations");
}

SimConfig default_trial_config() {
  SimConfig cfg;
  cfg.t_end = 100.0;
  cfg.record_stride = std::numeric_limits<int>::max();
  cfg.stop_below_V = 1e-6;
  return cfg;
}

TrialOutcome run_trials(double X0, double V0, const TrialSetup& setup, int trials, std::uint64_t seed,
                        std::uint64_t cell) {
  if (trials < 1) throw DomainError("need at least one trial");
  TrialOutcome out;
  out.trials = trials;
  for (int k = 0; k < trials; ++k) {
    auto rng = trial_generator(seed, cell, static_cast<std::uint64_t>(k));
    const auto state0 = draw_rescaled(setup.count, setup.dim, X0, V0, rng);
    const auto rec = simulate(setup.model, setup.control, state0, setup.cfg);
    if (rec.has_event(EventKind::blowup) || rec.has_event(EventKind::collision)) {
      ++out.blowups;
      continue;
    }
    if (rec.final_V <= setup.success_V) ++out.successes;
  }
  return out;
}

WilsonInterval wilson_interval(int successes, int trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = trials;
  const double p = successes / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw DomainError("axis needs at least one point");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[k] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
  return out;
}

RegionGrid probability_grid(const std::vector<double>& X0_axis, const std::vector<double>& V0_axis,
                            const TrialSetup& setup, int trials, std::uint64_t seed, int jobs) {
  auto monotone = [](const std::vector<double>& axis) {
    return !axis.empty() && std::adjacent_find(axis.begin(), axis.end(), std::greater_equal<>()) == axis.end();
  };
  if (!monotone(X0_axis) || !monotone(V0_axis)) throw DomainError("grid axes must be nonempty and increasing");

  RegionGrid grid{X0_axis, V0_axis, std::vector<GridCell>(X0_axis.size() * V0_axis.size())};
  const std::size_t total = grid.cells.size();
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t c = next++; c < total; c = next++) {
      try {
        const std::size_t i = c / V0_axis.size(), j = c % V0_axis.size();
        const auto r = run_trials(X0_axis[i], V0_axis[j], setup, trials, seed, c);
        auto& cell = grid.cells[c];
        cell.trials = r.trials;
        cell.successes = r.successes;
        cell.blowups = r.blowups;
        cell.probability = static_cast<double>(r.successes) / r.trials;
        cell.wilson = wilson_interval(r.successes, r.trials);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(total)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return grid;
}

std::vector<double> theoretical_boundary(const std::vector<double>& X0_axis, const KernelSpec& a, int count,
                                         BoundaryVariant variant) {
  const auto psi = KernelSpec::indicator(variant.R);
  std::vector<double> out;
  out.reserve(X0_axis.size());
  for (double X0 : X0_axis) {
    const auto cert = variant.strength > 0.0
                          ? cs_region_check_extended(X0, 0.0, a, count, variant.strength, psi, count)
                          : cs_region_check(X0, 0.0, a, count);
    out.push_back(cert.threshold.squared().as_double());
  }
  return out;
}

}  // namespace swarm
