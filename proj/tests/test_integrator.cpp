#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "swarmlab/error.hpp"
#include "swarmlab/functionals.hpp"
#include "swarmlab/integrator.hpp"
#include "swarmlab/region.hpp"
#include "swarmlab/thresholds.hpp"

using namespace swarm;
using doctest::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

AgentState random_state(int n, int d, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  AgentState s(d, n);
  for (auto& c : s.x) c = scale * uniform_pm1(rng);
  for (auto& c : s.v) c = scale * uniform_pm1(rng);
  return s;
}

SimConfig config(double h, double t_end, int stride = 1) {
  SimConfig c;
  c.h = h;
  c.t_end = t_end;
  c.record_stride = stride;
  return c;
}

const KernelSpec cs_kernel = KernelSpec::rational(1.0, 1.0, 1.0);

}  // namespace

TEST_CASE("rk4 integrates free motion exactly") {
  const VectorField f = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = 0.0;
  };
  std::vector<double> y{0.5, -2.0};
  Rk4Stepper st(2);
  for (int k = 0; k < 1000; ++k) st.step(f, k * 0.01, y, 0.01);
  CHECK(y[0] == Approx(0.5 - 2.0 * 10.0).epsilon(1e-12));
  CHECK(y[1] == -2.0);
}

TEST_CASE("rk4 is fourth order on the harmonic oscillator") {
  const VectorField f = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  auto error_at = [&](double h) {
    std::vector<double> y{1.0, 0.0};
    Rk4Stepper st(2);
    const long n = std::lround(2.0 / h);
    for (long k = 0; k < n; ++k) st.step(f, k * h, y, h);
    return std::hypot(y[0] - std::cos(2.0), y[1] + std::sin(2.0));
  };
  const double ratio = error_at(0.1) / error_at(0.05);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("rk4 reports a non-finite stage") {
  const VectorField f = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0] * y[0]; };
  std::vector<double> y{1e200};
  Rk4Stepper st(1);
  CHECK_THROWS_AS(st.step(f, 0.0, y, 1.0), NumericalBlowup);
}

TEST_CASE("simulation config validation") {
  CHECK_THROWS_AS(config(0.0, 1.0).validate(), ConfigError);
  CHECK_THROWS_AS(config(-1e-3, 1.0).validate(), ConfigError);
  CHECK_THROWS_AS(config(1e-3, 0.0).validate(), ConfigError);
  CHECK_THROWS_AS(config(2.0, 1.0).validate(), ConfigError);
  CHECK_THROWS_AS(config(1e-3, 1.0, 0).validate(), ConfigError);
  auto c = config(1e-3, 1.0);
  c.collision_floor = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_NOTHROW(config(1e-3, 1.0).validate());
}

TEST_CASE("consensus manifold start keeps velocities and grows X linearly") {
  AgentState s(2, 3, {0, 0, 1, 0, 0, 1}, {0.3, -0.2, 0.3, -0.2, 0.3, -0.2});
  const auto rec = simulate(CuckerSmaleModel{cs_kernel}, {}, s, config(1e-2, 5.0, 50));
  for (std::size_t k = 0; k < rec.final_state.v.size(); ++k) CHECK(rec.final_state.v[k] == Approx(s.v[k]));
  CHECK(rec.final_V <= 1e-30);
  CHECK(rec.final_X == Approx(rec.X.front()).epsilon(1e-12));
  for (std::size_t k = 0; k < s.x.size(); ++k)
    CHECK(rec.final_state.x[k] == Approx(s.x[k] + 5.0 * s.v[k]).epsilon(1e-12));
}

TEST_CASE("mean velocity is conserved by symmetric alignment") {
  const auto s = random_state(6, 2, 3);
  const auto rec = simulate(CuckerSmaleModel{cs_kernel}, {}, s, config(1e-3, 10.0, 100));
  CHECK(rec.times.size() == 101);
  CHECK(conserved_quantity_check(rec, ConservedQuantity::mean_velocity) <= 1e-8);
}

TEST_CASE("energy is conserved without friction and control") {
  const auto a = KernelSpec::rational(1.0, 1.0, 1.1, KernelArgument::squared_distance);
  std::mt19937_64 rng(5);
  AgentState s(2, 5);
  for (int i = 0; i < 5; ++i) {
    s.x[2 * i] = std::cos(2.0 * M_PI * i / 5);
    s.x[2 * i + 1] = std::sin(2.0 * M_PI * i / 5);
  }
  for (auto& c : s.v) c = uniform_pm1(rng);
  const CuckerDongModel m{a, RepulsionSpec::power_law(2.0), FrictionSpec::constant({0.0}, 0.0)};
  const auto rec = simulate(m, {}, s, config(1e-3, 5.0, 10));
  REQUIRE(!rec.E.empty());
  CHECK(conserved_quantity_check(rec, ConservedQuantity::energy) <= 1e-6 * rec.E.front());
  CHECK_THROWS_AS(conserved_quantity_check(rec, ConservedQuantity::arctan_invariant), ConfigError);
}

TEST_CASE("friction dissipates energy") {
  const auto a = KernelSpec::rational(1.0, 1.0, 2.0, KernelArgument::squared_distance);
  AgentState s(1, 2, {-1.0, 1.0}, {0.5, -0.2});
  const CuckerDongModel m{a, RepulsionSpec::power_law(2.0), FrictionSpec::constant({0.5}, 0.0)};
  const auto rec = simulate(m, {}, s, config(1e-3, 3.0, 10));
  for (std::size_t k = 1; k < rec.E.size(); ++k) CHECK(rec.E[k] <= rec.E[k - 1] + 1e-12);
  CHECK(rec.E.back() < rec.E.front());
}

TEST_CASE("reduced pair keeps v + arctan x") {
  const auto rec = simulate(ReducedPairCs{}, {}, AgentState(1, 1, {1.0}, {0.4}), config(1e-3, 20.0, 10));
  CHECK(conserved_quantity_check(rec, ConservedQuantity::arctan_invariant) <= 1e-6);
  CHECK_THROWS_AS(conserved_quantity_check(rec, ConservedQuantity::energy), ConfigError);
}

TEST_CASE("reduced pair agrees with its lifted two-agent system") {
  const double x0 = 0.7, v0 = -0.3;
  const auto red = simulate(ReducedPairCs{}, {}, AgentState(1, 1, {x0}, {v0}), config(1e-3, 3.0, 1000));
  const auto full =
      simulate(CuckerSmaleModel{reduced_pair_kernel(ReducedPairCs{})}, {}, lift_reduced_pair(x0, v0), config(1e-3, 3.0, 1000));
  const auto& s = full.final_state;
  CHECK(s.x[0] - s.x[1] == Approx(red.final_state.x[0]).epsilon(1e-9));
  CHECK(s.v[0] - s.v[1] == Approx(red.final_state.v[0]).epsilon(1e-9));
  CHECK(red.final_X == Approx(full.final_X).epsilon(1e-9));
  CHECK(red.final_V == Approx(full.final_V).epsilon(1e-9));

  const ReducedPairCd cd{2.0};
  const auto red_cd = simulate(cd, {}, AgentState(1, 1, {x0}, {v0}), config(1e-3, 3.0, 1000));
  const CuckerDongModel lifted{reduced_pair_kernel(cd), RepulsionSpec::none(), FrictionSpec::constant({0.0}, 0.0)};
  const auto full_cd = simulate(lifted, {}, lift_reduced_pair(x0, v0), config(1e-3, 3.0, 1000));
  CHECK(full_cd.final_state.x[0] - full_cd.final_state.x[1] == Approx(red_cd.final_state.x[0]).epsilon(1e-9));
  CHECK(*full_cd.final_E == Approx(*red_cd.final_E).epsilon(1e-9));
}

TEST_CASE("V is nonincreasing for uncontrolled alignment") {
  const auto s = random_state(8, 2, 17, 2.0);
  const auto rec = simulate(CuckerSmaleModel{cs_kernel}, {}, s, config(1e-2, 20.0, 5));
  for (std::size_t k = 1; k < rec.V.size(); ++k) CHECK(rec.V[k] <= rec.V[k - 1] * (1.0 + 1e-12));
}

TEST_CASE("total control decays V at least exponentially and stays admissible") {
  const int N = 10;
  auto s = random_state(N, 2, 21);
  const double V0 = functionals_xv(s).V;
  const double M = 1.0, alpha = 0.9 * M / (N * std::sqrt(V0));
  const auto rec = simulate(CuckerSmaleModel{cs_kernel}, {TotalControl{alpha, M}}, s, config(1e-3, 10.0, 10));
  CHECK(rec.admissible);
  CHECK(rec.max_control_norm <= M + 1e-9);
  for (std::size_t k = 0; k < rec.V.size(); ++k) CHECK(rec.V[k] <= 1.05 * V0 * std::exp(-2.0 * alpha * rec.times[k]));
}

TEST_CASE("leader feedback decays V at the leader rate") {
  const int N = 8;
  const auto s = random_state(N, 2, 33);
  const double V0 = functionals_xv(s).V;
  for (double q : {1.25, 2.0, 5.0}) {
    const double gamma = 1.0;
    const auto rec =
        simulate(CuckerSmaleModel{cs_kernel}, {LeaderControl{gamma, q / (q - 1.0), q}}, s, config(1e-3, 5.0, 10));
    CHECK(rec.admissible);
    for (std::size_t k = 0; k < rec.V.size(); ++k)
      CHECK(rec.V[k] <= 1.05 * V0 * std::exp(-2.0 * gamma / q * rec.times[k]));
  }
}

TEST_CASE("local average feedback with infinite radius drives consensus") {
  const auto s = random_state(10, 2, 41, 3.0);
  const auto rec =
      simulate(CuckerSmaleModel{KernelSpec::rational(1e-6, 1.0, 1.0)}, {LocalAverageControl{1.0, kInf}}, s,
               config(1e-2, 30.0, 100));
  CHECK(rec.final_V <= 1e-6 * rec.V.front());
  CHECK(conserved_quantity_check(rec, ConservedQuantity::mean_velocity) <= 1e-9);
}

TEST_CASE("sparse alignment control is admissible and acts on one agent") {
  const auto s = random_state(12, 2, 9, 3.0);
  const auto rec = simulate(CuckerSmaleModel{cs_kernel}, {SparseCsControl{1.0}}, s, config(1e-2, 5.0));
  CHECK(rec.admissible);
  CHECK(rec.max_control_norm <= 1.0 + 1e-9);
  int single = 0;
  for (std::size_t k = 0; k < rec.control_norms.size(); ++k) {
    if (rec.control_norms[k] > 0.0) {
      single += rec.active_agent[k] >= 0;
      CHECK(rec.control_norms[k] == Approx(1.0));
    }
  }
  CHECK(single > 0);
}

TEST_CASE("sample and hold keeps the control piecewise constant") {
  const auto s = random_state(6, 2, 10, 3.0);
  ControlSpec c{SparseCsControl{1.0}, 0.1};
  const auto rec = simulate(CuckerSmaleModel{cs_kernel}, c, s, config(1e-2, 1.0));
  REQUIRE(rec.controls.size() == 101);
  // each record carries the control applied over the step that ended there
  CHECK(rec.controls[0] == rec.controls[1]);
  for (int k = 1; k <= 100; ++k) CHECK(rec.controls[k] == rec.controls[1 + 10 * ((k - 1) / 10)]);
  CHECK(rec.controls[10] != rec.controls[11]);
}

TEST_CASE("region entry releases the control for good") {
  const int N = 20;
  std::mt19937_64 rng = trial_generator(11, 0, 0);
  const auto s = draw_rescaled(N, 2, 0.05, 0.25, rng);
  CHECK_FALSE(cs_region_check(0.05, 0.25, cs_kernel, N).inside);
  SimConfig cfg = config(1e-2, 60.0);
  cfg.release_control_on_region_entry = true;
  const auto rec = simulate(CuckerSmaleModel{cs_kernel}, {SparseCsControl{1.0}}, s, cfg);
  const auto entry = rec.first_event(EventKind::region_entry);
  REQUIRE(entry);
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    if (rec.times[k] > *entry + 1e-12) CHECK(rec.control_norms[k] == 0.0);
  }
  CHECK(rec.final_V <= 1e-5);

  cfg.release_control_on_region_entry = false;
  cfg.stop_on_region_entry = true;
  const auto stopped = simulate(CuckerSmaleModel{cs_kernel}, {SparseCsControl{1.0}}, s, cfg);
  CHECK(stopped.final_time == Approx(*entry));
}

TEST_CASE("sparse attraction control never raises the energy") {
  const auto a = KernelSpec::rational(10.0, 1.0, 1.1, KernelArgument::squared_distance);
  AgentState s(2, 4, {1, 0, 0, 1, -1, 0, 0, -1}, {2, 0, -1, 1, 0.5, -2, 0, 0.3});
  const CuckerDongModel m{a, RepulsionSpec::power_law(2.0), FrictionSpec::constant({0.0}, 0.0)};
  const auto rec = simulate(m, {SparseCdControl{1.0, std::nullopt, 0.0}}, s, config(1e-3, 2.0, 10));
  CHECK(rec.admissible);
  for (std::size_t k = 1; k < rec.E.size(); ++k) CHECK(rec.E[k] <= rec.E[k - 1] + 1e-9);
  CHECK(rec.E.back() < rec.E.front());
}

TEST_CASE("runtime failures end the run with an event") {
  SUBCASE("divergence") {
    AgentState s(1, 2, {0.0, 1.0}, {-50.0, 50.0});
    SimConfig cfg = config(1e-2, 10.0);
    cfg.divergence_radius = 10.0;
    const auto rec = simulate(CuckerSmaleModel{KernelSpec::rational(1e-9, 1.0, 1.0)}, {}, s, cfg);
    const auto t = rec.first_event(EventKind::divergence);
    REQUIRE(t);
    CHECK(*t < 0.25);
    CHECK(rec.events.back().kind == EventKind::end);
  }
  SUBCASE("collision") {
    AgentState s(1, 2, {-1.0, 1.0}, {1.0, -1.0});
    const CuckerDongModel m{KernelSpec::rational(1.0, 1.0, 2.0, KernelArgument::squared_distance), RepulsionSpec::none(),
                            FrictionSpec::constant({0.0}, 0.0)};
    SimConfig cfg = config(1e-3, 5.0);
    cfg.collision_floor = 1e-2;
    const auto rec = simulate(m, {}, s, cfg);
    CHECK(rec.has_event(EventKind::collision));
  }
  SUBCASE("blowup") {
    const auto huge = KernelSpec::custom([](double) { return 1e308; });
    const auto rec = simulate(CuckerSmaleModel{huge}, {}, AgentState(1, 2, {0.0, 1.0}, {0.0, 1.0}), config(1e-2, 1.0));
    CHECK(rec.has_event(EventKind::blowup));
    CHECK(rec.events.back().kind == EventKind::end);
  }
}

TEST_CASE("control laws must match the model") {
  AgentState s(1, 2, {-1.0, 1.0}, {1.0, -1.0});
  const CuckerDongModel cd{KernelSpec::rational(1.0, 1.0, 2.0, KernelArgument::squared_distance), RepulsionSpec::none(),
                           FrictionSpec::constant({0.0}, 0.0)};
  CHECK_THROWS_AS(simulate(cd, {SparseCsControl{1.0}}, s, config(1e-3, 1.0)), ConfigError);
  CHECK_THROWS_AS(simulate(CuckerSmaleModel{cs_kernel}, {SparseCdControl{1.0, std::nullopt, 0.0}}, s, config(1e-3, 1.0)),
                  ConfigError);
  CHECK_THROWS_AS(simulate(ReducedPairCs{}, {LeaderControl{1.0, 2.0, 2.0}}, AgentState(1, 1, {0.0}, {1.0}), config(1e-3, 1.0)),
                  ConfigError);
  CHECK_THROWS_AS(simulate(CuckerSmaleModel{cs_kernel}, {TotalControl{-1.0, 1.0}}, s, config(1e-3, 1.0)), ConfigError);
}

TEST_CASE("simulation is deterministic") {
  const auto s = random_state(7, 2, 77, 2.0);
  const auto a = simulate(CuckerSmaleModel{cs_kernel}, {SparseCsControl{0.5}}, s, config(1e-2, 5.0));
  const auto b = simulate(CuckerSmaleModel{cs_kernel}, {SparseCsControl{0.5}}, s, config(1e-2, 5.0));
  CHECK(a.times == b.times);
  CHECK(a.states == b.states);
  CHECK(a.V == b.V);
  CHECK(a.controls == b.controls);
}

TEST_CASE("record stride keeps the final sample") {
  const auto s = random_state(3, 1, 1);
  const auto rec = simulate(CuckerSmaleModel{cs_kernel}, {}, s, config(0.1, 1.05, 4));
  CHECK(rec.times.front() == 0.0);
  CHECK(rec.times.back() == Approx(1.1));
  CHECK(rec.final_time == rec.times.back());
}

TEST_CASE("heading model moves at constant speed") {
  AgentState s(2, 3);
  s.x = {0, 0, 0.5, 0, 0, 0.5};
  s.heading = {0.0, 1.0, 2.0};
  const auto rec = simulate(VicsekModel{1.0, 0.7}, {}, s, config(1e-2, 2.0, 50));
  for (int i = 0; i < 3; ++i) CHECK(norm(rec.final_state.vel(i)) == Approx(0.7));
}

TEST_CASE("V decays at least at the rate set by the widest pair") {
  const int N = 6;
  const auto s = random_state(N, 2, 55, 2.0);
  const double h = 1e-3;
  const auto rec = simulate(CuckerSmaleModel{cs_kernel}, {}, s, config(h, 5.0));
  double worst = -kInf;
  for (std::size_t k = 1; k + 1 < rec.V.size(); ++k) {
    const double rate = (rec.V[k + 1] - rec.V[k - 1]) / (2.0 * h);
    const double bound = -2.0 * cs_kernel.at_distance(std::sqrt(2.0 * N * rec.X[k])) * rec.V[k];
    worst = std::max(worst, rate - bound);
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("sparse attraction control keeps the energy under its exponential envelope") {
  const auto a = KernelSpec::rational(1.0, 1.0, 1.5, KernelArgument::squared_distance);
  AgentState s(2, 4, {1, 0, 0, 1, -1, 0, 0, -1}, {1.5, 0.2, 0.8, -0.4, 1.1, 0.6, 0.9, 0.1});
  const CuckerDongModel m{a, RepulsionSpec::power_law(2.0), FrictionSpec::constant({0.0}, 0.0)};
  const double M = 2.0;
  const auto rec = simulate(m, {SparseCdControl{M, std::nullopt, 0.0}}, s, config(1e-3, 3.0, 10));
  const double E0 = rec.E.front(), eps = M / E0;
  double eta = kInf;
  for (const auto& st : rec.states) eta = std::min(eta, norm(mean_vector(st.v, st.count, st.dim)));
  REQUIRE(eta > 0.0);
  for (std::size_t k = 0; k < rec.E.size(); ++k) CHECK(rec.E[k] <= 1.05 * E0 * std::exp(-2.0 * eps * eta * rec.times[k]));
  CHECK(rec.E.back() < 0.95 * E0);
}
