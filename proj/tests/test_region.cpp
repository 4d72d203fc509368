#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "swarmlab/error.hpp"
#include "swarmlab/functionals.hpp"
#include "swarmlab/region.hpp"
#include "swarmlab/thresholds.hpp"

using namespace swarm;
using doctest::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const KernelSpec cs_kernel = KernelSpec::rational(1.0, 1.0, 1.0);

TrialSetup alignment_setup(int count, int dim, const KernelSpec& a = cs_kernel) {
  TrialSetup s;
  s.model = CuckerSmaleModel{a};
  s.cfg = default_trial_config();
  s.cfg.h = 1e-2;
  s.count = count;
  s.dim = dim;
  return s;
}

RegionGrid grid_from(std::vector<double> X, std::vector<double> V, const std::function<double(int, int)>& p) {
  RegionGrid g{std::move(X), std::move(V), {}};
  g.cells.resize(g.X0.size() * g.V0.size());
  for (std::size_t i = 0; i < g.X0.size(); ++i)
    for (std::size_t j = 0; j < g.V0.size(); ++j) g.cell(i, j).probability = p(static_cast<int>(i), static_cast<int>(j));
  return g;
}

bool has_point(const Polyline& line, double X, double V) {
  for (const auto& p : line)
    if (std::abs(p.X0 - X) < 1e-12 && std::abs(p.V0 - V) < 1e-12) return true;
  return false;
}

}  // namespace

TEST_CASE("uniform draws stay in [-1, 1] and fill it") {
  std::mt19937_64 rng(1);
  double lo = 1.0, hi = -1.0, sum = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const double u = uniform_pm1(rng);
    REQUIRE(u >= -1.0);
    REQUIRE(u <= 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo < -0.999);
  CHECK(hi > 0.999);
  CHECK(std::abs(sum / n) < 0.01);
}

TEST_CASE("trial generators are reproducible and distinct") {
  auto a = trial_generator(5, 3, 7);
  auto b = trial_generator(5, 3, 7);
  auto c = trial_generator(5, 3, 8);
  auto d = trial_generator(5, 4, 7);
  const auto va = a(), vb = b(), vc = c(), vd = d();
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
}

TEST_CASE("rescaling hits the requested functionals") {
  SUBCASE("square-root ratio") {
    AgentState raw(1, 2, {-2.0, 2.0}, {-1.0, 1.0});
    REQUIRE(functionals_xv(raw).X == Approx(4.0));
    const auto s = rescale_to(raw, 1.0, 4.0);
    CHECK(s.x[0] == Approx(-1.0));
    CHECK(s.x[1] == Approx(1.0));
    CHECK(s.v[1] == Approx(2.0));
  }
  SUBCASE("random draws") {
    std::mt19937_64 rng(99);
    for (int k = 0; k < 200; ++k) {
      const int N = 2 + k % 19, d = 1 + k % 3;
      const double X0 = 10.0 * (uniform_pm1(rng) + 1.0), V0 = 10.0 * (uniform_pm1(rng) + 1.0);
      const auto s = draw_rescaled(N, d, X0, V0, rng);
      CHECK(oracle::pairwise_b(s.x, s.x, N, d) == Approx(X0).epsilon(1e-10));
      CHECK(oracle::pairwise_b(s.v, s.v, N, d) == Approx(V0).epsilon(1e-10));
    }
  }
  SUBCASE("zero spread collapses onto the mean") {
    std::mt19937_64 rng(3);
    const auto raw = draw_uniform_state(5, 2, rng);
    const auto s = rescale_to(raw, 0.0, 1.0);
    const auto m = mean_vector(s.x, 5, 2);
    for (int i = 0; i < 5; ++i) {
      CHECK(s.pos(i)[0] == m[0]);
      CHECK(s.pos(i)[1] == m[1]);
    }
    CHECK(functionals_xv(s).X == 0.0);
    CHECK_NOTHROW(simulate(CuckerSmaleModel{cs_kernel}, {}, s, SimConfig{}));
    const CuckerDongModel cd{KernelSpec::rational(1.0, 1.0, 2.0, KernelArgument::squared_distance),
                             RepulsionSpec::power_law(2.0), FrictionSpec::constant({0.0}, 0.0)};
    CHECK_THROWS_AS(simulate(cd, {}, s, SimConfig{}), ConfigError);
  }
  SUBCASE("degenerate draw") {
    AgentState raw(1, 3, {0.0, 1.0, 2.0}, {0.5, 0.5, 0.5});
    CHECK_THROWS_AS(rescale_to(raw, 1.0, 1.0), DomainError);
    CHECK_NOTHROW(rescale_to(raw, 1.0, 0.0));
  }
}

TEST_CASE("trials at consensus all succeed") {
  const auto out = run_trials(3.0, 0.0, alignment_setup(5, 2), 20, 1);
  CHECK(out.trials == 20);
  CHECK(out.successes == 20);
  CHECK(out.blowups == 0);
  CHECK_THROWS_AS(run_trials(1.0, 1.0, alignment_setup(5, 2), 0, 1), DomainError);
}

TEST_CASE("certified cells succeed in every trial") {
  const int N = 20;
  const double X0 = 0.05;
  const double g = threshold_gamma(X0, cs_kernel, N).as_double();
  const double V0 = 0.25 * g * g;
  REQUIRE(cs_region_check(X0, V0, cs_kernel, N).inside);
  const auto out = run_trials(X0, V0, alignment_setup(N, 2), 20, 2024, 4);
  CHECK(out.successes == 20);
}

TEST_CASE("separating pairs outside the sharp boundary never align") {
  // For two agents in one dimension, |v| > (pi/2 - arctan x) keeps them apart for good.
  auto setup = alignment_setup(2, 1, KernelSpec::rational(1.0, 1.0, 1.0));
  const double X0 = 1.0;
  const double g = threshold_gamma(X0, KernelSpec::rational(1.0, 1.0, 1.0), 2).as_double();
  const double V0 = 1.5 * g * g;
  const auto out = run_trials(X0, V0, setup, 20, 5);
  // converging pairs may still align
  int separating = 0;
  for (int t = 0; t < 20; ++t) {
    auto rng = trial_generator(5, 0, t);
    const auto s = draw_rescaled(2, 1, X0, V0, rng);
    separating += (s.x[0] - s.x[1]) * (s.v[0] - s.v[1]) > 0.0;
  }
  REQUIRE(separating > 0);
  CHECK(out.successes <= 20 - separating);
}

TEST_CASE("grids with full information control are everywhere one") {
  auto setup = alignment_setup(5, 2, KernelSpec::rational(1e-3, 1.0, 1.0));
  setup.control = {LocalAverageControl{1.0, kInf}};
  const auto g = probability_grid(linspace(0.0, 10.0, 3), linspace(0.0, 10.0, 3), setup, 5, 8);
  for (const auto& c : g.cells) CHECK(c.probability == 1.0);
}

TEST_CASE("grids are deterministic and independent of the worker count") {
  const auto setup = alignment_setup(2, 1);
  const auto X = linspace(0.0, 4.0, 3), V = linspace(0.0, 4.0, 4);
  const auto a = probability_grid(X, V, setup, 6, 77, 1);
  const auto b = probability_grid(X, V, setup, 6, 77, 3);
  REQUIRE(a.cells.size() == 12);
  for (std::size_t k = 0; k < a.cells.size(); ++k) {
    CHECK(a.cells[k].successes == b.cells[k].successes);
    CHECK(a.cells[k].trials == 6);
    CHECK(a.cells[k].probability == Approx(a.cells[k].successes / 6.0));
  }
  const auto one = probability_grid({X[1]}, {V[2]}, setup, 6, 77);
  const auto direct = run_trials(X[1], V[2], setup, 6, 77, 0);
  CHECK(one.cells.at(0).successes == direct.successes);
}

TEST_CASE("empirical probability falls with the initial velocity spread") {
  const auto setup = alignment_setup(4, 2);
  const int trials = 20;
  const auto g = probability_grid({0.5, 2.0}, linspace(0.0, 6.0, 5), setup, trials, 31, 2);
  for (std::size_t i = 0; i < g.X0.size(); ++i) {
    for (std::size_t j = 0; j + 1 < g.V0.size(); ++j) {
      const double p = g.probability(i, j), q = g.probability(i, j + 1);
      const double pbar = 0.5 * (p + q);
      const double sigma = std::sqrt(2.0 * pbar * (1.0 - pbar) / trials);
      CHECK(q <= p + 3.0 * sigma);
    }
  }
}

TEST_CASE("wilson interval") {
  const auto w = wilson_interval(10, 20);
  CHECK(w.lo == Approx(0.2993).epsilon(1e-3));
  CHECK(w.hi == Approx(0.7007).epsilon(1e-3));
  const auto all = wilson_interval(20, 20);
  CHECK(all.hi == Approx(1.0));
  CHECK(all.lo == Approx(0.8389).epsilon(1e-3));
  const auto none = wilson_interval(0, 20);
  CHECK(none.lo == Approx(0.0));
  CHECK(none.hi == Approx(1.0 - all.lo));
}

TEST_CASE("linspace") {
  const auto v = linspace(0.0, 10.0, 21);
  REQUIRE(v.size() == 21);
  CHECK(v.front() == 0.0);
  CHECK(v.back() == 10.0);
  CHECK(v[1] == Approx(0.5));
  CHECK(linspace(2.0, 3.0, 1) == std::vector<double>{2.0});
}

TEST_CASE("contours") {
  const std::vector<double> X{0, 1, 2, 3, 4}, V{0, 1, 2, 3};
  SUBCASE("constant grid") {
    CHECK(contour_extract(grid_from(X, V, [](int, int) { return 1.0; }), 0.8).empty());
    CHECK(contour_extract(grid_from(X, V, [](int, int) { return 0.0; }), 0.8).empty());
  }
  SUBCASE("half-plane split") {
    const auto lines = contour_extract(grid_from(X, V, [](int i, int) { return i < 2 ? 1.0 : 0.0; }), 0.8);
    REQUIRE(lines.size() == 1);
    double lo = kInf, hi = -kInf;
    for (const auto& p : lines[0]) {
      CHECK(p.X0 == Approx(1.2));
      lo = std::min(lo, p.V0);
      hi = std::max(hi, p.V0);
    }
    CHECK(lo == 0.0);
    CHECK(hi == 3.0);
  }
  SUBCASE("saddle follows the cell average") {
    const auto g = grid_from({0, 1}, {0, 1}, [](int i, int j) { return i == j ? 1.0 : 0.2; });
    const auto lines = contour_extract(g, 0.5);
    REQUIRE(lines.size() == 2);
    // average 0.6 is above the level, so the low corners are cut off
    const bool near_10 = has_point(lines[0], 0.625, 0.0) || has_point(lines[1], 0.625, 0.0);
    const bool near_01 = has_point(lines[0], 0.0, 0.625) || has_point(lines[1], 0.0, 0.625);
    CHECK(near_10);
    CHECK(near_01);
    for (const auto& line : lines) {
      if (has_point(line, 0.625, 0.0)) CHECK(has_point(line, 1.0, 0.375));
    }
  }
}

TEST_CASE("superlevel area") {
  const std::vector<double> X{0, 1, 2, 3, 4}, V{0, 1, 2, 3};
  CHECK(superlevel_area(grid_from(X, V, [](int, int) { return 1.0; }), 0.8) == Approx(12.0));
  CHECK(superlevel_area(grid_from(X, V, [](int, int) { return 0.0; }), 0.8) == 0.0);
  const auto split = grid_from(X, V, [](int i, int) { return i < 2 ? 1.0 : 0.0; });
  CHECK(superlevel_area(split, 0.5) == Approx(4.5).epsilon(0.01));
  CHECK(superlevel_area(split, 0.8) == Approx(3.6).epsilon(0.02));
  const auto bigger = grid_from(X, V, [](int i, int) { return i < 3 ? 1.0 : 0.0; });
  CHECK(superlevel_area(bigger, 0.8) > superlevel_area(split, 0.8));
}

TEST_CASE("theoretical boundary") {
  const auto X = linspace(0.0, 10.0, 21);
  const auto plain = theoretical_boundary(X, cs_kernel, 20);
  CHECK(theoretical_boundary(X, cs_kernel, 20, {0.0, 2.0}) == plain);
  for (std::size_t k = 1; k < plain.size(); ++k) CHECK(plain[k] <= plain[k - 1]);
  for (std::size_t k = 0; k < X.size(); ++k) {
    const double g = threshold_gamma(X[k], cs_kernel, 20).as_double();
    CHECK(plain[k] == Approx(g * g));
  }
  const auto half = theoretical_boundary({0.0}, KernelSpec::rational(0.5, 1.0, 1.0), 2);
  CHECK(half[0] == Approx(M_PI * M_PI / 64.0).epsilon(1e-9));
  const auto heavy = theoretical_boundary({0.0, 5.0}, KernelSpec::rational(1.0, 1.0, 0.25), 4);
  CHECK(std::isinf(heavy[0]));
  CHECK(std::isinf(heavy[1]));
  const auto controlled = theoretical_boundary(X, cs_kernel, 20, {1.0, 2.0});
  for (std::size_t k = 0; k < X.size(); ++k) CHECK(controlled[k] >= plain[k]);
}
