#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "swarmlab/error.hpp"
#include "swarmlab/quadrature.hpp"
#include "swarmlab/thresholds.hpp"

using namespace swarm;
using doctest::Approx;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double gamma_closed(double X, double H) { return 0.5 * H * (M_PI / 2 - std::atan(2.0 * std::sqrt(X))); }
}  // namespace

TEST_CASE("threshold values order totally with infinity on top") {
  const auto a = Threshold::finite(1.0);
  const auto b = Threshold::finite(2.0);
  const auto inf = Threshold::infinite();
  CHECK(a < b);
  CHECK(b < inf);
  CHECK(inf == Threshold::from_double(kInf));
  CHECK(inf.admits(1e300));
  CHECK_FALSE(a.admits(1.5));
  CHECK(a.admits(1.0));
  CHECK(b.squared().value() == 4.0);
  CHECK(inf.squared().is_infinite());
  CHECK_THROWS_AS(inf.value(), DomainError);
  CHECK_THROWS_AS(Threshold::finite(-1.0), DomainError);
}

TEST_CASE("two-agent threshold in closed form") {
  const auto a = KernelSpec::rational(0.5, 1.0, 1.0);
  CHECK(threshold_gamma(0.0, a, 2).value() == Approx(M_PI / 8).epsilon(1e-12));
  for (double X : {0.0, 0.1, 1.0, 4.0, 25.0}) {
    CAPTURE(X);
    CHECK(threshold_gamma(X, a, 2).value() == Approx(0.5 * gamma_closed(X, 1.0)).epsilon(1e-12));
    CHECK(threshold_gamma_quadrature(X, a, 2) == Approx(0.5 * gamma_closed(X, 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("threshold agrees with an independent quadrature for general kernels") {
  const KernelSpec kernels[] = {KernelSpec::rational(1.0, 1.0, 1.5), KernelSpec::rational(2.0, 0.7, 0.8),
                                KernelSpec::plateau(1.0, 2.0, 0.4),
                                KernelSpec::custom([](double r) { return std::exp(-r * r); })};
  for (const auto& a : kernels) {
    for (int N : {2, 5, 20}) {
      for (double X : {0.0, 0.3, 2.0}) {
        const double s = std::sqrt(2.0 * N);
        const double ref = oracle::simpson_to_infinity([&](double r) { return a.at_distance(s * r); }, std::sqrt(X));
        CHECK(threshold_gamma(X, a, N).value() == Approx(ref).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("threshold limits and divergence") {
  const auto a = KernelSpec::rational(1.0, 1.0, 1.0);
  CHECK(threshold_gamma(1e12, a, 4).value() < 1e-6);
  CHECK(threshold_gamma(0.0, KernelSpec::rational(1.0, 1.0, 0.5), 4).is_infinite());
  CHECK(threshold_gamma(3.0, KernelSpec::rational(1.0, 1.0, 0.25), 4).is_infinite());
  CHECK(std::isinf(threshold_gamma_quadrature(0.0, KernelSpec::rational(1.0, 1.0, 0.5), 4)));
  CHECK_THROWS_AS(threshold_gamma(-0.1, a, 4), DomainError);
}

TEST_CASE("threshold is nonincreasing in X") {
  const KernelSpec kernels[] = {KernelSpec::rational(1.0, 1.0, 1.0), KernelSpec::rational(1.0, 2.0, 3.0),
                                KernelSpec::plateau(3.0, 1.0, 0.5)};
  for (const auto& a : kernels) {
    double prev = threshold_gamma(0.0, a, 10).value();
    for (double X = 0.05; X < 30.0; X += 0.05) {
      const double g = threshold_gamma(X, a, 10).value();
      CHECK(g <= prev + 1e-15);
      prev = g;
    }
  }
}

TEST_CASE("region certificate") {
  const auto a = KernelSpec::rational(0.5, 1.0, 1.0);
  CHECK(cs_region_check(3.0, 0.0, a, 2).inside);
  CHECK(cs_region_check(0.0, std::pow(M_PI / 8, 2) * (1 - 1e-3), a, 2).inside);
  CHECK_FALSE(cs_region_check(0.0, std::pow(M_PI / 8, 2) * (1 + 1e-3), a, 2).inside);
  const auto open = KernelSpec::rational(1.0, 1.0, 0.5);
  CHECK(cs_region_check(1e6, 1e6, open, 7).inside);
  CHECK(cs_region_check(1e6, 1e6, open, 7).threshold.is_infinite());
  CHECK_THROWS_AS(cs_region_check(1.0, -1.0, a, 2), DomainError);
}

TEST_CASE("region membership is monotone") {
  const auto a = KernelSpec::rational(1.0, 1.0, 1.0);
  for (double X = 0.0; X <= 4.0; X += 0.25) {
    for (double V = 0.0; V <= 1.0; V += 0.05) {
      if (!cs_region_check(X, V, a, 6).inside) continue;
      CHECK(cs_region_check(X * 0.9, V, a, 6).inside);
      CHECK(cs_region_check(X, V * 0.9, a, 6).inside);
    }
  }
}

TEST_CASE("enlarged region under local-average feedback") {
  const auto a = KernelSpec::rational(1.0, 1.0, 1.0);
  const int N = 20;
  const auto psi = KernelSpec::indicator(2.0);
  for (double X : {0.0, 0.01, 0.05, 0.5}) {
    for (double V : {0.0, 0.01, 0.2, 1.0}) {
      const auto plain = cs_region_check(X, V, a, N);
      const auto zero = cs_region_check_extended(X, V, a, N, 0.0, psi, N);
      CHECK(zero.inside == plain.inside);
      CHECK(zero.threshold == plain.threshold);
      const auto ext = cs_region_check_extended(X, V, a, N, 1.5, psi, N);
      const double extra = 1.5 * std::max(0.0, 2.0 / std::sqrt(2.0 * N) - std::sqrt(X));
      CHECK(ext.threshold.value() == Approx(plain.threshold.value() + extra).epsilon(1e-12));
      if (std::sqrt(2.0 * N * X) > 2.0) CHECK(ext.inside == plain.inside);
    }
  }
  const auto everything = KernelSpec::indicator(kInf);
  CHECK(cs_region_check_extended(1e4, 1e4, a, N, 0.1, everything, N).inside);
  CHECK_THROWS_AS(cs_region_check_extended(0.0, 0.0, a, N, 1.0, psi, N + 1), DomainError);
  CHECK_THROWS_AS(cs_region_check_extended(0.0, 0.0, a, N, 1.0, psi, 0.0), DomainError);
  CHECK_THROWS_AS(cs_region_check_extended(0.0, 0.0, a, N, -1.0, psi, N), DomainError);
}

TEST_CASE("energy threshold") {
  const auto a = KernelSpec::rational(1.0, 1.0, 2.0, KernelArgument::squared_distance);
  CHECK(cd_threshold_vartheta(a, 8).value() == 3.5);
  for (double beta : {1.1, 1.5, 2.0, 3.0}) {
    CAPTURE(beta);
    const auto k = KernelSpec::rational(1.7, 1.0, beta, KernelArgument::squared_distance);
    const auto est = quad::integrate_to_infinity([&](double r) { return 1.7 * std::pow(1.0 + r, -beta); }, 0.0);
    CHECK(cd_threshold_vartheta(k, 8).value() == Approx(3.5 * est.value).epsilon(1e-9));
    CHECK(cd_threshold_vartheta(k, 8).value() == Approx(3.5 * 1.7 / (beta - 1.0)).epsilon(1e-14));
  }
  CHECK(cd_threshold_vartheta(KernelSpec::rational(1, 1, 1.0, KernelArgument::squared_distance), 8).is_infinite());
  CHECK(cd_threshold_vartheta(KernelSpec::rational(50, 1, 0.7, KernelArgument::squared_distance), 2).is_infinite());
  CHECK_THROWS_AS(cd_threshold_vartheta(KernelSpec::rational(1, 1, 2), 8), DomainError);
}

TEST_CASE("energy window constant") {
  CHECK(condition_b_c(0.0, 1.0, 4.0, 0.0, 8) == 1.0);
  const double c = condition_b_c(35.0, 1.0, 4.0, 0.0, 8);
  const double expected = std::exp(-(2.0 * std::sqrt(3.0) / 9.0) * 35.0 * 1.0 / (4.0 * 2.0 * (0.0 + 35.0 / 8.0)));
  CHECK(c == Approx(expected).epsilon(1e-14));
  CHECK(c > 0.0);
  CHECK(c <= 1.0);

  const auto a = KernelSpec::rational(1.0, 1.0, 2.0, KernelArgument::squared_distance);
  const auto f = RepulsionSpec::power_law(2.0);
  AgentState still(2, 2, {0, 0, 1, 0}, {0, 0, 0, 0});
  const auto none = cd_condition_b_constant(still, 1.0, 0.0, a, f);
  CHECK_FALSE(none.c.has_value());
  CHECK_FALSE(none.satisfied);

  AgentState moving(2, 2, {0, 0, 1, 0}, {1, 0, 1, 0});
  const auto zeroM = cd_condition_b_constant(moving, 0.0, 0.0, a, f);
  REQUIRE(zeroM.c.has_value());
  CHECK(*zeroM.c == 1.0);
  CHECK_FALSE(zeroM.satisfied);

  const auto diag = cd_condition_b_constant(moving, 2.0, 0.5, a, f);
  REQUIRE(diag.c.has_value());
  CHECK(*diag.c == Approx(condition_b_c(2.0, 1.0, diag.energy, 0.5, 2)));
  CHECK(diag.satisfied == (*diag.c * diag.vartheta.value() > diag.energy && diag.energy > diag.vartheta.value()));
}
