#include "swarmlab/kernels.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "swarmlab/error.hpp"
#include "swarmlab/quadrature.hpp"

namespace swarm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Integral of H/(sigma^2 + u^2)^beta over [u0, inf). For beta > 1/2 the
// substitution z = sigma^2/(sigma^2 + u^2) turns it into an incomplete beta
// function: (H/2) sigma^(1-2 beta) B(z0; beta - 1/2, 1/2).
double rational_distance_tail(const RationalKernel& k, double u0) {
  if (k.beta <= 0.5) return kInf;
  const double s2 = k.sigma * k.sigma;
  const double z0 = s2 / (s2 + u0 * u0);
  if (k.beta == 1.0) return k.H / k.sigma * (M_PI / 2 - std::atan(u0 / k.sigma));
  return 0.5 * k.H * std::pow(k.sigma, 1.0 - 2.0 * k.beta) * boost::math::beta(k.beta - 0.5, 0.5, z0);
}

// Antiderivative-based integral of H/(sigma^2 + r)^beta over [lo, hi].
double rational_squared_integral(const RationalKernel& k, double lo, double hi) {
  const double s2 = k.sigma * k.sigma;
  if (std::isinf(hi)) {
    if (k.beta <= 1.0) return kInf;
    return k.H * std::pow(s2 + lo, 1.0 - k.beta) / (k.beta - 1.0);
  }
  if (k.beta == 1.0) return k.H * std::log((s2 + hi) / (s2 + lo));
  return k.H * (std::pow(s2 + lo, 1.0 - k.beta) - std::pow(s2 + hi, 1.0 - k.beta)) / (k.beta - 1.0);
}

double plateau_tail_value(const PlateauKernel& k, double r) {
  if (k.tail) return k.tail(r);
  return k.M * std::exp(-(k.M / k.tail_integral) * (r - k.R));
}

double plateau_value(const PlateauKernel& k, double r) { return r <= k.R ? k.M : plateau_tail_value(k, r); }

// Integral of the plateau kernel over [lo, hi] in its own argument.
double plateau_integral(const PlateauKernel& k, double lo, double hi) {
  double total = k.M * std::max(0.0, std::min(hi, k.R) - lo);
  const double a = std::max(lo, k.R);
  if (hi <= a) return total;
  if (!k.tail) {
    const double rate = k.M / k.tail_integral;
    const double upper = std::isinf(hi) ? 0.0 : std::exp(-rate * (hi - k.R));
    return total + k.tail_integral * (std::exp(-rate * (a - k.R)) - upper);
  }
  const auto est = std::isinf(hi) ? quad::integrate_to_infinity(k.tail, a) : quad::integrate(k.tail, a, hi);
  if (std::isinf(hi) && quad::looks_divergent(est)) return kInf;
  return total + est.value;
}

double tabulated_value(const TabulatedKernel& k, double r) {
  if (r <= k.r.front()) return k.a.front();
  if (r >= k.r.back()) return k.a.back();
  const auto it = std::upper_bound(k.r.begin(), k.r.end(), r);
  const auto j = static_cast<std::size_t>(it - k.r.begin());
  const double w = (r - k.r[j - 1]) / (k.r[j] - k.r[j - 1]);
  return (1.0 - w) * k.a[j - 1] + w * k.a[j];
}

// Exact integral of the interpolant over [lo, hi].
double tabulated_integral(const TabulatedKernel& k, double lo, double hi) {
  if (hi <= lo) return 0.0;
  double total = 0.0;
  auto piece = [&](double a, double b) {  // linear on [a, b]
    if (b > a) total += 0.5 * (tabulated_value(k, a) + tabulated_value(k, b)) * (b - a);
  };
  piece(lo, std::min(hi, k.r.front()));
  for (std::size_t j = 1; j < k.r.size(); ++j) piece(std::max(lo, k.r[j - 1]), std::min(hi, k.r[j]));
  const double past = std::max(lo, k.r.back());
  if (hi > past) {
    if (k.a.back() > 0.0 && std::isinf(hi)) return kInf;
    if (!std::isinf(hi)) total += k.a.back() * (hi - past);
  }
  return total;
}

double quadrature_integral(const std::function<double(double)>& f, double lo, double hi) {
  if (std::isinf(hi)) {
    const auto est = quad::integrate_to_infinity(f, lo);
    return quad::looks_divergent(est) ? kInf : est.value;
  }
  return quad::integrate(f, lo, hi).value;
}

}  // namespace

KernelSpec::KernelSpec(Family family, KernelArgument argument) : family_(std::move(family)), argument_(argument) {}

KernelSpec KernelSpec::rational(double H, double sigma, double beta, KernelArgument argument) {
  return {RationalKernel{H, sigma, beta}, argument};
}
KernelSpec KernelSpec::indicator(double R, KernelArgument argument) { return {IndicatorKernel{R}, argument}; }
KernelSpec KernelSpec::plateau(double M, double R, double tail_integral, KernelArgument argument) {
  return {PlateauKernel{M, R, tail_integral, {}}, argument};
}
KernelSpec KernelSpec::tabulated(std::vector<double> r, std::vector<double> a, KernelArgument argument) {
  return {TabulatedKernel{std::move(r), std::move(a)}, argument};
}
KernelSpec KernelSpec::custom(std::function<double(double)> fn, KernelArgument argument) {
  return {CustomKernel{std::move(fn), "custom"}, argument};
}

double KernelSpec::operator()(double arg) const {
  return std::visit(
      overloaded{
          [&](const RationalKernel& k) {
            const double base =
                argument_ == KernelArgument::distance ? k.sigma * k.sigma + arg * arg : k.sigma * k.sigma + arg;
            return k.beta == 1.0 ? k.H / base : k.H / std::pow(base, k.beta);
          },
          [&](const IndicatorKernel& k) { return arg <= k.R ? 1.0 : 0.0; },
          [&](const PlateauKernel& k) { return plateau_value(k, arg); },
          [&](const TabulatedKernel& k) { return tabulated_value(k, arg); },
          [&](const CustomKernel& k) { return k.fn(arg); },
      },
      family_);
}

double KernelSpec::at_distance(double d) const {
  return argument_ == KernelArgument::distance ? (*this)(d) : (*this)(d * d);
}

double KernelSpec::at_squared_distance(double s) const {
  return argument_ == KernelArgument::squared_distance ? (*this)(s) : (*this)(std::sqrt(s));
}

double KernelSpec::raw_integral(double lo, double hi) const {
  if (lo < 0.0 || hi < lo) throw DomainError("kernel integral needs 0 <= lo <= hi");
  if (lo == hi) return 0.0;
  return std::visit(
      overloaded{
          [&](const RationalKernel& k) {
            if (argument_ == KernelArgument::squared_distance) return rational_squared_integral(k, lo, hi);
            if (k.beta > 0.5) {
              return rational_distance_tail(k, lo) - (std::isinf(hi) ? 0.0 : rational_distance_tail(k, hi));
            }
            if (std::isinf(hi)) return kInf;
            return quadrature_integral([this](double r) { return (*this)(r); }, lo, hi);
          },
          [&](const IndicatorKernel& k) { return std::max(0.0, std::min(hi, k.R) - lo); },
          [&](const PlateauKernel& k) { return plateau_integral(k, lo, hi); },
          [&](const TabulatedKernel& k) { return tabulated_integral(k, lo, hi); },
          [&](const CustomKernel& k) { return quadrature_integral(k.fn, lo, hi); },
      },
      family_);
}

double KernelSpec::distance_tail_integral(double d0) const {
  if (d0 < 0.0) throw DomainError("tail integral needs a nonnegative lower limit");
  if (argument_ == KernelArgument::distance) return raw_integral(d0, kInf);
  // squared-distance convention: integrate a(u^2) du
  if (const auto* k = std::get_if<RationalKernel>(&family_)) return rational_distance_tail(*k, d0);
  if (const auto* k = std::get_if<IndicatorKernel>(&family_)) {
    return std::isinf(k->R) ? kInf : std::max(0.0, std::sqrt(k->R) - d0);
  }
  if (const auto* k = std::get_if<TabulatedKernel>(&family_); k && k->a.back() > 0.0) return kInf;
  auto f = [this](double u) { return (*this)(u * u); };
  if (const auto* k = std::get_if<PlateauKernel>(&family_)) {
    const double knee = std::sqrt(k->R);
    if (d0 < knee) return k->M * (knee - d0) + quadrature_integral(f, knee, kInf);
  }
  return quadrature_integral(f, d0, kInf);
}

void KernelSpec::validate() const {
  std::visit(overloaded{
                 [](const RationalKernel& k) {
                   if (!(k.H > 0.0) || !(k.sigma > 0.0) || !(k.beta >= 0.0)) {
                     throw ConfigError("rational kernel needs H > 0, sigma > 0, beta >= 0");
                   }
                 },
                 [](const IndicatorKernel& k) {
                   if (!(k.R > 0.0)) throw ConfigError("indicator kernel needs R > 0");
                 },
                 [](const PlateauKernel& k) {
                   if (!(k.M > 0.0) || !(k.R > 0.0)) throw ConfigError("plateau kernel needs M > 0 and R > 0");
                   if (!k.tail && !(k.tail_integral > 0.0 && std::isfinite(k.tail_integral))) {
                     throw ConfigError("plateau kernel needs a finite positive tail integral");
                   }
                 },
                 [](const TabulatedKernel& k) {
                   if (k.r.size() < 2 || k.r.size() != k.a.size()) {
                     throw ConfigError("tabulated kernel needs at least two (r, a) pairs of equal length");
                   }
                   for (std::size_t j = 1; j < k.r.size(); ++j) {
                     if (!(k.r[j] > k.r[j - 1])) throw ConfigError("tabulated kernel abscissae must increase");
                     if (k.a[j] > k.a[j - 1]) throw ConfigError("tabulated kernel must be nonincreasing");
                   }
                   if (k.r.front() < 0.0 || k.a.back() < 0.0) throw ConfigError("tabulated kernel must be nonnegative");
                 },
                 [](const CustomKernel& k) {
                   if (!k.fn) throw ConfigError("custom kernel has no function");
                 },
             },
             family_);
  // Sampled shape check, covers custom and plateau tails.
  double prev = (*this)(0.0);
  for (int k = 1; k <= 400; ++k) {
    const double r = 1e-3 * std::pow(1.05, k);
    const double a = (*this)(r);
    if (!(a >= 0.0)) throw ConfigError("kernel must be nonnegative");
    if (a > prev * (1.0 + 1e-12) + 1e-300) throw ConfigError("kernel must be nonincreasing");
    prev = a;
  }
}

double RepulsionSpec::operator()(double s) const {
  return std::visit(overloaded{
                        [](const NoRepulsion&) { return 0.0; },
                        [&](const PowerLawRepulsion& f) { return f.p == 2.0 ? 1.0 / (s * s) : std::pow(s, -f.p); },
                        [&](const CustomRepulsion& f) { return f.fn(s); },
                    },
                    family_);
}

double RepulsionSpec::tail_integral(double s) const {
  if (!(s > 0.0)) throw SingularConfiguration("repulsion potential is singular at zero distance");
  return std::visit(overloaded{
                        [](const NoRepulsion&) { return 0.0; },
                        [&](const PowerLawRepulsion& f) { return std::pow(s, 1.0 - f.p) / (f.p - 1.0); },
                        [&](const CustomRepulsion& f) { return quadrature_integral(f.fn, s, kInf); },
                    },
                    family_);
}

void RepulsionSpec::validate() const {
  if (const auto* f = std::get_if<PowerLawRepulsion>(&family_); f && !(f->p > 1.0)) {
    throw ConfigError("power-law repulsion needs p > 1");
  }
  if (const auto* f = std::get_if<CustomRepulsion>(&family_)) {
    if (!f->fn) throw ConfigError("custom repulsion has no function");
    for (double delta : {0.1, 1.0, 10.0}) {
      if (std::isinf(tail_integral(delta))) {
        throw ConfigError("repulsion tail integral diverges from delta = " + std::to_string(delta));
      }
    }
  }
}

double FrictionSpec::coefficient(int agent, double t) const {
  if (b.empty()) return 0.0;
  if (b.size() == 1) return b.front()(t);
  return b[static_cast<std::size_t>(agent)](t);
}

void FrictionSpec::validate(int count, double t_end) const {
  if (!(lambda >= 0.0)) throw ConfigError("friction bound Lambda must be nonnegative");
  if (b.size() > 1 && b.size() != static_cast<std::size_t>(count)) {
    throw ConfigError("friction needs one coefficient function per agent (or a single shared one)");
  }
  for (int i = 0; i < count && !b.empty(); ++i) {
    for (int k = 0; k <= 100; ++k) {
      const double t = t_end * k / 100.0;
      const double c = coefficient(i, t);
      if (!(c >= 0.0 && c <= lambda)) {
        throw ConfigError("friction coefficient of agent " + std::to_string(i) + " leaves [0, Lambda]");
      }
    }
  }
}

FrictionSpec FrictionSpec::constant(std::vector<double> values, double lambda) {
  FrictionSpec spec;
  spec.lambda = lambda;
  for (double c : values) spec.b.emplace_back([c](double) { return c; });
  return spec;
}

}  // namespace swarm
