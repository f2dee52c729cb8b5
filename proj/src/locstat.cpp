#include "tvreg/locstat.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "tvreg/error.hpp"
#include "tvreg/rng.hpp"

namespace tvreg {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRateDelta = 1.0 / 250.0;

double ma_coefficient(double t) { return (t - 0.5) * (t - 0.5); }

}  // namespace

std::string_view to_string(Design design) noexcept {
  switch (design) {
    case Design::A:
      return "a";
    case Design::B:
      return "b";
    case Design::C:
      return "c";
    case Design::D:
      return "d";
    case Design::AR:
      return "ar";
    case Design::Diffusion:
      return "diffusion";
  }
  return "?";
}

Design parse_design(std::string_view text) {
  for (Design d : {Design::A, Design::B, Design::C, Design::D, Design::AR, Design::Diffusion}) {
    if (text == to_string(d)) return d;
  }
  if (text.size() == 1 && text[0] >= 'A' && text[0] <= 'D') return static_cast<Design>(text[0] - 'A');
  throw ConfigError("unknown design '" + std::string(text) + "'");
}

void GeneratorSpec::validate() const {
  if (n < 10) throw ConfigError("sample size must be at least 10, got " + std::to_string(n));
  if (!(phi > 0.0)) throw ConfigError("noise level phi must be positive");
  if (!(ma_truncation_eps > 0.0 && ma_truncation_eps <= 1e-6))
    throw ConfigError("MA truncation eps must lie in (0, 1e-6]");
}

std::size_t ma_truncation_terms(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("MA truncation eps must lie in (0, 1)");
  auto terms = static_cast<std::size_t>(std::ceil(std::log(eps) / std::log(0.25)));
  while (std::pow(0.25, static_cast<double>(terms)) >= eps) ++terms;
  while (terms > 1 && std::pow(0.25, static_cast<double>(terms - 1)) < eps) --terms;
  return terms;
}

std::vector<double> gen_regressors_ma(std::size_t n, std::uint64_t seed, double eps) {
  if (n < 10) throw ConfigError("sample size must be at least 10, got " + std::to_string(n));
  const std::size_t terms = ma_truncation_terms(eps);

  // innovations[back + k - 1] holds xi_k for k = 1 - back .. n
  const std::size_t back = terms - 1;
  std::vector<double> innovations(back + n);
  auto engine = make_stream(seed, StreamRole::Regressor);
  std::normal_distribution<double> normal;
  for (std::size_t k = 0; k < n; ++k) innovations[back + k] = normal(engine);
  for (std::size_t k = 0; k < back; ++k) innovations[back - 1 - k] = normal(engine);

  std::vector<double> x(n);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = ma_coefficient(static_cast<double>(i + 1) / dn);
    // Horner from the oldest retained innovation.
    double value = 0.0;
    for (std::size_t l = terms; l-- > 0;) value = value * a + innovations[back + i - l];
    x[i] = value;
  }
  return x;
}

TrueModel make_design(Design design, double phi) {
  switch (design) {
    case Design::A:
      return {[](std::span<const double> x, double t) {
                return 2.5 * std::sin(2 * kPi * t) * std::cos(kPi * x[0]);
              },
              [phi](std::span<const double> x, double t) { return phi * std::fabs(t * x[0]) / 2; },
              ModelKind::I};
    case Design::B:
      return {[](std::span<const double> x, double) { return std::exp(x[0]); },
              [phi](std::span<const double> x, double t) { return phi * t * std::exp(x[0] / 3); },
              ModelKind::II};
    case Design::C:
      return {[](std::span<const double> x, double t) {
                return 5 * t + 4 * std::cos(2 * kPi * t) * x[0];
              },
              [phi](std::span<const double> x, double t) { return phi * std::exp(t * x[0] / 2); },
              ModelKind::III};
    case Design::D:
      return {[](std::span<const double> x, double) { return 2 + 3 * x[0]; },
              [phi](std::span<const double> x, double t) { return phi * std::fabs(x[0] / 3 + t); },
              ModelKind::IV};
    default:
      throw ConfigError("make_design supports designs a-d only, got '" +
                        std::string(to_string(design)) + "'");
  }
}

std::pair<Dataset, TrueModel> simulate(const GeneratorSpec& spec) {
  spec.validate();
  TrueModel truth = make_design(spec.design, spec.phi);
  std::vector<double> x = gen_regressors_ma(spec.n, spec.seed, spec.ma_truncation_eps);

  auto engine = make_stream(spec.seed, StreamRole::Noise);
  std::normal_distribution<double> normal;
  std::vector<double> y(spec.n);
  const double dn = static_cast<double>(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double t = static_cast<double>(i + 1) / dn;
    std::span<const double> xi(&x[i], 1);
    y[i] = truth.m(xi, t) + truth.sigma(xi, t) * normal(engine);
  }
  return {Dataset(std::move(y), std::move(x), 1), std::move(truth)};
}

Dataset simulate_ar(std::size_t n, const SurfaceFn& m, const SurfaceFn& sigma, std::size_t d,
                    std::uint64_t seed, std::size_t burn_in) {
  if (n < 1) throw ConfigError("simulate_ar needs n >= 1");
  if (d < 1) throw ConfigError("simulate_ar needs d >= 1");
  auto engine = make_stream(seed, StreamRole::Noise);
  std::normal_distribution<double> normal;

  // lags[0] = y_{i-1}, ..., lags[d-1] = y_{i-d}
  std::vector<double> lags(d, 0.0);
  auto step = [&](double t, std::size_t index) {
    const double value = m(lags, t) + sigma(lags, t) * normal(engine);
    if (!std::isfinite(value) || std::fabs(value) > 1e12)
      throw NumericalError("autoregression diverged at step " + std::to_string(index) +
                           " (|y| > 1e12); check the contraction condition");
    return value;
  };

  for (std::size_t s = 0; s < burn_in; ++s) {
    const double value = step(0.0, 0);
    for (std::size_t k = d; k-- > 1;) lags[k] = lags[k - 1];
    lags[0] = value;
  }

  std::vector<double> y(n), x(n * d);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(lags.begin(), lags.end(), x.begin() + static_cast<std::ptrdiff_t>(i * d));
    y[i] = step(static_cast<double>(i + 1) / dn, i + 1);
    for (std::size_t k = d; k-- > 1;) lags[k] = lags[k - 1];
    lags[0] = y[i];
  }
  return Dataset(std::move(y), std::move(x), d);
}

TrueModel rate_model(double phi) {
  // mu(r, t) = 1.5 (4 + 2 sin(2 pi t) - r), vol(r, t) = 0.8 phi sqrt(r^+), on the
  // differenced scale m = mu delta and sigma = vol sqrt(delta).
  return {[](std::span<const double> r, double t) {
            return 1.5 * (4.0 + 2.0 * std::sin(2 * kPi * t) - r[0]) * kRateDelta;
          },
          [phi](std::span<const double> r, double) {
            return 0.8 * phi * std::sqrt(std::max(r[0], 0.0)) * std::sqrt(kRateDelta);
          },
          ModelKind::III};
}

std::vector<double> simulate_rates(std::size_t n, double phi, std::uint64_t seed) {
  if (n < 10) throw ConfigError("rate path needs at least 10 steps");
  if (!(phi > 0.0)) throw ConfigError("noise level phi must be positive");
  const TrueModel model = rate_model(phi);
  auto engine = make_stream(seed, StreamRole::Noise);
  std::normal_distribution<double> normal;
  std::vector<double> r(n + 1);
  r[0] = 4.0;
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> ri(&r[i], 1);
    const double t = static_cast<double>(i + 1) / dn;
    r[i + 1] = r[i] + model.m(ri, t) + model.sigma(ri, t) * normal(engine);
  }
  return r;
}

Dataset difference_rates(std::span<const double> r) {
  if (r.size() < 11)
    throw ConfigError("rate series needs at least 11 entries, got " + std::to_string(r.size()));
  for (std::size_t i = 0; i < r.size(); ++i)
    if (!std::isfinite(r[i]))
      throw ConfigError("non-finite rate at index " + std::to_string(i) + " of the series");
  const std::size_t n = r.size() - 1;
  std::vector<double> y(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = r[i];
    y[i] = r[i + 1] - r[i];
  }
  return Dataset(std::move(y), std::move(x), 1);
}

}  // namespace tvreg
