#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "tvreg/dataset.hpp"

namespace tvreg {

/// Regression or error-scale function of (x, t).
using SurfaceFn = std::function<double(std::span<const double> x, double t)>;

enum class Design { A, B, C, D, AR, Diffusion };

std::string_view to_string(Design design) noexcept;
Design parse_design(std::string_view text);

struct GeneratorSpec {
  Design design = Design::A;
  std::size_t n = 1000;
  double phi = 1.0;  // noise level
  std::uint64_t seed = 0;
  double ma_truncation_eps = 1e-8;

  /// Throws ConfigError unless n >= 10, phi > 0 and eps in (0, 1e-6].
  void validate() const;
};

/// Regression function, error scale, and the candidate model that contains it.
struct TrueModel {
  SurfaceFn m;
  SurfaceFn sigma;
  ModelKind kind = ModelKind::I;
};

/// Number of retained MA terms: the smallest L with (1/4)^L < eps.
std::size_t ma_truncation_terms(double eps);

/// x_i = G(i/n; H_i) = sum_{l=0}^{L-1} a(i/n)^l xi_{i-l} with a(t) = (t - 1/2)^2.
///
/// xi_1..xi_n are drawn first from the regressor substream of `seed`, then
/// xi_0, xi_{-1}, ... in that order, so each xi_k is independent of L.
std::vector<double> gen_regressors_ma(std::size_t n, std::uint64_t seed, double eps = 1e-8);

/// Regression function and error scale of designs A-D at noise level phi.
TrueModel make_design(Design design, double phi);

/// y_i = m(x_i, i/n) + sigma(x_i, i/n) eta_i for designs A-D, with the
/// regressors from gen_regressors_ma and eta from an independent substream.
std::pair<Dataset, TrueModel> simulate(const GeneratorSpec& spec);

/// Time-varying nonlinear autoregression y_i = m(x_i, i/n) + sigma(x_i, i/n) eta_i
/// with x_i = (y_{i-1}, ..., y_{i-d}). The initial lags come from burn_in steps
/// of the t = 0 recursion started at zero. Contraction of (m, sigma) is the
/// caller's responsibility; throws NumericalError if |y_i| exceeds 1e12.
Dataset simulate_ar(std::size_t n, const SurfaceFn& m, const SurfaceFn& sigma, std::size_t d,
                    std::uint64_t seed, std::size_t burn_in = 200);

/// Daily short-rate path r_0..r_n from the Euler scheme
/// r_{i+1} = r_i + mu(r_i, i/n) delta + sigma(r_i, i/n) sqrt(delta) eta_i
/// with delta = 1/250, a mean-reverting drift whose level varies with time,
/// and a square-root volatility scaled by phi.
std::vector<double> simulate_rates(std::size_t n, double phi, std::uint64_t seed);

/// Drift and volatility used by simulate_rates (rates in percent).
TrueModel rate_model(double phi);

/// x_i = r_i, y_i = r_{i+1} - r_i; n = r.size() - 1, d = 1.
Dataset difference_rates(std::span<const double> r);

}  // namespace tvreg
