#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tvreg/dataset.hpp"
#include "tvreg/kernels.hpp"

namespace tvreg {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

/// Compact evaluation set: a box for the predictors and an interior time
/// interval. Only observations inside both enter the residual sum of squares.
struct Region {
  std::vector<Interval> x_box;
  Interval t_interval{0.2, 0.8};

  /// Throws ConfigError unless the box has d non-empty intervals and
  /// 0 < t_lo < t_hi < 1.
  void validate(std::size_t d) const;
  bool contains_x(std::span<const double> u) const noexcept;
  bool contains_t(double t) const noexcept { return t_interval.contains(t); }
};

/// Local linear temporal weights w_{b,i}(t) on the grid i/n, i = 1..n.
struct TemporalWeights {
  std::vector<double> w;
  double t = 0.0;
  double b = 0.0;
};

/// Weights restricted to the contiguous run of design times within b of t.
struct WindowWeights {
  std::size_t first = 0;  // index of the first time in the window
  std::vector<double> w;  // weights for times[first], times[first + 1], ...
};

/// w_i = K((t_i - t)/b) {S2 - (t - t_i) S1} / {S2 S0 - S1^2} for ascending
/// design times. Throws DegenerateWindow if fewer than two times carry kernel
/// mass or the determinant is below 1e-14 S0 S2.
WindowWeights local_linear_window(std::span<const double> times, double t, double b, Kernel1D k);

TemporalWeights local_linear_weights(std::size_t n, double t, double b, Kernel1D k);

/// Bandwidths a fit actually used; zero when a model has no such bandwidth.
struct FitBandwidths {
  double b = 0.0;
  double h = 0.0;
};

/// In-sample fit over the restricted index set {i : t_i in T, x_i in X}.
struct FitResult {
  ModelKind kind = ModelKind::I;
  std::vector<std::size_t> index;  // rows of the restricted set, ascending
  std::vector<double> fitted;      // fitted value for each entry of index
  double rss = 0.0;
  std::size_t n_used = 0;
  FitBandwidths bandwidths;
};

/// Time-varying kernel regression m(u, t) = T(u, t) / f(u, t) with product
/// spatial kernel h^{-d} prod K(v_j / h) and local linear temporal weights.
class TimeVaryingKernelEstimator {
 public:
  TimeVaryingKernelEstimator(const Dataset& data, double b, double h, Kernel1D k);
  TimeVaryingKernelEstimator(Dataset&&, double, double, Kernel1D) = delete;

  double density(std::span<const double> u, double t) const;
  /// Throws DegenerateDensity (index = `label`) if the density is <= 1e-12.
  double regression(std::span<const double> u, double t, std::size_t label = 0) const;

 private:
  struct Sums {
    double density;
    double numerator;
  };
  Sums sums(std::span<const double> u, double t) const;

  const Dataset* data_;
  double b_;
  double h_;
  Kernel1D k_;
};

/// Time-constant Nadaraya-Watson regression mu(u) = T(u) / f(u).
class NadarayaWatsonEstimator {
 public:
  NadarayaWatsonEstimator(const Dataset& data, double h, Kernel1D k);

  double density(std::span<const double> u) const;
  double regression(std::span<const double> u, std::size_t label = 0) const;

 private:
  struct Sums {
    double density;
    double numerator;
  };
  Sums sums(std::span<const double> u) const;

  std::size_t d_;
  double h_;
  Kernel1D k_;
  std::size_t n_;
  // Rows sorted by their first coordinate for windowed search.
  std::vector<double> key_;
  std::vector<double> x_;
  std::vector<double> y_;
};

/// Kernel-weighted least squares in time (Priestley-Chao form),
/// beta(t) = {sum z_i z_i' K_b(t_i - t)}^{-1} sum z_i y_i K_b(t_i - t) with
/// z_i = (1, x_i) when an intercept is fitted.
class VaryingCoefficientEstimator {
 public:
  VaryingCoefficientEstimator(const Dataset& data, double b, Kernel1D k, bool intercept);
  VaryingCoefficientEstimator(Dataset&&, double, Kernel1D, bool) = delete;

  std::vector<double> coefficients(double t) const;
  double predict(std::span<const double> u, double t) const;
  std::size_t parameters() const noexcept { return data_->dim() + (intercept_ ? 1 : 0); }

 private:
  const Dataset* data_;
  double b_;
  Kernel1D k_;
  bool intercept_;
};

/// Ordinary least squares over the full sample.
class LinearEstimator {
 public:
  LinearEstimator(const Dataset& data, bool intercept);

  std::span<const double> coefficients() const noexcept { return theta_; }
  double predict(std::span<const double> u) const noexcept;

 private:
  bool intercept_;
  std::vector<double> theta_;
};

/// Solves the symmetric system G beta = r, adding a ridge of 1e-10 trace/p
/// when the smallest eigenvalue is below 1e-8 of the largest. Throws
/// SingularGram (tagged with t) if still below 1e-10 after the ridge.
std::vector<double> solve_gram(std::span<const double> gram, std::span<const double> rhs, double t);

FitResult fit_model_I(const Dataset& data, const Region& region, double b, double h, Kernel1D k);
FitResult fit_model_II(const Dataset& data, const Region& region, double h, Kernel1D k);
FitResult fit_model_III(const Dataset& data, const Region& region, double b, Kernel1D k,
                        bool intercept);
FitResult fit_model_IV(const Dataset& data, const Region& region, bool intercept);

/// f(u, t) = sum_i K_{S,h}(u - x_i) w_{b,i}(t).
double eval_density(const Dataset& data, std::span<const double> u, double t, double b, double h,
                    Kernel1D k);

/// Rows of the restricted set {i : t_i in T, x_i in X}, ascending.
std::vector<std::size_t> restricted_index(const Dataset& data, const Region& region);

}  // namespace tvreg
