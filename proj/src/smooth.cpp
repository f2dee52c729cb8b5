#include "tvreg/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "tvreg/error.hpp"
#include "tvreg/parallel.hpp"

namespace tvreg {
namespace {

constexpr double kDensityFloor = 1e-12;

void require_ascending(std::span<const double> times) {
  if (!std::is_sorted(times.begin(), times.end()))
    throw ConfigError("observation times must be non-decreasing");
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ConfigError(std::string(name) + " must be positive and finite");
}

double design_value(std::span<const double> u, std::size_t column, bool intercept) {
  if (intercept) return column == 0 ? 1.0 : u[column - 1];
  return u[column];
}

template <class Predict>
FitResult fit_restricted(ModelKind kind, const Dataset& data, const Region& region, Predict&& predict) {
  FitResult result;
  result.kind = kind;
  result.index = restricted_index(data, region);
  result.n_used = result.index.size();
  result.fitted.resize(result.index.size());
  parallel_for(result.index.size(), [&](std::size_t k) {
    const std::size_t i = result.index[k];
    result.fitted[k] = predict(i);
  });
  double rss = 0.0;
  for (std::size_t k = 0; k < result.index.size(); ++k) {
    const double r = data.y(result.index[k]) - result.fitted[k];
    rss += r * r;
  }
  result.rss = rss;
  return result;
}

}  // namespace

void Region::validate(std::size_t d) const {
  if (x_box.size() != d)
    throw ConfigError("region has " + std::to_string(x_box.size()) + " predictor intervals, expected " +
                      std::to_string(d));
  for (const auto& iv : x_box)
    if (!(iv.lo < iv.hi)) throw ConfigError("region predictor interval must satisfy lo < hi");
  if (!(0.0 < t_interval.lo && t_interval.lo < t_interval.hi && t_interval.hi < 1.0))
    throw ConfigError("region time interval must satisfy 0 < lo < hi < 1");
}

bool Region::contains_x(std::span<const double> u) const noexcept {
  for (std::size_t j = 0; j < x_box.size(); ++j)
    if (!x_box[j].contains(u[j])) return false;
  return true;
}

std::vector<std::size_t> restricted_index(const Dataset& data, const Region& region) {
  region.validate(data.dim());
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (region.contains_t(data.time(i)) && region.contains_x(data.row(i))) index.push_back(i);
  return index;
}

WindowWeights local_linear_window(std::span<const double> times, double t, double b, Kernel1D k) {
  require_positive(b, "temporal bandwidth");
  const auto lo = std::lower_bound(times.begin(), times.end(), t - b);
  const auto hi = std::upper_bound(lo, times.end(), t + b);
  WindowWeights out;
  out.first = static_cast<std::size_t>(lo - times.begin());
  const std::size_t count = static_cast<std::size_t>(hi - lo);
  out.w.resize(count);

  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  std::size_t support = 0;
  for (std::size_t j = 0; j < count; ++j) {
    const double dt = t - times[out.first + j];
    const double kv = k(-dt / b);
    out.w[j] = kv;
    if (kv > 0.0) ++support;
    s0 += kv;
    s1 += kv * dt;
    s2 += kv * dt * dt;
  }
  if (support < 2) throw DegenerateWindow(t, std::to_string(support) + " design point(s) in window");
  const double det = s2 * s0 - s1 * s1;
  if (!(det > 1e-14 * s0 * s2)) throw DegenerateWindow(t, "vanishing local linear determinant");

  // Normalising by the accumulated numerator equals dividing by det in exact
  // arithmetic and keeps sum(w) = 1 to rounding.
  double total = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double dt = t - times[out.first + j];
    out.w[j] *= s2 - dt * s1;
    total += out.w[j];
  }
  for (double& w : out.w) w /= total;
  return out;
}

TemporalWeights local_linear_weights(std::size_t n, double t, double b, Kernel1D k) {
  if (n < 2) throw ConfigError("local linear weights need n >= 2");
  std::vector<double> grid(n);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = static_cast<double>(i + 1) / dn;
  WindowWeights window = local_linear_window(grid, t, b, k);
  TemporalWeights out;
  out.t = t;
  out.b = b;
  out.w.assign(n, 0.0);
  std::copy(window.w.begin(), window.w.end(), out.w.begin() + static_cast<std::ptrdiff_t>(window.first));
  return out;
}

// ---------------------------------------------------------------- model I

TimeVaryingKernelEstimator::TimeVaryingKernelEstimator(const Dataset& data, double b, double h,
                                                       Kernel1D k)
    : data_(&data), b_(b), h_(h), k_(k) {
  require_positive(b, "temporal bandwidth");
  require_positive(h, "spatial bandwidth");
  require_ascending(data.times());
}

TimeVaryingKernelEstimator::Sums TimeVaryingKernelEstimator::sums(std::span<const double> u,
                                                                  double t) const {
  const WindowWeights window = local_linear_window(data_->times(), t, b_, k_);
  const std::size_t d = data_->dim();
  double f = 0.0, num = 0.0;
  for (std::size_t j = 0; j < window.w.size(); ++j) {
    const std::size_t i = window.first + j;
    const auto xi = data_->row(i);
    double kv = 1.0;
    for (std::size_t c = 0; c < d && kv != 0.0; ++c) kv *= k_((u[c] - xi[c]) / h_);
    if (kv == 0.0) continue;
    const double weight = kv * window.w[j];
    f += weight;
    num += weight * data_->y(i);
  }
  const double scale = std::pow(h_, -static_cast<double>(d));
  return {f * scale, num * scale};
}

double TimeVaryingKernelEstimator::density(std::span<const double> u, double t) const {
  return sums(u, t).density;
}

double TimeVaryingKernelEstimator::regression(std::span<const double> u, double t,
                                              std::size_t label) const {
  const Sums s = sums(u, t);
  if (!(s.density > kDensityFloor)) throw DegenerateDensity(label, s.density);
  return s.numerator / s.density;
}

// --------------------------------------------------------------- model II

NadarayaWatsonEstimator::NadarayaWatsonEstimator(const Dataset& data, double h, Kernel1D k)
    : d_(data.dim()), h_(h), k_(k), n_(data.size()) {
  require_positive(h, "spatial bandwidth");
  std::vector<std::size_t> order(n_);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return data.row(a)[0] < data.row(b)[0]; });
  key_.reserve(n_);
  x_.reserve(n_ * d_);
  y_.reserve(n_);
  for (std::size_t i : order) {
    const auto r = data.row(i);
    key_.push_back(r[0]);
    x_.insert(x_.end(), r.begin(), r.end());
    y_.push_back(data.y(i));
  }
}

NadarayaWatsonEstimator::Sums NadarayaWatsonEstimator::sums(std::span<const double> u) const {
  const auto lo = std::lower_bound(key_.begin(), key_.end(), u[0] - h_);
  const auto hi = std::upper_bound(lo, key_.end(), u[0] + h_);
  double f = 0.0, num = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const auto i = static_cast<std::size_t>(it - key_.begin());
    const double* xi = x_.data() + i * d_;
    double kv = 1.0;
    for (std::size_t c = 0; c < d_ && kv != 0.0; ++c) kv *= k_((u[c] - xi[c]) / h_);
    if (kv == 0.0) continue;
    f += kv;
    num += kv * y_[i];
  }
  const double scale = 1.0 / (static_cast<double>(n_) * std::pow(h_, static_cast<double>(d_)));
  return {f * scale, num * scale};
}

double NadarayaWatsonEstimator::density(std::span<const double> u) const { return sums(u).density; }

double NadarayaWatsonEstimator::regression(std::span<const double> u, std::size_t label) const {
  const Sums s = sums(u);
  if (!(s.density > kDensityFloor)) throw DegenerateDensity(label, s.density);
  return s.numerator / s.density;
}

// -------------------------------------------------------------- model III

std::vector<double> solve_gram(std::span<const double> gram, std::span<const double> rhs, double t) {
  const auto p = static_cast<Eigen::Index>(rhs.size());
  Eigen::MatrixXd g = Eigen::Map<const Eigen::MatrixXd>(gram.data(), p, p);
  const Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(rhs.data(), p);

  auto extreme_eigenvalues = [](const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return std::pair{ev.minCoeff(), ev.maxCoeff()};
  };

  auto [lo, hi] = extreme_eigenvalues(g);
  if (!(hi > 0.0)) throw SingularGram(t, "no kernel mass");
  if (lo < 1e-8 * hi) {
    g.diagonal().array() += 1e-10 * g.trace() / static_cast<double>(p);
    std::tie(lo, hi) = extreme_eigenvalues(g);
    if (lo < 1e-10 * hi)
      throw SingularGram(t, "eigenvalue ratio " + std::to_string(lo / hi) + " after ridge");
  }
  const Eigen::VectorXd beta = g.ldlt().solve(r);
  return {beta.data(), beta.data() + p};
}

VaryingCoefficientEstimator::VaryingCoefficientEstimator(const Dataset& data, double b, Kernel1D k,
                                                         bool intercept)
    : data_(&data), b_(b), k_(k), intercept_(intercept) {
  require_positive(b, "temporal bandwidth");
  require_ascending(data.times());
}

std::vector<double> VaryingCoefficientEstimator::coefficients(double t) const {
  const std::size_t p = parameters();
  const auto times = data_->times();
  const auto lo = std::lower_bound(times.begin(), times.end(), t - b_);
  const auto hi = std::upper_bound(lo, times.end(), t + b_);
  std::vector<double> gram(p * p, 0.0), rhs(p, 0.0);
  for (auto it = lo; it != hi; ++it) {
    const auto i = static_cast<std::size_t>(it - times.begin());
    const double kv = k_((*it - t) / b_) / b_;
    if (kv == 0.0) continue;
    const auto xi = data_->row(i);
    for (std::size_t a = 0; a < p; ++a) {
      const double za = design_value(xi, a, intercept_);
      rhs[a] += kv * za * data_->y(i);
      for (std::size_t c = 0; c <= a; ++c) gram[a * p + c] += kv * za * design_value(xi, c, intercept_);
    }
  }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t c = a + 1; c < p; ++c) gram[a * p + c] = gram[c * p + a];
  return solve_gram(gram, rhs, t);
}

double VaryingCoefficientEstimator::predict(std::span<const double> u, double t) const {
  const auto beta = coefficients(t);
  double value = 0.0;
  for (std::size_t a = 0; a < beta.size(); ++a) value += beta[a] * design_value(u, a, intercept_);
  return value;
}

// --------------------------------------------------------------- model IV

LinearEstimator::LinearEstimator(const Dataset& data, bool intercept) : intercept_(intercept) {
  const std::size_t p = data.dim() + (intercept ? 1 : 0);
  if (data.size() < p) throw ConfigError("linear fit needs at least as many rows as parameters");
  std::vector<double> gram(p * p, 0.0), rhs(p, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto xi = data.row(i);
    for (std::size_t a = 0; a < p; ++a) {
      const double za = design_value(xi, a, intercept);
      rhs[a] += za * data.y(i);
      for (std::size_t c = 0; c <= a; ++c) gram[a * p + c] += za * design_value(xi, c, intercept);
    }
  }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t c = a + 1; c < p; ++c) gram[a * p + c] = gram[c * p + a];
  theta_ = solve_gram(gram, rhs, 0.0);
}

double LinearEstimator::predict(std::span<const double> u) const noexcept {
  double value = 0.0;
  for (std::size_t a = 0; a < theta_.size(); ++a) value += theta_[a] * design_value(u, a, intercept_);
  return value;
}

// ------------------------------------------------------------------ fits

FitResult fit_model_I(const Dataset& data, const Region& region, double b, double h, Kernel1D k) {
  const TimeVaryingKernelEstimator est(data, b, h, k);
  FitResult fit = fit_restricted(ModelKind::I, data, region, [&](std::size_t i) {
    return est.regression(data.row(i), data.time(i), i);
  });
  fit.bandwidths = {b, h};
  return fit;
}

FitResult fit_model_II(const Dataset& data, const Region& region, double h, Kernel1D k) {
  const NadarayaWatsonEstimator est(data, h, k);
  FitResult fit = fit_restricted(ModelKind::II, data, region,
                                 [&](std::size_t i) { return est.regression(data.row(i), i); });
  fit.bandwidths = {0.0, h};
  return fit;
}

FitResult fit_model_III(const Dataset& data, const Region& region, double b, Kernel1D k,
                        bool intercept) {
  const VaryingCoefficientEstimator est(data, b, k, intercept);
  FitResult fit = fit_restricted(ModelKind::III, data, region, [&](std::size_t i) {
    return est.predict(data.row(i), data.time(i));
  });
  fit.bandwidths = {b, 0.0};
  return fit;
}

FitResult fit_model_IV(const Dataset& data, const Region& region, bool intercept) {
  const LinearEstimator est(data, intercept);
  return fit_restricted(ModelKind::IV, data, region,
                        [&](std::size_t i) { return est.predict(data.row(i)); });
}

double eval_density(const Dataset& data, std::span<const double> u, double t, double b, double h,
                    Kernel1D k) {
  return TimeVaryingKernelEstimator(data, b, h, k).density(u, t);
}

}  // namespace tvreg
