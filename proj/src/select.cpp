#include "tvreg/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <string>

#include "tvreg/error.hpp"
#include "tvreg/parallel.hpp"

namespace tvreg {
namespace {

constexpr std::size_t kMinSample = 20;

// Residual sums below this fraction of sum(y^2) are rounding noise of an
// exact fit and count as zero.
constexpr double kZeroRssRelative = 1e-24;

std::size_t slot(ModelKind kind) { return static_cast<std::size_t>(kind); }

[[noreturn]] void rethrow_annotated(ModelKind kind) {
  const std::string prefix = "model " + std::string(to_string(kind)) + ": ";
  try {
    throw;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::Config) throw ConfigError(prefix + e.what());
    throw NumericalError(prefix + e.what());
  }
}

double log_rss_over_n(double rss, double n, double energy) {
  if (rss <= kZeroRssRelative * energy || rss <= 0.0) return kLogRssFloor;
  return std::max(std::log(rss / n), kLogRssFloor);
}

// Estimators of all four models on one training set.
class FittedModels {
 public:
  FittedModels(const Dataset& train, const BandwidthPlan& plan, Kernel1D k, bool intercept)
      : model_i_(train, plan.b_I, plan.h_I, k),
        model_ii_(train, plan.h_II, k),
        model_iii_(train, plan.b_III, k, intercept),
        model_iv_(train, intercept) {}

  double predict(ModelKind kind, std::span<const double> u, double t) const {
    switch (kind) {
      case ModelKind::I:
        return model_i_.regression(u, t);
      case ModelKind::II:
        return model_ii_.regression(u);
      case ModelKind::III:
        return model_iii_.predict(u, t);
      case ModelKind::IV:
        return model_iv_.predict(u);
    }
    return 0.0;
  }

 private:
  TimeVaryingKernelEstimator model_i_;
  NadarayaWatsonEstimator model_ii_;
  VaryingCoefficientEstimator model_iii_;
  LinearEstimator model_iv_;
};

ModelKind argmin_gic(const std::array<ModelScore, 4>& models) {
  // Simplest first so that exact ties keep the simpler model.
  ModelKind best = ModelKind::IV;
  for (ModelKind kind : {ModelKind::III, ModelKind::II, ModelKind::I})
    if (models[slot(kind)].gic < models[slot(best)].gic) best = kind;
  return best;
}

}  // namespace

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw ConfigError("quantile of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double interquartile_range(std::span<const double> values) {
  return quantile(values, 0.75) - quantile(values, 0.25);
}

BandwidthPlan make_plan(std::size_t n, std::size_t d, const BandwidthConstants& constants,
                        std::vector<double> iqr) {
  if (n < 2) throw ConfigError("bandwidth plan needs n >= 2");
  if (d < 1) throw ConfigError("bandwidth plan needs d >= 1");
  if (iqr.size() != d) throw ConfigError("bandwidth plan needs one IQR per predictor");
  for (double c : {constants.c_b_I, constants.c_h_I, constants.c_h_II, constants.c_b_III})
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("bandwidth constants must be positive");
  for (double q : iqr)
    if (!(q > 0.0)) throw ConfigError("interquartile ranges must be positive");

  BandwidthPlan plan;
  const double dn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  plan.b_I = constants.c_b_I * std::pow(dn, -1.0 / (dd + 5.0));
  plan.h_I = constants.c_h_I * std::pow(dn, -1.0 / (dd + 5.0));
  plan.h_II = constants.c_h_II * std::pow(dn, -1.0 / (dd + 4.0));
  plan.b_III = constants.c_b_III * std::pow(dn, -1.0 / 5.0);
  plan.constants = constants;
  plan.iqr = std::move(iqr);
  plan.n = n;
  plan.d = d;
  return plan;
}

BandwidthPlan BandwidthPlan::rescaled(std::size_t n_new) const {
  return make_plan(n_new, d, constants, iqr);
}

BandwidthPlan default_bandwidths(const Dataset& data) {
  if (data.size() < kMinSample)
    throw ConfigError("default bandwidths need n >= " + std::to_string(kMinSample) + ", got " +
                      std::to_string(data.size()));
  const std::size_t d = data.dim();
  std::vector<double> iqr(d);
  std::vector<double> column(data.size());
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < data.size(); ++i) column[i] = data.row(i)[k];
    iqr[k] = interquartile_range(column);
    if (!(iqr[k] > 0.0))
      throw ConfigError("ZeroIQR: predictor " + std::to_string(k + 1) + " has zero interquartile range");
  }
  const double c_h = std::accumulate(iqr.begin(), iqr.end(), 1.0, std::multiplies<>());
  BandwidthConstants constants;
  constants.c_h_I = c_h;
  constants.c_h_II = c_h;
  return make_plan(data.size(), d, constants, std::move(iqr));
}

double model_df(ModelKind kind, const BandwidthPlan& plan, std::size_t d_eff) {
  double volume = 1.0;
  for (double q : plan.iqr) volume *= 2.0 * q;
  const double dd = static_cast<double>(plan.d);
  switch (kind) {
    case ModelKind::IV:
      return static_cast<double>(d_eff);
    case ModelKind::III:
      return static_cast<double>(d_eff) / plan.b_III;
    case ModelKind::II:
      return volume / std::pow(plan.h_II, dd);
    case ModelKind::I:
      return volume / (plan.b_I * std::pow(plan.h_I, dd));
  }
  return 0.0;
}

double tau_schedule(double n, std::size_t d, double c) {
  if (!(c > 0.0)) throw ConfigError("penalty constant c must be positive");
  if (!(n >= 2.0)) throw ConfigError("tau schedule needs n >= 2");
  const double dd = static_cast<double>(d);
  return c * std::pow(n, -(dd + 3.0) / (dd + 4.0)) * std::log(n);
}

ModelFits fit_all(const Dataset& data, const Region& region, const BandwidthPlan& plan, Kernel1D k,
                  bool intercept) {
  ModelFits out;
  out.n = data.size();
  for (ModelKind kind : kAllModels) {
    try {
      switch (kind) {
        case ModelKind::I:
          out.fits[slot(kind)] = fit_model_I(data, region, plan.b_I, plan.h_I, k);
          break;
        case ModelKind::II:
          out.fits[slot(kind)] = fit_model_II(data, region, plan.h_II, k);
          break;
        case ModelKind::III:
          out.fits[slot(kind)] = fit_model_III(data, region, plan.b_III, k, intercept);
          break;
        case ModelKind::IV:
          out.fits[slot(kind)] = fit_model_IV(data, region, intercept);
          break;
      }
    } catch (const Error&) {
      rethrow_annotated(kind);
    }
  }
  for (std::size_t i : out.fits[0].index) out.response_energy += data.y(i) * data.y(i);
  return out;
}

SelectionReport score_fits(const ModelFits& fits, const BandwidthPlan& plan, double tau,
                           std::size_t d_eff) {
  SelectionReport report;
  report.tau = tau;
  report.bandwidths = plan;
  report.n = fits.n;
  report.d_eff = d_eff;
  const double n = static_cast<double>(fits.n);
  for (ModelKind kind : kAllModels) {
    const FitResult& fit = fits.fits[slot(kind)];
    ModelScore& s = report.models[slot(kind)];
    s.kind = kind;
    s.rss = fit.rss;
    s.n_used = fit.n_used;
    s.log_rss_over_n = log_rss_over_n(fit.rss, n, fits.response_energy);
    s.df = model_df(kind, plan, d_eff);
    s.gic = s.log_rss_over_n + tau * s.df;
  }
  report.chosen = argmin_gic(report.models);
  return report;
}

SelectionReport gic(const Dataset& data, const Region& region, const BandwidthPlan& plan, double tau,
                    Kernel1D k, bool intercept) {
  const std::size_t d_eff = data.dim() + (intercept ? 1 : 0);
  return score_fits(fit_all(data, region, plan, k, intercept), plan, tau, d_eff);
}

void CvPlan::validate() const {
  if (k_folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (c_grid.empty()) throw ConfigError("penalty grid is empty");
  for (double c : c_grid)
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("penalty grid values must be positive");
}

std::vector<std::vector<std::size_t>> fold_rows(std::size_t n, std::size_t k_folds, FoldStyle style) {
  if (k_folds < 2 || k_folds > n) throw ConfigError("FoldTooSmall: cannot split n rows into K folds");
  std::vector<std::vector<std::size_t>> folds(k_folds);
  for (std::size_t f = 0; f < k_folds; ++f) {
    if (style == FoldStyle::ContiguousBlocks) {
      for (std::size_t i = f * n / k_folds; i < (f + 1) * n / k_folds; ++i) folds[f].push_back(i);
    } else {
      for (std::size_t i = f; i < n; i += k_folds) folds[f].push_back(i);
    }
  }
  return folds;
}

std::pair<double, SelectionReport> select_tau_cv(const Dataset& data, const Region& region,
                                                 const BandwidthPlan& plan, const CvPlan& cv,
                                                 Kernel1D k, bool intercept) {
  cv.validate();
  region.validate(data.dim());
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  const std::size_t d_eff = d + (intercept ? 1 : 0);
  const auto folds = fold_rows(n, cv.k_folds, cv.fold_style);
  for (const auto& rows : folds)
    if (n - rows.size() < kMinSample)
      throw ConfigError("FoldTooSmall: training part of a fold has fewer than " +
                        std::to_string(kMinSample) + " rows");

  struct FoldWork {
    CvFold info;
    ModelFits fits;
    BandwidthPlan plan;
    std::vector<std::size_t> held_out;             // rows scored by CV
    std::array<std::vector<double>, 4> predicted;  // per model, aligned with held_out
  };
  std::vector<FoldWork> work(folds.size());
  // Held-out rows outside the time interval are scored only when every fold
  // is surrounded by training rows; a contiguous block at either end of the
  // sample would otherwise be extrapolated in time.
  const bool score_all_times = cv.fold_style == FoldStyle::Interleaved;

  parallel_for(folds.size(), [&](std::size_t f) {
    const auto& rows = folds[f];
    std::vector<char> held(n, 0);
    for (std::size_t i : rows) held[i] = 1;
    std::vector<std::size_t> keep;
    keep.reserve(n - rows.size());
    for (std::size_t i = 0; i < n; ++i)
      if (!held[i]) keep.push_back(i);
    const Dataset train = data.subset(keep);

    FoldWork& w = work[f];
    w.info.held_out = rows.size();
    w.info.n_train = train.size();
    w.plan = plan.rescaled(train.size());
    w.fits = fit_all(train, region, w.plan, k, intercept);

    const auto ty = train.y();
    const double train_mean = std::accumulate(ty.begin(), ty.end(), 0.0) / static_cast<double>(ty.size());
    for (std::size_t i : rows)
      if ((score_all_times || region.contains_t(data.time(i))) && region.contains_x(data.row(i)))
        w.held_out.push_back(i);
    w.info.scored = w.held_out.size();

    const FittedModels models(train, w.plan, k, intercept);
    for (ModelKind kind : kAllModels) {
      auto& out = w.predicted[slot(kind)];
      out.resize(w.held_out.size());
      for (std::size_t j = 0; j < w.held_out.size(); ++j) {
        const std::size_t i = w.held_out[j];
        try {
          out[j] = models.predict(kind, data.row(i), data.time(i));
        } catch (const NumericalError&) {
          out[j] = train_mean;
          ++w.info.fallbacks[slot(kind)];
        }
      }
    }
  });

  std::vector<double> scores(cv.c_grid.size(), 0.0);
  std::vector<std::vector<ModelKind>> choices(cv.c_grid.size());
  for (std::size_t g = 0; g < cv.c_grid.size(); ++g) {
    for (const FoldWork& w : work) {
      const double tau = tau_schedule(static_cast<double>(w.info.n_train), d, cv.c_grid[g]);
      const ModelKind chosen = score_fits(w.fits, w.plan, tau, d_eff).chosen;
      choices[g].push_back(chosen);
      const auto& pred = w.predicted[slot(chosen)];
      for (std::size_t j = 0; j < w.held_out.size(); ++j) {
        const double r = data.y(w.held_out[j]) - pred[j];
        scores[g] += r * r;
      }
    }
  }
  const std::size_t best =
      static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) - scores.begin());
  const double c_hat = cv.c_grid[best];

  const double tau = tau_schedule(static_cast<double>(n), d, c_hat);
  SelectionReport report = score_fits(fit_all(data, region, plan, k, intercept), plan, tau, d_eff);
  report.c_hat = c_hat;
  report.c_grid = cv.c_grid;
  report.cv_scores = std::move(scores);
  report.cv_choices = std::move(choices);
  for (FoldWork& w : work) report.folds.push_back(w.info);
  return {c_hat, std::move(report)};
}

}  // namespace tvreg
