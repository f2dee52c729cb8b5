#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "tvreg/dataset.hpp"
#include "tvreg/kernels.hpp"
#include "tvreg/smooth.hpp"

namespace tvreg {

/// Multipliers of the bandwidth rates.
struct BandwidthConstants {
  double c_b_I = 0.5;
  double c_h_I = 1.0;
  double c_h_II = 1.0;
  double c_b_III = 0.5;
};

/// Bandwidths at their optimal rates for sample size n and dimension d:
/// b_I, h_I ~ n^{-1/(d+5)}, h_II ~ n^{-1/(d+4)}, b_III ~ n^{-1/5}.
struct BandwidthPlan {
  double b_I = 0.0;
  double h_I = 0.0;
  double h_II = 0.0;
  double b_III = 0.0;
  BandwidthConstants constants;
  std::vector<double> iqr;  // componentwise interquartile ranges of x
  std::size_t n = 0;
  std::size_t d = 1;

  /// Same constants and IQRs, bandwidths recomputed for another sample size.
  BandwidthPlan rescaled(std::size_t n_new) const;
};

BandwidthPlan make_plan(std::size_t n, std::size_t d, const BandwidthConstants& constants,
                        std::vector<double> iqr);

/// Interquartile range with linearly interpolated quantiles.
double interquartile_range(std::span<const double> values);
double quantile(std::span<const double> values, double p);

/// Rule of thumb: c_b = 1/2 for models I and III, c_h = prod_k IQR_k for I and II.
/// Throws ConfigError if n < 20 or some coordinate has zero IQR.
BandwidthPlan default_bandwidths(const Dataset& data);

/// Complexity of each candidate: df(IV) = d_eff, df(III) = d_eff / b_III,
/// df(II) = prod(2 IQR_k) / h_II^d, df(I) = prod(2 IQR_k) / (b_I h_I^d).
double model_df(ModelKind kind, const BandwidthPlan& plan, std::size_t d_eff);

/// tau_n = c n^{-(d+3)/(d+4)} log n.
double tau_schedule(double n, std::size_t d, double c);

/// Floor applied to log(rss/n) when the residual sum of squares is zero.
inline constexpr double kLogRssFloor = -745.0;

struct ModelScore {
  ModelKind kind = ModelKind::I;
  double rss = 0.0;
  std::size_t n_used = 0;
  double log_rss_over_n = 0.0;
  double df = 0.0;
  double gic = 0.0;
};

/// One fold of the cross-validated search over the penalty constant.
struct CvFold {
  std::size_t held_out = 0;  // rows removed from the training part
  std::size_t scored = 0;    // held-out rows entering CV(c)
  std::size_t n_train = 0;
  std::array<std::size_t, 4> fallbacks{};  // held-out predictions replaced by the training mean
};

struct SelectionReport {
  std::array<ModelScore, 4> models;  // indexed by ModelKind
  ModelKind chosen = ModelKind::IV;
  double tau = 0.0;
  BandwidthPlan bandwidths;
  std::size_t n = 0;
  std::size_t d_eff = 0;

  // Populated by select_tau_cv.
  std::optional<double> c_hat;
  std::vector<double> c_grid;
  std::vector<double> cv_scores;                   // CV(c) for each grid value
  std::vector<std::vector<ModelKind>> cv_choices;  // [grid value][fold]
  std::vector<CvFold> folds;

  const ModelScore& score(ModelKind kind) const { return models[static_cast<std::size_t>(kind)]; }
};

/// Fits of all four candidates on one dataset.
struct ModelFits {
  std::array<FitResult, 4> fits;  // indexed by ModelKind
  std::size_t n = 0;
  double response_energy = 0.0;  // sum of y^2 over the restricted set
};

/// Fits models I-IV with the plan's bandwidths. Errors are rethrown with the
/// failing model named in the message.
ModelFits fit_all(const Dataset& data, const Region& region, const BandwidthPlan& plan, Kernel1D k,
                  bool intercept);

/// gic = log(rss / n) + tau df for each fit, the argmin, ties going to the
/// simpler model (IV, then III, II, I). n is the full sample size.
SelectionReport score_fits(const ModelFits& fits, const BandwidthPlan& plan, double tau,
                           std::size_t d_eff);

SelectionReport gic(const Dataset& data, const Region& region, const BandwidthPlan& plan, double tau,
                    Kernel1D k, bool intercept = true);

/// Interleaved: fold f holds rows f, f + K, f + 2K, ...
/// ContiguousBlocks: fold f holds rows [f n / K, (f + 1) n / K).
enum class FoldStyle { Interleaved, ContiguousBlocks };

struct CvPlan {
  std::size_t k_folds = 10;
  std::vector<double> c_grid{0.025, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6};
  FoldStyle fold_style = FoldStyle::Interleaved;

  void validate() const;
};

/// Held-out rows of each fold; the folds partition 0..n-1 with sizes within
/// one of n/K. Throws ConfigError (FoldTooSmall) unless 2 <= K <= n.
std::vector<std::vector<std::size_t>> fold_rows(std::size_t n, std::size_t k_folds, FoldStyle style);

/// K-fold search for the penalty constant c. For every fold the four models
/// are fitted on the retained rows (constants held, rates at n_train), a
/// model is chosen by GIC with tau_schedule(n_train, d, c), and the held-out
/// rows with x in the region's box are predicted by it (contiguous blocks
/// additionally require the time to lie in the region's interval). Predictions that fail
/// numerically fall back to the training mean of y. Returns c_hat and the
/// full-data report at tau_schedule(n, d, c_hat).
std::pair<double, SelectionReport> select_tau_cv(const Dataset& data, const Region& region,
                                                 const BandwidthPlan& plan, const CvPlan& cv,
                                                 Kernel1D k, bool intercept = true);

}  // namespace tvreg
