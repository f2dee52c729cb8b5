#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace tvreg {

/// Candidate models, from the most general to the most restricted:
/// I  time-varying nonparametric m(x, t)
/// II time-constant nonparametric mu(x)
/// III time-varying-coefficient linear x' beta(t)
/// IV linear x' theta
enum class ModelKind { I = 0, II = 1, III = 2, IV = 3 };

inline constexpr std::array<ModelKind, 4> kAllModels{ModelKind::I, ModelKind::II, ModelKind::III,
                                                     ModelKind::IV};

std::string_view to_string(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view text);

/// Responses y, predictors x (row-major n x d) and the rescaled time of each
/// row. Times default to i/n, i = 1..n; subsets keep the times of the parent.
class Dataset {
 public:
  Dataset() = default;

  /// Takes x in row-major order; x.size() must equal y.size() * d.
  Dataset(std::vector<double> y, std::vector<double> x, std::size_t d);
  Dataset(std::vector<double> y, std::vector<double> x, std::size_t d, std::vector<double> times);

  std::size_t size() const noexcept { return y_.size(); }
  std::size_t dim() const noexcept { return d_; }

  std::span<const double> y() const noexcept { return y_; }
  std::span<const double> x() const noexcept { return x_; }
  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> row(std::size_t i) const noexcept { return {x_.data() + i * d_, d_}; }
  double y(std::size_t i) const noexcept { return y_[i]; }
  double time(std::size_t i) const noexcept { return times_[i]; }

  /// Rows at the given (ascending) indices, keeping their original times.
  Dataset subset(std::span<const std::size_t> indices) const;

  /// Copy with responses replaced.
  Dataset with_y(std::vector<double> y) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  void validate() const;

  std::vector<double> y_;
  std::vector<double> x_;
  std::vector<double> times_;
  std::size_t d_ = 1;
};

}  // namespace tvreg
