#include "tvreg/dataset.hpp"

#include <cmath>
#include <string>

#include "tvreg/error.hpp"

namespace tvreg {

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::I:
      return "I";
    case ModelKind::II:
      return "II";
    case ModelKind::III:
      return "III";
    case ModelKind::IV:
      return "IV";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  for (ModelKind kind : kAllModels)
    if (text == to_string(kind)) return kind;
  if (text == "1") return ModelKind::I;
  if (text == "2") return ModelKind::II;
  if (text == "3") return ModelKind::III;
  if (text == "4") return ModelKind::IV;
  throw ConfigError("unknown model '" + std::string(text) + "' (expected I, II, III or IV)");
}

Dataset::Dataset(std::vector<double> y, std::vector<double> x, std::size_t d)
    : y_(std::move(y)), x_(std::move(x)), d_(d) {
  const double n = static_cast<double>(y_.size());
  times_.resize(y_.size());
  for (std::size_t i = 0; i < y_.size(); ++i) times_[i] = static_cast<double>(i + 1) / n;
  validate();
}

Dataset::Dataset(std::vector<double> y, std::vector<double> x, std::size_t d,
                 std::vector<double> times)
    : y_(std::move(y)), x_(std::move(x)), times_(std::move(times)), d_(d) {
  validate();
}

void Dataset::validate() const {
  if (d_ == 0) throw ConfigError("dataset dimension must be positive");
  if (x_.size() != y_.size() * d_)
    throw ConfigError("predictor matrix has " + std::to_string(x_.size()) + " entries, expected " +
                      std::to_string(y_.size() * d_));
  if (times_.size() != y_.size()) throw ConfigError("time vector length differs from response length");
  for (std::size_t i = 0; i < y_.size(); ++i)
    if (!std::isfinite(y_[i])) throw ConfigError("non-finite response at row " + std::to_string(i + 1));
  for (std::size_t k = 0; k < x_.size(); ++k)
    if (!std::isfinite(x_[k]))
      throw ConfigError("non-finite predictor at row " + std::to_string(k / d_ + 1));
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> y, x, t;
  y.reserve(indices.size());
  x.reserve(indices.size() * d_);
  t.reserve(indices.size());
  for (std::size_t i : indices) {
    y.push_back(y_[i]);
    auto r = row(i);
    x.insert(x.end(), r.begin(), r.end());
    t.push_back(times_[i]);
  }
  return Dataset(std::move(y), std::move(x), d_, std::move(t));
}

Dataset Dataset::with_y(std::vector<double> y) const {
  return Dataset(std::move(y), x_, d_, times_);
}

}  // namespace tvreg
