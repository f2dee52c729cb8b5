#pragma once

#include <cmath>
#include <span>
#include <string_view>

namespace tvreg {

/// Symmetric kernel supported on [-1, 1], zero outside.
class Kernel1D {
 public:
  enum class Shape { Epanechnikov, Uniform, Biweight };

  constexpr explicit Kernel1D(Shape shape = Shape::Epanechnikov) noexcept : shape_(shape) {}

  constexpr double operator()(double v) const noexcept {
    const double a = v < 0 ? -v : v;
    if (a > 1.0) return 0.0;
    switch (shape_) {
      case Shape::Epanechnikov:
        return 0.75 * (1.0 - v * v);
      case Shape::Uniform:
        return 0.5;
      case Shape::Biweight: {
        const double u = 1.0 - v * v;
        return 0.9375 * u * u;
      }
    }
    return 0.0;
  }

  constexpr Shape shape() const noexcept { return shape_; }
  std::string_view name() const noexcept;

  friend constexpr bool operator==(Kernel1D, Kernel1D) = default;

 private:
  Shape shape_;
};

constexpr Kernel1D epanechnikov() noexcept { return Kernel1D(Kernel1D::Shape::Epanechnikov); }
constexpr Kernel1D uniform_kernel() noexcept { return Kernel1D(Kernel1D::Shape::Uniform); }

/// Moment constants of a kernel: lambda = int K^2, kappa = int K(v) v^2.
struct KernelConstants {
  double lambda = 0.0;
  double kappa = 0.0;
};

KernelConstants constants(Kernel1D k);

/// Integral of f over [-1, 1] by 64-point Gauss-Legendre quadrature.
template <class F>
double gauss_legendre_64(F&& f);

/// prod_j k(u_j); zero as soon as one coordinate leaves the support.
inline double product_kernel(Kernel1D k, std::span<const double> u) noexcept {
  double value = 1.0;
  for (double uj : u) {
    if (std::fabs(uj) > 1.0) return 0.0;
    value *= k(uj);
  }
  return value;
}

namespace detail {
struct GaussLegendreRule {
  static constexpr int kPoints = 64;
  double nodes[kPoints];
  double weights[kPoints];
};
const GaussLegendreRule& gauss_legendre_rule();
}  // namespace detail

template <class F>
double gauss_legendre_64(F&& f) {
  const auto& rule = detail::gauss_legendre_rule();
  double sum = 0.0;
  for (int i = 0; i < detail::GaussLegendreRule::kPoints; ++i) sum += rule.weights[i] * f(rule.nodes[i]);
  return sum;
}

}  // namespace tvreg
