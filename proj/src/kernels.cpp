#include "tvreg/kernels.hpp"

#include <numbers>

namespace tvreg {
namespace detail {
namespace {

// Nodes are roots of P_64 found by Newton iteration from the Chebyshev guess.
GaussLegendreRule build_rule() {
  constexpr int n = GaussLegendreRule::kPoints;
  GaussLegendreRule rule{};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::fabs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre_rule() {
  static const GaussLegendreRule rule = build_rule();
  return rule;
}

}  // namespace detail

std::string_view Kernel1D::name() const noexcept {
  switch (shape_) {
    case Shape::Epanechnikov:
      return "epanechnikov";
    case Shape::Uniform:
      return "uniform";
    case Shape::Biweight:
      return "biweight";
  }
  return "unknown";
}

KernelConstants constants(Kernel1D k) {
  KernelConstants c;
  c.lambda = gauss_legendre_64([k](double v) { return k(v) * k(v); });
  c.kappa = gauss_legendre_64([k](double v) { return k(v) * v * v; });
  return c;
}

}  // namespace tvreg
