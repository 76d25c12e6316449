#include "ceo/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ceo::numerics {

QuadratureResult integrate(const ScalarFunction& f, double a, double b, double tol,
                           std::size_t max_nodes) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("integrate: interval endpoints must be finite");
  }
  if (a == b) return {0.0, 0.0, 0, true};

  // Bisection depth d costs at most 15 (2^(d+1) - 1) evaluations.
  unsigned depth = 0;
  while (15 * ((std::size_t{1} << (depth + 2)) - 1) <= max_nodes && depth < 40) ++depth;

  std::size_t nodes = 0;
  const auto counted = [&](double x) {
    ++nodes;
    return f(x);
  };
  double error = 0.0;
  double l1 = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(counted, a, b, depth, tol, &error, &l1);
  // Round-off floor, as in QUADPACK.
  error = std::max(error, 50.0 * std::numeric_limits<double>::epsilon() * l1);
  return {value, error, nodes, error <= tol * std::max(1.0, std::abs(value))};
}

QuadratureResult integrate_piecewise(const ScalarFunction& f, std::span<const double> breakpoints,
                                     double tol, std::size_t max_nodes) {
  std::vector<double> pts(breakpoints.begin(), breakpoints.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  QuadratureResult total;
  if (pts.size() < 2) return total;
  const std::size_t budget = std::max<std::size_t>(max_nodes / (pts.size() - 1), 45);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto piece = integrate(f, pts[i], pts[i + 1], tol, budget);
    total.value += piece.value;
    total.residual_estimate += piece.residual_estimate;
    total.nodes_used += piece.nodes_used;
    total.converged = total.converged && piece.converged;
  }
  return total;
}

GaussLegendreRule gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (n == 1) {
      x = 0.0;
      dp = 1.0;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n == 1) rule.weights[0] = 2.0;
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

double integrate_fixed(const ScalarFunction& f, double a, double b, const GaussLegendreRule& rule) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * f(center + half * rule.nodes[i]);
  return sum * half;
}

QuadratureResult integrate_gauss_legendre(const ScalarFunction& f, double a, double b,
                                          std::size_t n) {
  const double coarse = integrate_fixed(f, a, b, gauss_legendre(n));
  const double fine = integrate_fixed(f, a, b, gauss_legendre(2 * n));
  return {fine, std::abs(fine - coarse), 3 * n, true};
}

}  // namespace ceo::numerics
