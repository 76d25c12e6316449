#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ceo::numerics {

using ScalarFunction = std::function<double(double)>;

struct QuadratureResult {
  double value = 0.0;
  /// Non-negative error estimate; includes a round-off floor.
  double residual_estimate = 0.0;
  std::size_t nodes_used = 0;
  /// False when the node cap was reached before the tolerance was met.
  bool converged = true;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature (Boost.Math) with recursive
/// bisection.
///
/// `converged` is true when the summed |K15 - G7| error is below
/// tol * max(1, |value|). max_nodes caps the bisection depth so that at most
/// that many integrand evaluations happen.
/// The interval must be finite; callers truncate unbounded supports.
QuadratureResult integrate(const ScalarFunction& f, double a, double b, double tol = 1e-10,
                           std::size_t max_nodes = std::size_t{1} << 14);

/// Same as integrate() but splits [breakpoints.front(), breakpoints.back()]
/// at every interior breakpoint first. Use for densities with jumps.
QuadratureResult integrate_piecewise(const ScalarFunction& f, std::span<const double> breakpoints,
                                     double tol = 1e-10,
                                     std::size_t max_nodes = std::size_t{1} << 14);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

GaussLegendreRule gauss_legendre(std::size_t n);

/// Fixed n-point rule mapped to [a, b].
double integrate_fixed(const ScalarFunction& f, double a, double b, const GaussLegendreRule& rule);

/// Fixed rule with a node-doubling residual: value from 2n nodes,
/// residual_estimate = |Q_2n - Q_n|.
QuadratureResult integrate_gauss_legendre(const ScalarFunction& f, double a, double b,
                                          std::size_t n);

}  // namespace ceo::numerics
