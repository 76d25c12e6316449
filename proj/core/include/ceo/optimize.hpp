#pragma once

#include <cstddef>

#include "ceo/quadrature.hpp"

namespace ceo::numerics {

struct MinimizeResult {
  double x = 0.0;
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Coarse grid (endpoints included) followed by Brent's method in the
/// bracket around the best grid point. Does not assume unimodality: the best
/// grid value is kept if the refinement does not improve on it.
MinimizeResult minimize_1d(const ScalarFunction& f, double a, double b, double tol = 1e-10,
                           std::size_t coarse_points = 64);

}  // namespace ceo::numerics
