#include "ceo/optimize.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cstdint>
#include <limits>
#include <cmath>
#include <stdexcept>

namespace ceo::numerics {

MinimizeResult minimize_1d(const ScalarFunction& f, double a, double b, double tol,
                           std::size_t coarse_points) {
  if (!(a < b)) throw std::invalid_argument("minimize_1d: need a < b");
  coarse_points = std::max<std::size_t>(coarse_points, 3);

  MinimizeResult best{a, f(a), 1};
  std::size_t best_index = 0;
  const double step = (b - a) / static_cast<double>(coarse_points - 1);
  for (std::size_t i = 1; i < coarse_points; ++i) {
    const double x = (i + 1 == coarse_points) ? b : a + step * static_cast<double>(i);
    const double fx = f(x);
    ++best.evaluations;
    if (fx < best.value) {
      best.x = x;
      best.value = fx;
      best_index = i;
    }
  }

  double lo = a + step * static_cast<double>(best_index == 0 ? 0 : best_index - 1);
  double hi = std::min(b, a + step * static_cast<double>(best_index + 1));

  // Brent refinement; x resolution is limited to about sqrt(eps) anyway.
  const int bits = std::clamp(static_cast<int>(-std::log2(std::max(tol, 1e-16) / (hi - lo))), 8,
                              std::numeric_limits<double>::digits / 2);
  std::uintmax_t iterations = 200;
  const auto [xm, fm] = boost::math::tools::brent_find_minima(f, lo, hi, bits, iterations);
  best.evaluations += static_cast<std::size_t>(iterations) + 1;
  if (fm < best.value) {
    best.x = xm;
    best.value = fm;
  }
  return best;
}

}  // namespace ceo::numerics
