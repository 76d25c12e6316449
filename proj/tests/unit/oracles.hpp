#pragma once

// Reference computations for the tests. Deliberately naive and independent of
// the library's quadrature, optimizer and special-function code.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// exp(-z^2/2)/sqrt(2 pi) from the Taylor series of exp, summed until the
// terms vanish. Good for |z| <= 6.
inline double normal_pdf_series(double z) {
  // exp(t) by scaling and squaring, so the series never sees a large argument.
  double t = -0.5 * z * z;
  int squarings = 0;
  while (std::abs(t) > 0.5) {
    t *= 0.5;
    ++squarings;
  }
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= t / k;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  for (int i = 0; i < squarings; ++i) sum *= sum;
  return sum / std::sqrt(2.0 * std::numbers::pi);
}

inline double gaussian_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

// Triangle density of unif[0,a] + unif[0,b] (a <= b), trapezoid in general.
inline double uniform_sum_pdf(double u, double a, double b) {
  if (a > b) std::swap(a, b);
  if (u <= 0.0 || u >= a + b) return 0.0;
  if (u < a) return u / (a * b);
  if (u <= b) return 1.0 / b;
  return (a + b - u) / (a * b);
}

}  // namespace oracle
