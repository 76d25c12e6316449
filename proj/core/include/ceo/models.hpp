#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ceo/rng.hpp"

namespace ceo::models {

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool bounded() const noexcept;
  bool contains(double v) const noexcept { return v >= lo && v <= hi; }
  double width() const noexcept { return hi - lo; }
};

// ---------------------------------------------------------------------------
// Source X
// ---------------------------------------------------------------------------

struct GaussianSource {
  double mean = 0.0;
  double var = 1.0;
};

struct UniformSource {
  double lo = 0.0;
  double hi = 1.0;
};

class SourceSpec {
 public:
  using Family = std::variant<GaussianSource, UniformSource>;

  explicit SourceSpec(Family family);
  static SourceSpec gaussian(double mean, double var);
  static SourceSpec uniform(double lo, double hi);

  const Family& family() const noexcept { return family_; }
  std::string name() const;
  bool is_gaussian() const noexcept { return std::holds_alternative<GaussianSource>(family_); }

  double pdf(double x) const;
  double cdf(double x) const;
  double sample(numerics::RngStream& rng) const;
  double mean() const;
  double variance() const;
  Interval support() const;
  /// Support used for every integral over X: exact when bounded, otherwise
  /// mean +- 8 standard deviations.
  Interval quadrature_support() const;
  double differential_entropy() const;

 private:
  Family family_;
};

// ---------------------------------------------------------------------------
// Observation channel Y | X
// ---------------------------------------------------------------------------

/// Y = x + N(0, noise_var). noise_var == 0 is the noiseless flag (Y = x).
struct AdditiveGaussianNoise {
  double noise_var = 1.0;
};

/// Y = x + unif[0, width].
struct AdditiveUniformNoise {
  double width = 1.0;
};

/// Y = x + Logistic(0, scale). Regular family whose Fisher information is
/// evaluated numerically; it exercises the non-closed-form path.
struct AdditiveLogisticNoise {
  double scale = 1.0;
};

/// (X, Y) uniform marginals on [0,1] coupled by a Clayton copula (theta > 0);
/// Y | x has the copula's conditional density c(x, y).
struct ClaytonCopula {
  double theta = 1.0;
};

/// Y ~ unif[0, x].
struct UniformScale {};

enum class RegularityClass { regular, non_regular, partially_non_regular };

std::string to_string(RegularityClass c);

struct EndpointDensities {
  double lower = 0.0;
  double upper = 0.0;
};

class ObservationSpec {
 public:
  using Kind = std::variant<AdditiveGaussianNoise, AdditiveUniformNoise, AdditiveLogisticNoise,
                            ClaytonCopula, UniformScale>;

  explicit ObservationSpec(Kind kind);
  static ObservationSpec additive_gaussian(double noise_var);
  static ObservationSpec additive_uniform(double width);
  static ObservationSpec additive_logistic(double scale);
  static ObservationSpec clayton(double theta);
  static ObservationSpec uniform_scale();

  const Kind& kind() const noexcept { return kind_; }
  std::string name() const;
  RegularityClass regularity_class() const;
  /// f(y|x) = f_N(y - x) for some fixed noise density f_N.
  bool is_location_family() const noexcept;
  bool is_noiseless() const noexcept;

  double pdf(double y, double x) const;
  double cdf(double y, double x) const;
  double sample(double x, numerics::RngStream& rng) const;
  void sample(double x, std::span<double> out, numerics::RngStream& rng) const;

  /// Exact support of Y | x; infinite endpoints for unbounded families.
  Interval conditional_support(double x) const;
  /// Finite support used for quadrature (tail mass below ~1e-15).
  Interval quadrature_support(double x) const;
  /// Quadrature support endpoints plus interior points where the density
  /// is not smooth.
  std::vector<double> breakpoints(double x) const;

  double conditional_median(double x) const;
  double conditional_variance(double x) const;
  /// h(Y | X = x) in nats.
  double conditional_entropy(double x) const;
  /// d/dx log f(y|x). Regular families only.
  double score(double y, double x) const;
  /// I_Y(x). Throws UndefinedQuantityError for non-regular families.
  double fisher_information(double x) const;
  /// Densities at e_l(x), e_u(x). Throws UndefinedQuantityError for families
  /// with unbounded or x-independent support.
  EndpointDensities endpoint_densities(double x) const;
  /// med(Y|x) for regular families, e_l(x) + e_u(x) otherwise. Strict
  /// monotonicity of this map is the identifiability check.
  double identifiability_map(double x) const;
  /// Values of X for which the family is defined.
  Interval admissible_source_support() const;

 private:
  Kind kind_;
};

// ---------------------------------------------------------------------------
// Joint model
// ---------------------------------------------------------------------------

class JointModel {
 public:
  JointModel(SourceSpec source, ObservationSpec observation);

  const SourceSpec& source() const noexcept { return source_; }
  const ObservationSpec& observation() const noexcept { return observation_; }

 private:
  SourceSpec source_;
  ObservationSpec observation_;
};

enum class DensityTarget { source, conditional };

/// f_X(point) or f_{Y|X}(point | condition). Points outside a bounded support
/// evaluate to zero.
double density(const JointModel& model, DensityTarget which, double point,
               std::optional<double> condition = std::nullopt);

/// L conditionally i.i.d. draws from f_{Y|x}.
std::vector<double> sample_observations(const JointModel& model, double x, std::size_t L,
                                        numerics::RngStream& rng);

double conditional_median(const JointModel& model, double x);
double fisher_information(const JointModel& model, double x);

/// E[score^2] at x by 201-node Gauss-Legendre quadrature over the quadrature
/// support. Used for families without a closed form.
double numeric_fisher_information(const ObservationSpec& observation, double x);

/// True when identifiability_map is strictly increasing on `points` sorted
/// ascending.
bool is_identifiable_on_grid(const ObservationSpec& observation, std::span<const double> points);

}  // namespace ceo::models
