#include "ceo/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ceo/errors.hpp"
#include "ceo/quadrature.hpp"

namespace ceo::models {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGaussianTruncation = 8.0;   // standard deviations
constexpr double kLogisticTruncation = 36.0;  // scale units; tail mass e^-36
constexpr double kClaytonFloor = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double clamp_unit(double v) { return std::clamp(v, kClaytonFloor, 1.0); }

double clayton_log_pdf(double y, double x, double theta) {
  const double a = std::pow(x, -theta) + std::pow(y, -theta) - 1.0;
  return std::log1p(theta) - (theta + 1.0) * (std::log(x) + std::log(y)) -
         (2.0 + 1.0 / theta) * std::log(a);
}

double clayton_quantile(double p, double x, double theta) {
  const double xt = std::pow(x, -theta);
  return std::pow(1.0 + xt * (std::pow(p, -theta / (1.0 + theta)) - 1.0), -1.0 / theta);
}

const numerics::GaussLegendreRule& rule201() {
  static const numerics::GaussLegendreRule rule = numerics::gauss_legendre(201);
  return rule;
}

}  // namespace

bool Interval::bounded() const noexcept { return std::isfinite(lo) && std::isfinite(hi); }

// ---------------------------------------------------------------------------
// SourceSpec
// ---------------------------------------------------------------------------

SourceSpec::SourceSpec(Family family) : family_(family) {
  std::visit(overloaded{[](const GaussianSource& g) {
                          if (!(g.var > 0.0) || !std::isfinite(g.var) || !std::isfinite(g.mean)) {
                            throw ConfigError("gaussian source requires finite mean and var > 0");
                          }
                        },
                        [](const UniformSource& u) {
                          if (!(u.lo < u.hi) || !std::isfinite(u.lo) || !std::isfinite(u.hi)) {
                            throw ConfigError("uniform source requires finite lo < hi");
                          }
                        }},
             family_);
}

SourceSpec SourceSpec::gaussian(double mean, double var) { return SourceSpec(GaussianSource{mean, var}); }
SourceSpec SourceSpec::uniform(double lo, double hi) { return SourceSpec(UniformSource{lo, hi}); }

std::string SourceSpec::name() const {
  return std::visit(overloaded{[](const GaussianSource&) { return std::string("gaussian"); },
                               [](const UniformSource&) { return std::string("uniform"); }},
                    family_);
}

double SourceSpec::pdf(double x) const {
  return std::visit(overloaded{[x](const GaussianSource& g) {
                                 const double sd = std::sqrt(g.var);
                                 return normal_pdf((x - g.mean) / sd) / sd;
                               },
                               [x](const UniformSource& u) {
                                 return (x < u.lo || x > u.hi) ? 0.0 : 1.0 / (u.hi - u.lo);
                               }},
                    family_);
}

double SourceSpec::cdf(double x) const {
  return std::visit(overloaded{[x](const GaussianSource& g) {
                                 return normal_cdf((x - g.mean) / std::sqrt(g.var));
                               },
                               [x](const UniformSource& u) {
                                 return std::clamp((x - u.lo) / (u.hi - u.lo), 0.0, 1.0);
                               }},
                    family_);
}

double SourceSpec::sample(numerics::RngStream& rng) const {
  return std::visit(overloaded{[&rng](const GaussianSource& g) {
                                 return g.mean + std::sqrt(g.var) * rng.normal();
                               },
                               [&rng](const UniformSource& u) { return rng.uniform(u.lo, u.hi); }},
                    family_);
}

double SourceSpec::mean() const {
  return std::visit(overloaded{[](const GaussianSource& g) { return g.mean; },
                               [](const UniformSource& u) { return 0.5 * (u.lo + u.hi); }},
                    family_);
}

double SourceSpec::variance() const {
  return std::visit(overloaded{[](const GaussianSource& g) { return g.var; },
                               [](const UniformSource& u) {
                                 return (u.hi - u.lo) * (u.hi - u.lo) / 12.0;
                               }},
                    family_);
}

Interval SourceSpec::support() const {
  return std::visit(overloaded{[](const GaussianSource&) { return Interval{}; },
                               [](const UniformSource& u) { return Interval{u.lo, u.hi}; }},
                    family_);
}

Interval SourceSpec::quadrature_support() const {
  return std::visit(overloaded{[](const GaussianSource& g) {
                                 const double w = kGaussianTruncation * std::sqrt(g.var);
                                 return Interval{g.mean - w, g.mean + w};
                               },
                               [](const UniformSource& u) { return Interval{u.lo, u.hi}; }},
                    family_);
}

double SourceSpec::differential_entropy() const {
  return std::visit(overloaded{[](const GaussianSource& g) {
                                 return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * g.var);
                               },
                               [](const UniformSource& u) { return std::log(u.hi - u.lo); }},
                    family_);
}

// ---------------------------------------------------------------------------
// ObservationSpec
// ---------------------------------------------------------------------------

std::string to_string(RegularityClass c) {
  switch (c) {
    case RegularityClass::regular: return "regular";
    case RegularityClass::non_regular: return "non_regular";
    case RegularityClass::partially_non_regular: return "partially_non_regular";
  }
  return "unknown";
}

ObservationSpec::ObservationSpec(Kind kind) : kind_(kind) {
  std::visit(overloaded{[](const AdditiveGaussianNoise& k) {
                          if (!(k.noise_var >= 0.0) || !std::isfinite(k.noise_var)) {
                            throw ConfigError("additive_gaussian requires noise_var >= 0");
                          }
                        },
                        [](const AdditiveUniformNoise& k) {
                          if (!(k.width > 0.0) || !std::isfinite(k.width)) {
                            throw ConfigError("additive_uniform requires width > 0");
                          }
                        },
                        [](const AdditiveLogisticNoise& k) {
                          if (!(k.scale > 0.0) || !std::isfinite(k.scale)) {
                            throw ConfigError("additive_logistic requires scale > 0");
                          }
                        },
                        [](const ClaytonCopula& k) {
                          if (!(k.theta > 0.0) || !std::isfinite(k.theta)) {
                            throw ConfigError("copula_clayton requires theta > 0");
                          }
                        },
                        [](const UniformScale&) {}},
             kind_);
}

ObservationSpec ObservationSpec::additive_gaussian(double noise_var) {
  return ObservationSpec(AdditiveGaussianNoise{noise_var});
}
ObservationSpec ObservationSpec::additive_uniform(double width) {
  return ObservationSpec(AdditiveUniformNoise{width});
}
ObservationSpec ObservationSpec::additive_logistic(double scale) {
  return ObservationSpec(AdditiveLogisticNoise{scale});
}
ObservationSpec ObservationSpec::clayton(double theta) { return ObservationSpec(ClaytonCopula{theta}); }
ObservationSpec ObservationSpec::uniform_scale() { return ObservationSpec(UniformScale{}); }

std::string ObservationSpec::name() const {
  return std::visit(overloaded{[](const AdditiveGaussianNoise&) { return std::string("additive_gaussian"); },
                               [](const AdditiveUniformNoise&) { return std::string("additive_uniform"); },
                               [](const AdditiveLogisticNoise&) { return std::string("additive_logistic"); },
                               [](const ClaytonCopula&) { return std::string("copula_clayton"); },
                               [](const UniformScale&) { return std::string("uniform_scale"); }},
                    kind_);
}

RegularityClass ObservationSpec::regularity_class() const {
  if (std::holds_alternative<AdditiveUniformNoise>(kind_)) return RegularityClass::non_regular;
  if (std::holds_alternative<UniformScale>(kind_)) return RegularityClass::partially_non_regular;
  return RegularityClass::regular;
}

bool ObservationSpec::is_location_family() const noexcept {
  return std::holds_alternative<AdditiveGaussianNoise>(kind_) ||
         std::holds_alternative<AdditiveUniformNoise>(kind_) ||
         std::holds_alternative<AdditiveLogisticNoise>(kind_);
}

bool ObservationSpec::is_noiseless() const noexcept {
  const auto* g = std::get_if<AdditiveGaussianNoise>(&kind_);
  return g != nullptr && g->noise_var == 0.0;
}

double ObservationSpec::pdf(double y, double x) const {
  return std::visit(
      overloaded{[&](const AdditiveGaussianNoise& k) {
                   if (k.noise_var == 0.0) {
                     throw UndefinedQuantityError("noiseless observation has no density");
                   }
                   const double sd = std::sqrt(k.noise_var);
                   return normal_pdf((y - x) / sd) / sd;
                 },
                 [&](const AdditiveUniformNoise& k) {
                   return (y < x || y > x + k.width) ? 0.0 : 1.0 / k.width;
                 },
                 [&](const AdditiveLogisticNoise& k) {
                   const double z = std::abs(y - x) / k.scale;
                   const double e = std::exp(-z);
                   return e / (k.scale * (1.0 + e) * (1.0 + e));
                 },
                 [&](const ClaytonCopula& k) {
                   if (y <= 0.0 || y > 1.0) return 0.0;
                   return std::exp(clayton_log_pdf(y, clamp_unit(x), k.theta));
                 },
                 [&](const UniformScale&) {
                   if (x <= 0.0 || y < 0.0 || y > x) return 0.0;
                   return 1.0 / x;
                 }},
      kind_);
}

double ObservationSpec::cdf(double y, double x) const {
  return std::visit(
      overloaded{[&](const AdditiveGaussianNoise& k) {
                   if (k.noise_var == 0.0) return y >= x ? 1.0 : 0.0;
                   return normal_cdf((y - x) / std::sqrt(k.noise_var));
                 },
                 [&](const AdditiveUniformNoise& k) { return std::clamp((y - x) / k.width, 0.0, 1.0); },
                 [&](const AdditiveLogisticNoise& k) { return 1.0 / (1.0 + std::exp(-(y - x) / k.scale)); },
                 [&](const ClaytonCopula& k) {
                   if (y <= 0.0) return 0.0;
                   if (y >= 1.0) return 1.0;
                   const double xc = clamp_unit(x);
                   const double a = std::pow(xc, -k.theta) + std::pow(y, -k.theta) - 1.0;
                   return std::exp(-(k.theta + 1.0) * std::log(xc) - (1.0 / k.theta + 1.0) * std::log(a));
                 },
                 [&](const UniformScale&) {
                   if (x <= 0.0) return y >= 0.0 ? 1.0 : 0.0;
                   return std::clamp(y / x, 0.0, 1.0);
                 }},
      kind_);
}

double ObservationSpec::sample(double x, numerics::RngStream& rng) const {
  return std::visit(
      overloaded{[&](const AdditiveGaussianNoise& k) {
                   return k.noise_var == 0.0 ? x : x + std::sqrt(k.noise_var) * rng.normal();
                 },
                 [&](const AdditiveUniformNoise& k) { return x + k.width * rng.uniform(); },
                 [&](const AdditiveLogisticNoise& k) {
                   const double p = rng.uniform();
                   return x + k.scale * std::log(p / (1.0 - p));
                 },
                 [&](const ClaytonCopula& k) {
                   return clayton_quantile(rng.uniform(), clamp_unit(x), k.theta);
                 },
                 [&](const UniformScale&) { return x <= 0.0 ? 0.0 : x * rng.uniform(); }},
      kind_);
}

void ObservationSpec::sample(double x, std::span<double> out, numerics::RngStream& rng) const {
  for (double& v : out) v = sample(x, rng);
}

Interval ObservationSpec::conditional_support(double x) const {
  return std::visit(overloaded{[&](const AdditiveGaussianNoise& k) {
                                 return k.noise_var == 0.0 ? Interval{x, x} : Interval{};
                               },
                               [&](const AdditiveUniformNoise& k) { return Interval{x, x + k.width}; },
                               [&](const AdditiveLogisticNoise&) { return Interval{}; },
                               [&](const ClaytonCopula&) { return Interval{0.0, 1.0}; },
                               [&](const UniformScale&) { return Interval{0.0, std::max(x, 0.0)}; }},
                    kind_);
}

Interval ObservationSpec::quadrature_support(double x) const {
  return std::visit(overloaded{[&](const AdditiveGaussianNoise& k) {
                                 const double w = kGaussianTruncation * std::sqrt(k.noise_var);
                                 return Interval{x - w, x + w};
                               },
                               [&](const AdditiveLogisticNoise& k) {
                                 const double w = kLogisticTruncation * k.scale;
                                 return Interval{x - w, x + w};
                               },
                               [&](const auto&) { return conditional_support(x); }},
                    kind_);
}

std::vector<double> ObservationSpec::breakpoints(double x) const {
  const Interval s = quadrature_support(x);
  if (std::holds_alternative<AdditiveLogisticNoise>(kind_)) return {s.lo, x, s.hi};
  return {s.lo, s.hi};
}

double ObservationSpec::conditional_median(double x) const {
  return std::visit(overloaded{[&](const AdditiveGaussianNoise&) { return x; },
                               [&](const AdditiveUniformNoise& k) { return x + 0.5 * k.width; },
                               [&](const AdditiveLogisticNoise&) { return x; },
                               [&](const ClaytonCopula& k) {
                                 return clayton_quantile(0.5, clamp_unit(x), k.theta);
                               },
                               [&](const UniformScale&) { return 0.5 * std::max(x, 0.0); }},
                    kind_);
}

double ObservationSpec::conditional_variance(double x) const {
  return std::visit(
      overloaded{[&](const AdditiveGaussianNoise& k) { return k.noise_var; },
                 [&](const AdditiveUniformNoise& k) { return k.width * k.width / 12.0; },
                 [&](const AdditiveLogisticNoise& k) {
                   return std::numbers::pi * std::numbers::pi * k.scale * k.scale / 3.0;
                 },
                 [&](const ClaytonCopula&) {
                   const double m1 = numerics::integrate([&](double y) { return y * pdf(y, x); }, 0.0, 1.0, 1e-12).value;
                   const double m2 = numerics::integrate([&](double y) { return y * y * pdf(y, x); }, 0.0, 1.0, 1e-12).value;
                   return std::max(0.0, m2 - m1 * m1);
                 },
                 [&](const UniformScale&) { return x * x / 12.0; }},
      kind_);
}

double ObservationSpec::conditional_entropy(double x) const {
  return std::visit(
      overloaded{[&](const AdditiveGaussianNoise& k) {
                   if (k.noise_var == 0.0) {
                     throw UndefinedQuantityError("noiseless observation has no differential entropy");
                   }
                   return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * k.noise_var);
                 },
                 [&](const AdditiveUniformNoise& k) { return std::log(k.width); },
                 [&](const AdditiveLogisticNoise& k) { return std::log(k.scale) + 2.0; },
                 [&](const ClaytonCopula&) {
                   auto integrand = [&](double y) {
                     const double f = pdf(y, x);
                     return f > 0.0 ? -f * std::log(f) : 0.0;
                   };
                   return numerics::integrate(integrand, 0.0, 1.0, 1e-12).value;
                 },
                 [&](const UniformScale&) {
                   if (x <= 0.0) throw UndefinedQuantityError("uniform_scale entropy needs x > 0");
                   return std::log(x);
                 }},
      kind_);
}

double ObservationSpec::score(double y, double x) const {
  return std::visit(
      overloaded{[&](const AdditiveGaussianNoise& k) -> double {
                   if (k.noise_var == 0.0) throw UndefinedQuantityError("noiseless observation has no score");
                   return (y - x) / k.noise_var;
                 },
                 [&](const AdditiveLogisticNoise& k) -> double {
                   return std::tanh(0.5 * (y - x) / k.scale) / k.scale;
                 },
                 [&](const ClaytonCopula& k) -> double {
                   const double xc = clamp_unit(x);
                   const double t = k.theta;
                   const double a = std::pow(xc, -t) + std::pow(y, -t) - 1.0;
                   return -(t + 1.0) / xc + (2.0 * t + 1.0) * std::pow(xc, -t - 1.0) / a;
                 },
                 [&](const auto&) -> double {
                   throw UndefinedQuantityError("Fisher information undefined: score of a non-regular model");
                 }},
      kind_);
}

double ObservationSpec::fisher_information(double x) const {
  return std::visit(
      overloaded{[&](const AdditiveGaussianNoise& k) -> double {
                   if (k.noise_var == 0.0) {
                     throw UndefinedQuantityError("Fisher information undefined: noiseless observation");
                   }
                   return 1.0 / k.noise_var;
                 },
                 [&](const AdditiveLogisticNoise&) -> double { return numeric_fisher_information(*this, x); },
                 [&](const ClaytonCopula&) -> double { return numeric_fisher_information(*this, x); },
                 [&](const auto&) -> double {
                   throw UndefinedQuantityError(
                       "Fisher information undefined: support of " + name() + " depends on x");
                 }},
      kind_);
}

EndpointDensities ObservationSpec::endpoint_densities(double x) const {
  return std::visit(overloaded{[&](const AdditiveUniformNoise& k) {
                                 return EndpointDensities{1.0 / k.width, 1.0 / k.width};
                               },
                               [&](const UniformScale&) {
                                 if (x <= 0.0) throw UndefinedQuantityError("uniform_scale endpoints need x > 0");
                                 return EndpointDensities{1.0 / x, 1.0 / x};
                               },
                               [&](const auto&) -> EndpointDensities {
                                 throw UndefinedQuantityError(
                                     "endpoint densities undefined for regular model " + name());
                               }},
                    kind_);
}

double ObservationSpec::identifiability_map(double x) const {
  if (regularity_class() == RegularityClass::regular) return conditional_median(x);
  const Interval s = conditional_support(x);
  return s.lo + s.hi;
}

Interval ObservationSpec::admissible_source_support() const {
  if (std::holds_alternative<ClaytonCopula>(kind_)) return {0.0, 1.0};
  if (std::holds_alternative<UniformScale>(kind_)) return {0.0, kInf};
  return {};
}

// ---------------------------------------------------------------------------
// JointModel and free functions
// ---------------------------------------------------------------------------

JointModel::JointModel(SourceSpec source, ObservationSpec observation)
    : source_(std::move(source)), observation_(std::move(observation)) {
  const Interval need = observation_.admissible_source_support();
  const Interval have = source_.support();
  if (have.lo < need.lo || have.hi > need.hi) {
    throw ConfigError(observation_.name() + " requires a source supported inside [" +
                      std::to_string(need.lo) + ", " + std::to_string(need.hi) + "]");
  }
}

double density(const JointModel& model, DensityTarget which, double point, std::optional<double> condition) {
  if (which == DensityTarget::source) return model.source().pdf(point);
  if (!condition) throw PreconditionError("conditional density needs a conditioning value");
  return model.observation().pdf(point, *condition);
}

std::vector<double> sample_observations(const JointModel& model, double x, std::size_t L,
                                        numerics::RngStream& rng) {
  if (L == 0) throw PreconditionError("sample_observations: L must be >= 1");
  std::vector<double> out(L);
  model.observation().sample(x, out, rng);
  return out;
}

double conditional_median(const JointModel& model, double x) {
  return model.observation().conditional_median(x);
}

double fisher_information(const JointModel& model, double x) {
  return model.observation().fisher_information(x);
}

double numeric_fisher_information(const ObservationSpec& observation, double x) {
  const Interval s = observation.quadrature_support(x);
  auto integrand = [&](double y) {
    const double f = observation.pdf(y, x);
    if (!(f > 0.0)) return 0.0;
    const double sc = observation.score(y, x);
    return sc * sc * f;
  };
  if (std::holds_alternative<ClaytonCopula>(observation.kind())) {
    return numerics::integrate_fixed(integrand, kClaytonFloor, 1.0, rule201());
  }
  return numerics::integrate_fixed(integrand, s.lo, s.hi, rule201());
}

bool is_identifiable_on_grid(const ObservationSpec& observation, std::span<const double> points) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(observation.identifiability_map(points[i]) > observation.identifiability_map(points[i - 1]))) {
      return false;
    }
  }
  return true;
}

}  // namespace ceo::models
