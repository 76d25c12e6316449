#include "ceo/testchannels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ceo/errors.hpp"
#include "ceo/quadrature.hpp"

namespace ceo::testchannels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTruncation = 8.0;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Trapezoid from unif[0,a] + unif[0,b], evaluated at t.
double ramp(double z) { return z > 0.0 ? z : 0.0; }
double trapezoid_pdf(double t, double a, double b) {
  return (ramp(t) - ramp(t - a) - ramp(t - b) + ramp(t - a - b)) / (a * b);
}
double trapezoid_cdf(double t, double a, double b) {
  auto sq = [](double z) { return z > 0.0 ? z * z : 0.0; };
  return std::clamp((sq(t) - sq(t - a) - sq(t - b) + sq(t - a - b)) / (2.0 * a * b), 0.0, 1.0);
}

const models::AdditiveGaussianNoise* gaussian_obs(const JointModel& m) {
  return std::get_if<models::AdditiveGaussianNoise>(&m.observation().kind());
}
const models::AdditiveUniformNoise* uniform_obs(const JointModel& m) {
  return std::get_if<models::AdditiveUniformNoise>(&m.observation().kind());
}

const numerics::GaussLegendreRule& rule201() {
  static const numerics::GaussLegendreRule rule = numerics::gauss_legendre(201);
  return rule;
}

std::vector<double> sorted_unique(std::vector<double> v, double lo, double hi) {
  for (double& p : v) p = std::clamp(p, lo, hi);
  v.push_back(lo);
  v.push_back(hi);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) <= 1e-15 * (1.0 + std::abs(a)); }),
          v.end());
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// TestChannelSpec
// ---------------------------------------------------------------------------

TestChannelSpec::TestChannelSpec(Kind kind) : kind_(kind) {
  if (const auto* g = std::get_if<AdditiveGaussianKernel>(&kind_)) {
    if (!(g->var > 0.0) || !std::isfinite(g->var)) throw ConfigError("gaussian test channel requires var > 0");
  }
  if (const auto* u = std::get_if<AdditiveUniformKernel>(&kind_)) {
    if (!(u->width > 0.0) || !std::isfinite(u->width)) throw ConfigError("uniform test channel requires width > 0");
  }
}

TestChannelSpec TestChannelSpec::additive_gaussian(double var) { return TestChannelSpec(AdditiveGaussianKernel{var}); }
TestChannelSpec TestChannelSpec::additive_uniform(double width) {
  return TestChannelSpec(AdditiveUniformKernel{width});
}
TestChannelSpec TestChannelSpec::identity() { return TestChannelSpec(IdentityKernel{}); }
TestChannelSpec TestChannelSpec::independent() { return TestChannelSpec(IndependentKernel{}); }

std::string TestChannelSpec::name() const {
  return std::visit(overloaded{[](const AdditiveGaussianKernel&) { return std::string("additive_gaussian"); },
                               [](const AdditiveUniformKernel&) { return std::string("additive_uniform"); },
                               [](const IdentityKernel&) { return std::string("identity"); },
                               [](const IndependentKernel&) { return std::string("independent"); }},
                    kind_);
}

bool TestChannelSpec::is_additive() const noexcept {
  return std::holds_alternative<AdditiveGaussianKernel>(kind_) || std::holds_alternative<AdditiveUniformKernel>(kind_);
}

double TestChannelSpec::sample(double y, numerics::RngStream& rng) const {
  return std::visit(overloaded{[&](const AdditiveGaussianKernel& k) { return y + std::sqrt(k.var) * rng.normal(); },
                               [&](const AdditiveUniformKernel& k) { return y + k.width * rng.uniform(); },
                               [&](const IdentityKernel&) { return y; },
                               [&](const IndependentKernel&) { return rng.normal(); }},
                    kind_);
}

double TestChannelSpec::noise_pdf(double v) const {
  return std::visit(overloaded{[&](const AdditiveGaussianKernel& k) {
                                 const double sd = std::sqrt(k.var);
                                 return normal_pdf(v / sd) / sd;
                               },
                               [&](const AdditiveUniformKernel& k) {
                                 return (v < 0.0 || v > k.width) ? 0.0 : 1.0 / k.width;
                               },
                               [&](const auto&) -> double {
                                 throw PreconditionError("noise density requires an additive test channel");
                               }},
                    kind_);
}

double TestChannelSpec::noise_cdf(double v) const {
  return std::visit(overloaded{[&](const AdditiveGaussianKernel& k) { return normal_cdf(v / std::sqrt(k.var)); },
                               [&](const AdditiveUniformKernel& k) { return std::clamp(v / k.width, 0.0, 1.0); },
                               [&](const auto&) -> double {
                                 throw PreconditionError("noise cdf requires an additive test channel");
                               }},
                    kind_);
}

Interval TestChannelSpec::noise_quadrature_support() const {
  return std::visit(overloaded{[&](const AdditiveGaussianKernel& k) {
                                 const double w = kTruncation * std::sqrt(k.var);
                                 return Interval{-w, w};
                               },
                               [&](const AdditiveUniformKernel& k) { return Interval{0.0, k.width}; },
                               [&](const auto&) -> Interval {
                                 throw PreconditionError("noise support requires an additive test channel");
                               }},
                    kind_);
}

double TestChannelSpec::noise_entropy() const {
  return std::visit(overloaded{[&](const AdditiveGaussianKernel& k) {
                                 return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * k.var);
                               },
                               [&](const AdditiveUniformKernel& k) { return std::log(k.width); },
                               [&](const auto&) -> double {
                                 throw PreconditionError("noise entropy requires an additive test channel");
                               }},
                    kind_);
}

double TestChannelSpec::noise_variance() const {
  return std::visit(overloaded{[&](const AdditiveGaussianKernel& k) { return k.var; },
                               [&](const AdditiveUniformKernel& k) { return k.width * k.width / 12.0; },
                               [&](const IdentityKernel&) { return 0.0; },
                               [&](const IndependentKernel&) { return kInf; }},
                    kind_);
}

std::vector<double> sample_codeword_surrogates(const TestChannelSpec& channel, std::span<const double> observations,
                                               numerics::RngStream& rng) {
  std::vector<double> out(observations.size());
  for (std::size_t i = 0; i < observations.size(); ++i) out[i] = channel.sample(observations[i], rng);
  return out;
}

// ---------------------------------------------------------------------------
// ComposedKernel
// ---------------------------------------------------------------------------

ComposedKernel::ComposedKernel(const JointModel& model, const TestChannelSpec& channel, double x)
    : model_(model), channel_(channel), x_(x) {}

double ComposedKernel::pdf(double u) const {
  const auto& obs = model_.observation();
  if (channel_.is_identity()) return obs.pdf(u, x_);
  if (channel_.is_independent()) return normal_pdf(u);

  const auto* gk = std::get_if<AdditiveGaussianKernel>(&channel_.kind());
  const auto* uk = std::get_if<AdditiveUniformKernel>(&channel_.kind());
  if (obs.is_noiseless()) return channel_.noise_pdf(u - x_);
  if (const auto* g = gaussian_obs(model_); g && gk) {
    const double sd = std::sqrt(g->noise_var + gk->var);
    return normal_pdf((u - x_) / sd) / sd;
  }
  if (const auto* w = uniform_obs(model_)) {
    if (uk) return trapezoid_pdf(u - x_, w->width, uk->width);
    if (gk) {
      const double sd = std::sqrt(gk->var);
      return (normal_cdf((u - x_) / sd) - normal_cdf((u - x_ - w->width) / sd)) / w->width;
    }
  }

  const Interval ys = obs.quadrature_support(x_);
  const Interval vs = channel_.noise_quadrature_support();
  const double lo = std::max(ys.lo, u - vs.hi);
  const double hi = std::min(ys.hi, u - vs.lo);
  if (!(hi > lo)) return 0.0;
  std::vector<double> cuts = obs.breakpoints(x_);
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double c) { return c <= lo || c >= hi; }), cuts.end());
  cuts = sorted_unique(std::move(cuts), lo, hi);
  auto integrand = [&](double y) { return obs.pdf(y, x_) * channel_.noise_pdf(u - y); };
  return std::max(0.0, numerics::integrate_piecewise(integrand, cuts, 1e-12).value);
}

double ComposedKernel::cdf(double u) const {
  const auto& obs = model_.observation();
  if (channel_.is_identity()) return obs.cdf(u, x_);
  if (channel_.is_independent()) return normal_cdf(u);

  const auto* gk = std::get_if<AdditiveGaussianKernel>(&channel_.kind());
  const auto* uk = std::get_if<AdditiveUniformKernel>(&channel_.kind());
  if (obs.is_noiseless()) return channel_.noise_cdf(u - x_);
  if (const auto* g = gaussian_obs(model_); g && gk) {
    return normal_cdf((u - x_) / std::sqrt(g->noise_var + gk->var));
  }
  if (const auto* w = uniform_obs(model_); w && uk) return trapezoid_cdf(u - x_, w->width, uk->width);

  const Interval ys = obs.quadrature_support(x_);
  const Interval vs = channel_.noise_quadrature_support();
  std::vector<double> cuts = obs.breakpoints(x_);
  cuts.push_back(u - vs.lo);
  cuts.push_back(u - vs.hi);
  cuts = sorted_unique(std::move(cuts), ys.lo, ys.hi);
  auto integrand = [&](double y) { return obs.pdf(y, x_) * channel_.noise_cdf(u - y); };
  return std::clamp(numerics::integrate_piecewise(integrand, cuts, 1e-12).value, 0.0, 1.0);
}

Interval ComposedKernel::support() const {
  const auto& obs = model_.observation();
  if (channel_.is_identity()) return obs.conditional_support(x_);
  if (channel_.is_independent()) return Interval{};
  const Interval ys = obs.conditional_support(x_);
  if (std::holds_alternative<AdditiveGaussianKernel>(channel_.kind())) return Interval{};
  const double w = std::get<AdditiveUniformKernel>(channel_.kind()).width;
  return Interval{ys.lo, ys.hi + w};
}

Interval ComposedKernel::quadrature_support() const {
  const auto& obs = model_.observation();
  if (channel_.is_identity()) return obs.quadrature_support(x_);
  if (channel_.is_independent()) return Interval{-kTruncation, kTruncation};
  if (const auto* g = gaussian_obs(model_)) {
    if (const auto* gk = std::get_if<AdditiveGaussianKernel>(&channel_.kind())) {
      const double w = kTruncation * std::sqrt(g->noise_var + gk->var);
      return Interval{x_ - w, x_ + w};
    }
  }
  const Interval ys = obs.quadrature_support(x_);
  const Interval vs = channel_.noise_quadrature_support();
  return Interval{ys.lo + vs.lo, ys.hi + vs.hi};
}

std::vector<double> ComposedKernel::breakpoints() const {
  const Interval q = quadrature_support();
  if (channel_.is_identity()) return model_.observation().breakpoints(x_);
  if (channel_.is_independent()) return {q.lo, q.hi};
  std::vector<double> ys = model_.observation().breakpoints(x_);
  const Interval vs = channel_.noise_quadrature_support();
  std::vector<double> out;
  for (double y : ys) {
    out.push_back(y + vs.lo);
    out.push_back(y + vs.hi);
  }
  return sorted_unique(std::move(out), q.lo, q.hi);
}

double ComposedKernel::median() const {
  const auto& obs = model_.observation();
  if (channel_.is_identity()) return obs.conditional_median(x_);
  if (channel_.is_independent()) return 0.0;
  const bool symmetric_channel = std::holds_alternative<AdditiveGaussianKernel>(channel_.kind());
  if (obs.is_noiseless()) return symmetric_channel ? x_ : x_ + 0.5 * std::get<AdditiveUniformKernel>(channel_.kind()).width;
  if (gaussian_obs(model_) && symmetric_channel) return x_;
  if (const auto* w = uniform_obs(model_)) {
    if (symmetric_channel) return x_ + 0.5 * w->width;
    return x_ + 0.5 * (w->width + std::get<AdditiveUniformKernel>(channel_.kind()).width);
  }
  if (std::holds_alternative<models::AdditiveLogisticNoise>(obs.kind()) && symmetric_channel) return x_;

  const Interval q = quadrature_support();
  double lo = q.lo;
  double hi = q.hi;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ComposedKernel::entropy(Evaluation how) const {
  const auto& obs = model_.observation();
  if (how == Evaluation::closed_form_when_available) {
    if (channel_.is_identity()) return obs.conditional_entropy(x_);
    if (channel_.is_independent()) return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
    if (const auto* g = gaussian_obs(model_)) {
      if (const auto* gk = std::get_if<AdditiveGaussianKernel>(&channel_.kind())) {
        return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * (g->noise_var + gk->var));
      }
    }
  }
  const std::vector<double> cuts = breakpoints();
  auto integrand = [&](double u) {
    const double f = pdf(u);
    return f > 0.0 ? -f * std::log(f) : 0.0;
  };
  const auto res = numerics::integrate_piecewise(integrand, cuts, 1e-11);
  if (!std::isfinite(res.value)) throw NumericalError("entropy of composed kernel is not finite");
  return res.value;
}

// ---------------------------------------------------------------------------
// Rates
// ---------------------------------------------------------------------------

SourceGrid source_expectation_grid(const models::SourceSpec& source, std::size_t n) {
  const auto rule = numerics::gauss_legendre(n);
  const Interval q = source.quadrature_support();
  const double half = 0.5 * (q.hi - q.lo);
  const double mid = 0.5 * (q.hi + q.lo);
  SourceGrid grid;
  grid.nodes.resize(n);
  grid.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid.nodes[i] = mid + half * rule.nodes[i];
    grid.weights[i] = half * rule.weights[i] * source.pdf(grid.nodes[i]);
  }
  return grid;
}

MutualInformation conditional_mutual_information(const JointModel& model, const TestChannelSpec& channel,
                                                 Evaluation how) {
  const auto& obs = model.observation();
  // Y is a function of X, so U carries nothing beyond X.
  if (channel.is_independent() || obs.is_noiseless()) return {0.0, 0.0, true};
  if (channel.is_identity()) return {kInf, 0.0, true};

  if (how == Evaluation::closed_form_when_available) {
    if (const auto* g = gaussian_obs(model)) {
      if (const auto* gk = std::get_if<AdditiveGaussianKernel>(&channel.kind())) {
        return {0.5 * std::log1p(g->noise_var / gk->var), 0.0, true};
      }
    }
  }
  const double hv = channel.noise_entropy();
  if (obs.is_location_family()) {
    const ComposedKernel k(model, channel, model.source().mean());
    const auto cuts = k.breakpoints();
    auto integrand = [&](double u) {
      const double f = k.pdf(u);
      return f > 0.0 ? -f * std::log(f) : 0.0;
    };
    const auto res = numerics::integrate_piecewise(integrand, cuts, 1e-11);
    return {std::max(0.0, res.value - hv), res.residual_estimate, res.converged};
  }

  const SourceGrid grid = source_expectation_grid(model.source(), 64);
  double acc = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    acc += grid.weights[i] * ComposedKernel(model, channel, grid.nodes[i]).entropy(Evaluation::numeric);
    mass += grid.weights[i];
  }
  return {std::max(0.0, acc / mass - hv), std::abs(1.0 - mass), true};
}

double quantized_identity_rate(const JointModel& model, double delta) {
  if (!(delta > 0.0)) throw PreconditionError("identity channel has infinite rate without a quantizer step");
  const auto& obs = model.observation();
  if (obs.is_noiseless()) return 0.0;
  if (obs.is_location_family()) return obs.conditional_entropy(model.source().mean()) - std::log(delta);
  const SourceGrid grid = source_expectation_grid(model.source(), 64);
  double acc = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    acc += grid.weights[i] * obs.conditional_entropy(grid.nodes[i]);
    mass += grid.weights[i];
  }
  return acc / mass - std::log(delta);
}

double per_agent_rate(const JointModel& model, const TestChannelSpec& channel, double quantizer_step) {
  if (channel.is_identity()) return quantized_identity_rate(model, quantizer_step);
  return conditional_mutual_information(model, channel).nats;
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

InverseMap InverseMap::identity() { return InverseMap{[](double u) { return u; }, 1.0, "u"}; }

InverseMap InverseMap::affine(double slope, double intercept) {
  if (slope == 0.0) throw PreconditionError("affine inverse map needs a nonzero slope");
  return InverseMap{[slope, intercept](double u) { return (u - intercept) / slope; }, 1.0 / std::abs(slope),
                    "(u - " + std::to_string(intercept) + ") / " + std::to_string(slope)};
}

ChannelCertificate regularity_certificate(const TestChannelSpec& channel, const JointModel& model) {
  const auto& obs = model.observation();
  const auto unavailable = [&]() {
    return CertificateUnavailable("certificate unavailable for " + obs.name() + " + " + channel.name() +
                                  " channel; supply constants");
  };
  if (channel.is_independent()) throw unavailable();

  if (obs.is_location_family()) {
    const ComposedKernel k(model, channel, 0.0);
    const bool bounded_jump = obs.regularity_class() != models::RegularityClass::regular &&
                              !std::holds_alternative<AdditiveGaussianKernel>(channel.kind());
    ChannelCertificate cert;
    if (bounded_jump) {
      const Interval s = k.support();
      NonRegularCertificate nr;
      nr.delta_U = std::min(k.pdf(s.lo), k.pdf(s.hi));
      // A smoothing channel removes the endpoint jump; no constants to certify.
      if (!(nr.delta_U > 0.0)) throw unavailable();
      // (a + b)(x) = 2x + const, so its inverse is 1/2-Lipschitz.
      nr.K_U = 0.5;
      cert.non_regular = nr;
      cert.inverse_map = InverseMap::affine(1.0, 0.5 * (s.lo + s.hi));
      return cert;
    }
    const double m0 = k.median();
    RegularCertificate rc;
    rc.K_U = 1.0;
    rc.alpha_U = (obs.is_noiseless() && channel.is_identity()) ? kInf : k.pdf(m0);
    cert.regular = rc;
    cert.inverse_map = m0 == 0.0 ? InverseMap::identity() : InverseMap::affine(1.0, m0);
    return cert;
  }

  if (const auto* c = std::get_if<models::ClaytonCopula>(&obs.kind()); c && channel.is_identity()) {
    const double t = c->theta;
    const double q = std::pow(2.0, t / (1.0 + t)) - 1.0;
    double alpha = kInf;
    for (int i = 1; i <= 256; ++i) {
      const double x = static_cast<double>(i) / 256.0;
      alpha = std::min(alpha, obs.pdf(obs.conditional_median(x), x));
    }
    ChannelCertificate cert;
    // med(Y|x) = x (x^t + q)^(-1/t) has derivative q (x^t + q)^(-1/t - 1),
    // smallest at x = 1.
    cert.regular = RegularCertificate{std::pow(1.0 + q, 1.0 + 1.0 / t) / q, alpha};
    cert.inverse_map = InverseMap{[t, q](double u) {
                                    if (u <= 0.0) return 0.0;
                                    if (u >= 1.0) return 1.0;
                                    return std::min(1.0, std::pow((std::pow(u, -t) - 1.0) / q, -1.0 / t));
                                  },
                                  cert.regular->K_U, "clayton median inverse"};
    return cert;
  }

  if (std::holds_alternative<models::UniformScale>(obs.kind()) && channel.is_identity()) {
    const double hi = model.source().support().hi;
    ChannelCertificate cert;
    cert.non_regular = NonRegularCertificate{1.0, 1.0 / hi, true};
    cert.inverse_map = InverseMap::affine(0.5, 0.0);
    return cert;
  }
  throw unavailable();
}

double codeword_fisher_information(const JointModel& model, const TestChannelSpec& channel, double x) {
  const auto& obs = model.observation();
  if (channel.is_independent()) return 0.0;
  if (channel.is_identity()) return obs.fisher_information(x);
  const bool smooth_channel = std::holds_alternative<AdditiveGaussianKernel>(channel.kind());
  if (obs.regularity_class() != models::RegularityClass::regular && !smooth_channel) {
    throw UndefinedQuantityError("Fisher information undefined: codeword support depends on x");
  }
  if (obs.is_noiseless()) return 1.0 / channel.noise_variance();
  if (const auto* g = gaussian_obs(model); g && smooth_channel) {
    return 1.0 / (g->noise_var + std::get<AdditiveGaussianKernel>(channel.kind()).var);
  }

  const ComposedKernel k(model, channel, x);
  const Interval q = k.quadrature_support();
  const double h = 1e-4 * std::sqrt(obs.conditional_variance(x) + channel.noise_variance());
  const ComposedKernel kp(model, channel, x + h);
  const ComposedKernel km(model, channel, x - h);
  auto integrand = [&](double u) {
    const double f = k.pdf(u);
    const double fp = kp.pdf(u);
    const double fm = km.pdf(u);
    if (!(f > 0.0) || !(fp > 0.0) || !(fm > 0.0)) return 0.0;
    const double s = (std::log(fp) - std::log(fm)) / (2.0 * h);
    return s * s * f;
  };
  return numerics::integrate_fixed(integrand, q.lo, q.hi, rule201());
}

}  // namespace ceo::testchannels
