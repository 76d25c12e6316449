#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ceo/models.hpp"
#include "ceo/rng.hpp"

namespace ceo::testchannels {

using models::Interval;
using models::JointModel;

/// U = Y + N(0, var).
struct AdditiveGaussianKernel {
  double var = 1.0;
};

/// U = Y + unif[0, width].
struct AdditiveUniformKernel {
  double width = 1.0;
};

/// U = Y.
struct IdentityKernel {};

/// U drawn independently of Y; the var -> infinity end of a Gaussian sweep.
struct IndependentKernel {};

class TestChannelSpec {
 public:
  using Kind = std::variant<AdditiveGaussianKernel, AdditiveUniformKernel, IdentityKernel, IndependentKernel>;

  explicit TestChannelSpec(Kind kind);
  static TestChannelSpec additive_gaussian(double var);
  static TestChannelSpec additive_uniform(double width);
  static TestChannelSpec identity();
  static TestChannelSpec independent();

  const Kind& kind() const noexcept { return kind_; }
  std::string name() const;
  bool is_additive() const noexcept;
  bool is_identity() const noexcept { return std::holds_alternative<IdentityKernel>(kind_); }
  bool is_independent() const noexcept { return std::holds_alternative<IndependentKernel>(kind_); }

  /// One draw of U given Y = y. The independent kernel returns a standard
  /// normal that ignores y.
  double sample(double y, numerics::RngStream& rng) const;

  /// Density, cdf, support and entropy of the additive noise V. Additive
  /// kernels only.
  double noise_pdf(double v) const;
  double noise_cdf(double v) const;
  Interval noise_quadrature_support() const;
  double noise_entropy() const;
  double noise_variance() const;

 private:
  Kind kind_;
};

/// U_i ~ f_{U|Y}(. | Y_i), one draw per observation, in order.
std::vector<double> sample_codeword_surrogates(const TestChannelSpec& channel,
                                               std::span<const double> observations,
                                               numerics::RngStream& rng);

enum class Evaluation { closed_form_when_available, numeric };

/// f_{U|x}(u) = int f_{Y|x}(y) f_{U|Y}(u|y) dy for a fixed x.
class ComposedKernel {
 public:
  ComposedKernel(const JointModel& model, const TestChannelSpec& channel, double x);

  double pdf(double u) const;
  double cdf(double u) const;
  Interval support() const;
  Interval quadrature_support() const;
  std::vector<double> breakpoints() const;
  double median() const;
  /// h(U | X = x) in nats.
  double entropy(Evaluation how = Evaluation::closed_form_when_available) const;

 private:
  JointModel model_;
  TestChannelSpec channel_;
  double x_;
};

struct MutualInformation {
  double nats = 0.0;
  double residual_estimate = 0.0;
  bool converged = true;
};

/// I(Y; U | X) = E_X[h(U|X)] - h(V) for additive kernels, 0 for the
/// independent kernel and +infinity for the identity kernel.
MutualInformation conditional_mutual_information(const JointModel& model, const TestChannelSpec& channel,
                                                 Evaluation how = Evaluation::closed_form_when_available);

/// Per-agent rate of the identity channel when U is reported on a grid of
/// step `delta`: E_X[h(Y|X)] - log(delta) (high-resolution entropy of the
/// quantized observation given X).
double quantized_identity_rate(const JointModel& model, double delta);

/// Finite per-agent rate: conditional_mutual_information for proper test
/// channels, quantized_identity_rate for the identity channel.
double per_agent_rate(const JointModel& model, const TestChannelSpec& channel, double quantizer_step);

struct RateAccount {
  double i_yu_given_x = 0.0;
  std::size_t L = 0;

  double r_sum() const noexcept { return static_cast<double>(L) * i_yu_given_x; }
  double r_ind() const noexcept { return i_yu_given_x; }
};

/// The inverse of the map l(x) that the decoder applies to an order
/// statistic of the codewords.
struct InverseMap {
  std::function<double(double)> apply;
  double lipschitz = 1.0;
  std::string description;

  double operator()(double u) const { return apply(u); }
  static InverseMap identity();
  /// u -> (u - intercept) / slope.
  static InverseMap affine(double slope, double intercept);
};

struct RegularCertificate {
  double K_U = 1.0;    // Lipschitz constant of l^-1 (l = med(U|x))
  double alpha_U = 0.0;  // inf_x f_{U|x}(med(U|x))
};

struct NonRegularCertificate {
  double K_U = 1.0;    // Lipschitz constant of (a + b)^-1
  double delta_U = 0.0;  // endpoint density floor
  bool partial = false;  // only the upper endpoint moves with x
};

struct ChannelCertificate {
  std::optional<RegularCertificate> regular;
  std::optional<NonRegularCertificate> non_regular;
  /// Regular: inverse of med(U|x). Non-regular: inverse of the midpoint
  /// (a(x) + b(x)) / 2, which is what the midrange estimates.
  InverseMap inverse_map;
};

/// Certified constants for the shipped (model, channel) catalogue; throws
/// CertificateUnavailable otherwise.
ChannelCertificate regularity_certificate(const TestChannelSpec& channel, const JointModel& model);

/// Fisher information I_U(x) of the composed kernel f_{U|x}.
double codeword_fisher_information(const JointModel& model, const TestChannelSpec& channel, double x);

/// Nodes on the source quadrature support used for expectations over X.
struct SourceGrid {
  std::vector<double> nodes;
  std::vector<double> weights;  // include f_X
};
SourceGrid source_expectation_grid(const models::SourceSpec& source, std::size_t n = 64);

}  // namespace ceo::testchannels
