#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ceo/models.hpp"
#include "ceo/quadrature.hpp"
#include "ceo/testchannels.hpp"

namespace ceo::bounds {

enum class BoundKind { slb, clarke_barron, thm1_ach, thm2_conv, thm3_ach, thm4_conv, czz_finite_L };

std::string to_string(BoundKind kind);

struct BoundReport {
  BoundKind kind = BoundKind::slb;
  double value = 0.0;
  double quadrature_residual = 0.0;
  std::vector<std::pair<std::string, double>> inputs;
  std::string note;
};

/// h - (1/r) log(r e D (2 Gamma(1 + 1/r))^r), in nats. Negative values are
/// vacuous but returned as is.
double shannon_lower_bound(double h_source, double r, double D);

/// Distortion at which the Shannon lower bound crosses zero.
double slb_zero_crossing(double h_source, double r);

/// 1/2 log(L / (2 pi e)) + h + 1/2 E[log I], the o(1) term dropped.
double clarke_barron_mi(double h_source, double mean_log_fisher, double L);

/// C1(r) = (1/(r e)) (sqrt(pi e) / (sqrt2 Gamma(1 + 1/r)))^r; r >= 2.
double thm2_converse_coefficient(double r);
/// C2(r) = 2^{-r/2} Gamma((r+1)/2) / sqrt(pi); r >= 2.
double thm1_achievability_coefficient(double r);

struct ChernoffResult {
  double value = 0.0;  // nats
  double s_star = 0.5;
  double quadrature_residual = 0.0;
  bool converged = true;
};

/// max over s in [0,1] of -log int f0^s f1^(1-s) over the pieces between
/// `breakpoints`. f^0 is read as the indicator of f > 0, which makes the
/// exponent continuous at s = 0 and s = 1.
ChernoffResult chernoff_information(const numerics::ScalarFunction& f0, const numerics::ScalarFunction& f1,
                                    std::span<const double> breakpoints);

/// Chernoff information between f_{U|x0} and f_{U|x1}.
ChernoffResult codeword_chernoff(const models::JointModel& model, const testchannels::TestChannelSpec& channel,
                                 double x0, double x1);

struct DerivativeEstimate {
  double value = 0.0;
  double error_estimate = 0.0;  // spread of the two Richardson levels
};

/// Right derivative at 0 of Delta -> Chernoff(f_{U|x}, f_{U|x+Delta}), from
/// steps {1e-3, 5e-4, 2.5e-4} with Richardson extrapolation. At the upper end
/// of the source support the pair (x - Delta, x) is used instead.
DerivativeEstimate g_of_x(const models::JointModel& model, const testchannels::TestChannelSpec& channel, double x);

using PminFunction = std::function<double(double x0, double x1)>;

/// int_0^1 r 2^-r h^(r-1) int_0^(1-h) (f(x) + f(x+h))/2 P_min(x, x+h) dx dh
/// with 256 x 256 Gauss-Legendre nodes; residual from doubling to 512.
BoundReport czz_lower_bound_exact(const numerics::ScalarFunction& source_pdf, const PminFunction& p_min, double r,
                                  std::size_t nodes = 256);

/// Same integral when P_min depends on h = x1 - x0 only.
BoundReport czz_lower_bound_shift_invariant(const numerics::ScalarFunction& source_pdf,
                                            const std::function<double(double h)>& p_min_of_h, double r,
                                            std::size_t nodes = 256);

/// Minimum error probability (equal priors) of testing x0 against x1 from L
/// i.i.d. draws of x + unif[0, width], by Gauss-Legendre integration over the
/// sufficient statistic (min, max).
double p_min_additive_uniform(std::size_t L, double width, double x0, double x1);

/// (r / 2^r) int_0^1 h^(r-1) int f_X(x) I^r e^(-h g(x)) dx dh.
BoundReport thm4_converse_value(const numerics::ScalarFunction& source_pdf, models::Interval source_support,
                                const numerics::ScalarFunction& g, double r, double mi);

/// Model/channel form: g from g_of_x (once for location families, on the
/// source grid otherwise) and I = I(Y;U|X) unless `mi` is given (the
/// identity channel needs the quantized rate).
BoundReport thm4_converse_value(const models::JointModel& model, const testchannels::TestChannelSpec& channel,
                                double r, std::optional<double> mi = std::nullopt);

/// 2 r! (K_U I / delta_U)^r.
double thm3_achievability_value(double K_U, double delta_U, double r, double mi);
BoundReport thm3_achievability_value(const testchannels::NonRegularCertificate& cert, double r, double mi);

struct Thm2Value {
  double exp_log = 0.0;  // C1 (I / e^{E log I_U(X)})^{r/2}
  double jensen = 0.0;   // C1 (I / E[I_U(X)])^{r/2}
  double mi = 0.0;
  double mean_fisher = 0.0;
  double mean_log_fisher = 0.0;
};

Thm2Value thm2_converse_value(const models::JointModel& model, const testchannels::TestChannelSpec& channel, double r);

/// C2 (K_U^2 I / alpha_U^2)^{r/2}.
double thm1_achievability_value(const testchannels::RegularCertificate& cert, double r, double mi);

struct Extrapolation {
  double intercept = 0.0;
  double stderr_ = 0.0;
  double ci_half_width = 0.0;  // 95%
};

/// Quadratic least-squares fit of `values` against `mi` evaluated at mi = 0;
/// the finite-sweep stand-in for the I(Y;U|X) -> 0 limit.
Extrapolation extrapolate_to_zero_rate(std::span<const double> mi, std::span<const double> values);

}  // namespace ceo::bounds
