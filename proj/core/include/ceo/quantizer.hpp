#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ceo/estimators.hpp"
#include "ceo/models.hpp"
#include "ceo/stats.hpp"
#include "ceo/testchannels.hpp"

namespace ceo::quantizer {

/// Uniform scalar quantizer on [lo, hi] with cells [lo + k step, lo + (k+1) step)
/// reported by their midpoints. step == 0 disables quantization.
struct QuantizerSpec {
  double step = 0.0;
  double lo = 0.0;
  double hi = 1.0;

  bool enabled() const noexcept { return step > 0.0; }
  std::size_t cells() const;
  double midpoint(std::size_t k) const { return lo + (static_cast<double>(k) + 0.5) * step; }
};

QuantizerSpec make_quantizer(double step, double lo, double hi);

/// Nearest cell midpoint. A value on a cell boundary goes to the lower cell.
/// Values outside [lo, hi] map to the edge cell and bump *clamp_count.
double quantize(const QuantizerSpec& spec, double u, std::size_t* clamp_count = nullptr);

/// Quantizes in place; returns the number of clamped values.
std::size_t quantize_in_place(const QuantizerSpec& spec, std::span<double> values);

/// 1e-2 * sd(U|X) / sqrt(L_max) for median and mean decoders and
/// 1e-2 * sd(U|X) / L_max for the midrange, so quantization stays two orders
/// below the estimator spread at the largest L of a run.
double default_step(const models::JointModel& model, const testchannels::TestChannelSpec& channel,
                    estimators::Rule rule, std::size_t L_max);

/// Quantizer with default_step covering the codeword quadrature range.
QuantizerSpec default_quantizer(const models::JointModel& model, const testchannels::TestChannelSpec& channel,
                                estimators::Rule rule, std::size_t L_max);

struct FinenessReport {
  /// E|S - q(S)|^j for j = 1..2r, S the sample median (odd L) or a single
  /// codeword (even L).
  std::vector<numerics::BatchMeansEstimate> delta0;
  /// E|q(S) - med(q(U_i))|^j for j = 1..2r (zero for a monotone quantizer).
  std::vector<numerics::BatchMeansEstimate> delta0_decoded;
  double i_yu = 0.0;
  double i_yu_discrete = 0.0;
  double i_xu = 0.0;
  double i_xu_discrete = 0.0;
  double delta1 = 0.0;  // |I(Y;U) - I(qY;qU)|; NaN for the identity channel
  double delta2 = 0.0;  // |I(X;U) - I(qX;qU)|
  std::size_t clamps = 0;
};

/// Monte-Carlo delta0 plus exact discrete MIs on the grid anchored at spec.lo.
FinenessReport verify_fineness(const QuantizerSpec& spec, const models::JointModel& model,
                               const testchannels::TestChannelSpec& channel, std::size_t L, int r,
                               std::size_t trials, std::uint64_t seed, std::size_t threads = 1);

/// I(qX; qU) from the induced joint pmf: 4-point Gauss-Legendre in each x
/// cell and exact cdf differences across u cells.
double discrete_mutual_information_xu(const QuantizerSpec& spec, const models::JointModel& model,
                                      const testchannels::TestChannelSpec& channel);

/// I(qY; qU); additive test channels only.
double discrete_mutual_information_yu(const QuantizerSpec& spec, const models::JointModel& model,
                                      const testchannels::TestChannelSpec& channel);

/// Continuous I(X;U) and I(Y;U) (unconditional).
double mutual_information_xu(const models::JointModel& model, const testchannels::TestChannelSpec& channel);
double mutual_information_yu(const models::JointModel& model, const testchannels::TestChannelSpec& channel);

}  // namespace ceo::quantizer
