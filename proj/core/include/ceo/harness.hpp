#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ceo/bounds.hpp"
#include "ceo/estimators.hpp"
#include "ceo/models.hpp"
#include "ceo/quantizer.hpp"
#include "ceo/stats.hpp"
#include "ceo/testchannels.hpp"

namespace ceo::harness {

struct QuantizerPolicy {
  enum class Mode { automatic, disabled, fixed };
  Mode mode = Mode::automatic;
  double step = 0.0;  // fixed mode only
};

struct ExperimentConfig {
  std::string name = "experiment";
  models::JointModel model{models::SourceSpec::gaussian(0.0, 1.0), models::ObservationSpec::additive_gaussian(1.0)};
  testchannels::TestChannelSpec channel = testchannels::TestChannelSpec::additive_gaussian(1.0);
  /// Channels for bound sweeps; empty means {channel}.
  std::vector<testchannels::TestChannelSpec> channel_sweep;
  estimators::Rule rule = estimators::Rule::median;
  double r = 2.0;
  std::vector<std::size_t> L_grid{101, 301, 1001, 3001, 10001};
  std::size_t trials = 20000;
  std::uint64_t seed = 20240601;
  QuantizerPolicy quantizer;
  std::size_t threads = 1;

  bool regular() const;
  /// Throws ConfigError / PreconditionError for inconsistent settings.
  void validate() const;
};

struct DistortionPoint {
  std::size_t L = 0;
  testchannels::RateAccount rate;
  numerics::BatchMeansEstimate distortion;
  double quantizer_step = 0.0;
  std::size_t clamps = 0;
};

/// |X - Xhat| for every trial at agent count L, in trial order. Trial t uses
/// its own stream (seed, mix(tag, L, t)).
std::vector<double> simulate_absolute_errors(const ExperimentConfig& config, std::size_t L,
                                             std::size_t* clamps = nullptr);

/// Batch-means estimate of E|X - Xhat|^r from simulate_absolute_errors.
numerics::BatchMeansEstimate distortion_from_errors(std::span<const double> abs_errors, double r);

/// Quantizer actually used for a run (automatic policy sized for max L_grid).
quantizer::QuantizerSpec run_quantizer(const ExperimentConfig& config);
/// Per-agent rate in nats for a run.
double run_rate(const ExperimentConfig& config);

DistortionPoint run_distortion_point(const ExperimentConfig& config, std::size_t L);

struct ScalingRow {
  std::size_t L = 0;
  double r_sum = 0.0;
  numerics::BatchMeansEstimate distortion;
};

struct ScalingResult {
  std::vector<ScalingRow> rows;
  numerics::LogLogFit fit;
  double beta_hat = 0.0;
  double beta_half_width = 0.0;
  bool regular = true;
  double per_agent_rate = 0.0;
};

/// Slope fit over every L; beta_hat from R_sum^{r/2} D (regular) or
/// R_sum^r D (non-regular) averaged over the top third of the L grid.
ScalingResult run_scaling_study(const ExperimentConfig& config);

/// Same from precomputed per-L absolute errors (one vector per L_grid entry).
ScalingResult scaling_from_errors(const ExperimentConfig& config, const std::vector<std::vector<double>>& errors,
                                  double r);

struct EquivalenceRow {
  std::size_t L = 0;
  double d_q = 0.0;    // posterior variance
  double d_log = 0.0;  // posterior differential entropy
  double gap = 0.0;    // d_q - e^{2 d_log} / (2 pi e)
  bool epi_holds = true;
  numerics::BatchMeansEstimate d_q_monte_carlo;
};

std::vector<EquivalenceRow> run_equivalence_study(const ExperimentConfig& config);

struct ComparisonRow {
  std::string channel;
  double channel_param = 0.0;
  double mi = 0.0;
  std::optional<double> converse;         // thm2 Jensen form or thm4
  std::optional<double> converse_exp_log;  // thm2 only
  std::optional<double> achievability;    // thm1 or thm3
  std::string note;
};

struct BoundComparison {
  bool regular = true;
  double r = 2.0;
  std::optional<double> C1;
  std::optional<double> C2;
  std::vector<ComparisonRow> rows;
  std::vector<bounds::BoundReport> reports;
  std::optional<bounds::Extrapolation> converse_limit;
  std::optional<bounds::Extrapolation> achievability_limit;
  std::optional<ScalingResult> simulation;
};

/// Bounds for every channel in the sweep plus the zero-rate extrapolations;
/// with `simulate`, also a scaling study on config.channel.
BoundComparison run_bound_comparison(const ExperimentConfig& config, bool simulate = false);

/// Finite-L Chazan-Zakai-Ziv bound for a unif[0,1] source, additive uniform
/// observation and identity test channel, with brute-force P_min.
bounds::BoundReport czz_finite_L(const ExperimentConfig& config, std::size_t L, double r);

}  // namespace ceo::harness
