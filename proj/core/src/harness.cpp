#include "ceo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ceo/errors.hpp"
#include "ceo/parallel.hpp"
#include "ceo/rng.hpp"

namespace ceo::harness {

namespace {

constexpr std::uint64_t kDistortionTag = 1;
constexpr std::uint64_t kEquivalenceTag = 2;

double channel_parameter(const testchannels::TestChannelSpec& channel) {
  if (const auto* g = std::get_if<testchannels::AdditiveGaussianKernel>(&channel.kind())) return g->var;
  if (const auto* u = std::get_if<testchannels::AdditiveUniformKernel>(&channel.kind())) return u->width;
  return 0.0;
}

std::size_t max_L(const ExperimentConfig& config) {
  return *std::max_element(config.L_grid.begin(), config.L_grid.end());
}

estimators::EstimatorSpec make_estimator(const ExperimentConfig& config) {
  estimators::EstimatorSpec spec;
  spec.rule = config.rule;
  if (config.rule == estimators::Rule::posterior_gaussian) {
    const auto& src = std::get<models::GaussianSource>(config.model.source().family());
    spec.prior.mean = src.mean;
    spec.prior.var = src.var;
    spec.prior.codeword_var = std::get<models::AdditiveGaussianNoise>(config.model.observation().kind()).noise_var +
                              (config.channel.is_identity() ? 0.0 : config.channel.noise_variance());
    return spec;
  }
  spec.inverse_map = testchannels::regularity_certificate(config.channel, config.model).inverse_map;
  return spec;
}

numerics::BatchMeansEstimate combine_top_rows(const std::vector<double>& values,
                                              const std::vector<double>& half_widths) {
  numerics::BatchMeansEstimate e;
  double hw2 = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    e.mean += values[i];
    hw2 += half_widths[i] * half_widths[i];
  }
  const double n = static_cast<double>(values.size());
  e.mean /= n;
  e.half_width = std::sqrt(hw2) / n;
  return e;
}

}  // namespace

bool ExperimentConfig::regular() const {
  return model.observation().regularity_class() == models::RegularityClass::regular ||
         std::holds_alternative<testchannels::AdditiveGaussianKernel>(channel.kind());
}

void ExperimentConfig::validate() const {
  if (L_grid.empty()) throw ConfigError("L_grid must not be empty");
  for (std::size_t L : L_grid) {
    if (L == 0) throw ConfigError("L_grid entries must be >= 1");
  }
  if (trials < 16) throw ConfigError("trials must be >= 16 (batch-means confidence intervals use 16 batches)");
  if (!(r >= 1.0)) throw ConfigError("distortion order r must be >= 1");
  if (regular() && rule != estimators::Rule::posterior_gaussian && r < 2.0) {
    throw PreconditionError("regular configurations need r >= 2");
  }
  if (quantizer.mode == QuantizerPolicy::Mode::fixed && !(quantizer.step > 0.0)) {
    throw ConfigError("fixed quantizer policy needs step > 0");
  }
  for (std::size_t L : L_grid) estimators::check_preconditions(rule, model, channel, L);
}

quantizer::QuantizerSpec run_quantizer(const ExperimentConfig& config) {
  using Mode = QuantizerPolicy::Mode;
  if (config.quantizer.mode == Mode::disabled) return quantizer::QuantizerSpec{0.0, 0.0, 1.0};
  if (config.model.observation().is_noiseless() && config.channel.is_identity()) {
    // U = X exactly; there is nothing to quantize and the rate is zero.
    return quantizer::QuantizerSpec{0.0, 0.0, 1.0};
  }
  auto spec = quantizer::default_quantizer(config.model, config.channel, config.rule, max_L(config));
  if (config.quantizer.mode == Mode::fixed) {
    const double cells = std::ceil((spec.hi - spec.lo) / config.quantizer.step);
    spec = quantizer::make_quantizer(config.quantizer.step, spec.lo, spec.lo + cells * config.quantizer.step);
  }
  return spec;
}

double run_rate(const ExperimentConfig& config) {
  if (config.model.observation().is_noiseless()) return 0.0;
  return testchannels::per_agent_rate(config.model, config.channel, run_quantizer(config).step);
}

std::vector<double> simulate_absolute_errors(const ExperimentConfig& config, std::size_t L, std::size_t* clamps) {
  estimators::check_preconditions(config.rule, config.model, config.channel, L);
  const auto estimator = make_estimator(config);
  const auto q = run_quantizer(config);
  const auto& model = config.model;
  const auto& channel = config.channel;

  std::vector<double> errors(config.trials);
  std::vector<std::size_t> clamp_counts(config.trials, 0);
  numerics::parallel_for(config.trials, config.threads, [&](std::size_t t) {
    numerics::RngStream rng(config.seed, numerics::mix_stream_id({kDistortionTag, L, t}));
    const double x = model.source().sample(rng);
    std::vector<double> u(L);
    model.observation().sample(x, u, rng);
    for (double& v : u) v = channel.sample(v, rng);
    if (q.enabled()) clamp_counts[t] = quantizer::quantize_in_place(q, u);
    errors[t] = std::abs(x - estimators::estimate(estimator, u));
  });
  if (clamps != nullptr) {
    *clamps = 0;
    for (std::size_t c : clamp_counts) *clamps += c;
  }
  return errors;
}

numerics::BatchMeansEstimate distortion_from_errors(std::span<const double> abs_errors, double r) {
  std::vector<double> powered(abs_errors.size());
  for (std::size_t i = 0; i < abs_errors.size(); ++i) {
    powered[i] = r == 2.0 ? abs_errors[i] * abs_errors[i] : std::pow(abs_errors[i], r);
  }
  return numerics::batch_means(powered);
}

DistortionPoint run_distortion_point(const ExperimentConfig& config, std::size_t L) {
  if (config.trials < 16) throw ConfigError("trials must be >= 16");
  DistortionPoint p;
  p.L = L;
  const auto errors = simulate_absolute_errors(config, L, &p.clamps);
  p.distortion = distortion_from_errors(errors, config.r);
  p.rate = testchannels::RateAccount{run_rate(config), L};
  p.quantizer_step = run_quantizer(config).step;
  return p;
}

ScalingResult scaling_from_errors(const ExperimentConfig& config, const std::vector<std::vector<double>>& errors,
                                  double r) {
  if (errors.size() != config.L_grid.size()) throw PreconditionError("one error vector per L is required");
  ScalingResult res;
  res.regular = config.regular();
  res.per_agent_rate = run_rate(config);

  std::vector<std::size_t> order(config.L_grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return config.L_grid[a] < config.L_grid[b]; });
  for (std::size_t i : order) {
    ScalingRow row;
    row.L = config.L_grid[i];
    row.r_sum = testchannels::RateAccount{res.per_agent_rate, row.L}.r_sum();
    row.distortion = distortion_from_errors(errors[i], r);
    res.rows.push_back(row);
  }

  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& row : res.rows) {
    xs.push_back(row.r_sum);
    ys.push_back(row.distortion.mean);
  }
  if (xs.size() >= 4) res.fit = numerics::fit_loglog_slope(xs, ys);

  const double power = res.regular ? 0.5 * r : r;
  const std::size_t top = std::max<std::size_t>(1, (res.rows.size() + 2) / 3);
  std::vector<double> vals;
  std::vector<double> hws;
  for (std::size_t i = res.rows.size() - top; i < res.rows.size(); ++i) {
    const double scale = std::pow(res.rows[i].r_sum, power);
    vals.push_back(scale * res.rows[i].distortion.mean);
    hws.push_back(scale * res.rows[i].distortion.half_width);
  }
  const auto beta = combine_top_rows(vals, hws);
  res.beta_hat = beta.mean;
  res.beta_half_width = beta.half_width;
  return res;
}

ScalingResult run_scaling_study(const ExperimentConfig& config) {
  config.validate();
  const auto [lo, hi] = std::minmax_element(config.L_grid.begin(), config.L_grid.end());
  if (std::log10(static_cast<double>(*hi) / static_cast<double>(*lo)) < 1.5 - 1e-12) {
    throw PreconditionError("scaling study needs an L grid spanning at least 1.5 decades");
  }
  std::vector<std::vector<double>> errors;
  for (std::size_t L : config.L_grid) errors.push_back(simulate_absolute_errors(config, L));
  return scaling_from_errors(config, errors, config.r);
}

std::vector<EquivalenceRow> run_equivalence_study(const ExperimentConfig& config) {
  if (config.rule != estimators::Rule::posterior_gaussian) {
    throw PreconditionError("equivalence study needs the posterior_gaussian estimator");
  }
  config.validate();
  const auto spec = make_estimator(config);
  std::vector<std::size_t> grid = config.L_grid;
  std::sort(grid.begin(), grid.end());
  std::vector<EquivalenceRow> rows;
  for (std::size_t L : grid) {
    EquivalenceRow row;
    row.L = L;
    const std::vector<double> zeros(L, spec.prior.mean);
    // The posterior variance of the conjugate model does not depend on the data.
    const auto post = estimators::posterior(spec.prior, zeros);
    row.d_q = post.variance;
    row.d_log = post.entropy;
    const double power = std::exp(2.0 * row.d_log) / (2.0 * std::numbers::pi * std::numbers::e);
    row.gap = row.d_q - power;
    row.epi_holds = row.d_q >= power * (1.0 - 1e-12);

    std::vector<double> sq(config.trials);
    numerics::parallel_for(config.trials, config.threads, [&](std::size_t t) {
      numerics::RngStream rng(config.seed, numerics::mix_stream_id({kEquivalenceTag, L, t}));
      const double x = config.model.source().sample(rng);
      std::vector<double> u(L);
      config.model.observation().sample(x, u, rng);
      for (double& v : u) v = config.channel.sample(v, rng);
      const double e = x - estimators::posterior(spec.prior, u).mean;
      sq[t] = e * e;
    });
    row.d_q_monte_carlo = numerics::batch_means(sq);
    rows.push_back(row);
  }
  return rows;
}

BoundComparison run_bound_comparison(const ExperimentConfig& config, bool simulate) {
  BoundComparison out;
  out.regular = config.regular();
  out.r = config.r;
  const auto& model = config.model;
  std::vector<testchannels::TestChannelSpec> sweep = config.channel_sweep;
  if (sweep.empty()) sweep.push_back(config.channel);

  if (out.regular) {
    out.C1 = bounds::thm2_converse_coefficient(config.r);
    out.C2 = bounds::thm1_achievability_coefficient(config.r);
  }

  std::vector<double> mis;
  std::vector<double> conv;
  std::vector<double> ach;
  for (const auto& channel : sweep) {
    ComparisonRow row;
    row.channel = channel.name();
    row.channel_param = channel_parameter(channel);
    const ExperimentConfig point = [&] {
      ExperimentConfig c = config;
      c.channel = channel;
      return c;
    }();
    row.mi = run_rate(point);
    try {
      if (out.regular) {
        const auto t2 = bounds::thm2_converse_value(model, channel, config.r);
        row.converse = t2.jensen;
        row.converse_exp_log = t2.exp_log;
        bounds::BoundReport rep;
        rep.kind = bounds::BoundKind::thm2_conv;
        rep.value = t2.jensen;
        rep.inputs = {{"channel_param", row.channel_param}, {"mi_nats", t2.mi}, {"exp_log_form", t2.exp_log},
                      {"mean_fisher", t2.mean_fisher}, {"r", config.r}};
        rep.note = "Jensen form; bound under configured channel class";
        out.reports.push_back(rep);

        const auto cert = testchannels::regularity_certificate(channel, model);
        if (cert.regular) {
          row.achievability = bounds::thm1_achievability_value(*cert.regular, config.r, t2.mi);
          bounds::BoundReport a;
          a.kind = bounds::BoundKind::thm1_ach;
          a.value = *row.achievability;
          a.inputs = {{"channel_param", row.channel_param}, {"mi_nats", t2.mi}, {"K_U", cert.regular->K_U},
                      {"alpha_U", cert.regular->alpha_U}, {"r", config.r}};
          a.note = "bound under configured channel class";
          out.reports.push_back(a);
        }
      } else {
        // For the identity channel the rate axis is the quantized rate.
        auto t4 = bounds::thm4_converse_value(model, channel, config.r, row.mi);
        row.converse = t4.value;
        t4.inputs.emplace_back("channel_param", row.channel_param);
        out.reports.push_back(t4);
        const auto cert = testchannels::regularity_certificate(channel, model);
        if (cert.non_regular) {
          auto t3 = bounds::thm3_achievability_value(*cert.non_regular, config.r, row.mi);
          row.achievability = t3.value;
          t3.inputs.emplace_back("channel_param", row.channel_param);
          out.reports.push_back(t3);
        }
      }
    } catch (const std::exception& e) {
      row.note = e.what();
    }
    if (row.converse && row.achievability) {
      mis.push_back(row.mi);
      conv.push_back(*row.converse);
      ach.push_back(*row.achievability);
    }
    out.rows.push_back(row);
  }

  if (out.regular && mis.size() >= 4) {
    out.converse_limit = bounds::extrapolate_to_zero_rate(mis, conv);
    out.achievability_limit = bounds::extrapolate_to_zero_rate(mis, ach);
  }

  {
    bounds::BoundReport slb;
    slb.kind = bounds::BoundKind::slb;
    const double h = model.source().differential_entropy();
    slb.value = bounds::slb_zero_crossing(h, config.r);
    slb.inputs = {{"h_source", h}, {"r", config.r}};
    slb.note = "distortion where the Shannon lower bound reaches zero rate";
    out.reports.push_back(slb);
  }
  if (out.regular && model.observation().regularity_class() == models::RegularityClass::regular &&
      !model.observation().is_noiseless()) {
    bounds::BoundReport cb;
    cb.kind = bounds::BoundKind::clarke_barron;
    const double h = model.source().differential_entropy();
    const double logI = std::log(model.observation().fisher_information(model.source().mean()));
    const double L = static_cast<double>(max_L(config));
    cb.value = bounds::clarke_barron_mi(h, logI, std::max(2.0, L));
    cb.inputs = {{"h_source", h}, {"mean_log_fisher", logI}, {"L", L}};
    cb.note = "I(X; Y^L) asymptotic at the largest L of the grid";
    out.reports.push_back(cb);
  }

  if (simulate) out.simulation = run_scaling_study(config);
  return out;
}

bounds::BoundReport czz_finite_L(const ExperimentConfig& config, std::size_t L, double r) {
  const auto* src = std::get_if<models::UniformSource>(&config.model.source().family());
  const auto* obs = std::get_if<models::AdditiveUniformNoise>(&config.model.observation().kind());
  if (src == nullptr || src->lo != 0.0 || src->hi != 1.0 || obs == nullptr || !config.channel.is_identity()) {
    throw PreconditionError("finite-L CZZ needs a unif[0,1] source, additive_uniform observation and identity channel");
  }
  const double width = obs->width;
  auto rep = bounds::czz_lower_bound_shift_invariant(
      [&](double x) { return config.model.source().pdf(x); },
      [&](double h) { return bounds::p_min_additive_uniform(L, width, 0.0, h); }, r);
  rep.inputs.emplace_back("L", static_cast<double>(L));
  rep.note = "brute-force P_min over the (min, max) sufficient statistic";
  return rep;
}

}  // namespace ceo::harness
