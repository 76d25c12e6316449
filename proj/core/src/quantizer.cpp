#include "ceo/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "ceo/errors.hpp"
#include "ceo/parallel.hpp"
#include "ceo/quadrature.hpp"
#include "ceo/rng.hpp"

namespace ceo::quantizer {

namespace {

using models::Interval;
using testchannels::ComposedKernel;

constexpr std::uint64_t kFinenessTag = 0x51;

const numerics::GaussLegendreRule& rule4() {
  static const numerics::GaussLegendreRule rule = numerics::gauss_legendre(4);
  return rule;
}

struct GaussianTriple {
  double mean, var_x, var_n, var_v;
};

// Gaussian source, Gaussian observation and Gaussian (or identity) channel.
std::optional<GaussianTriple> gaussian_triple(const models::JointModel& model,
                                              const testchannels::TestChannelSpec& channel) {
  const auto* g = std::get_if<models::GaussianSource>(&model.source().family());
  const auto* n = std::get_if<models::AdditiveGaussianNoise>(&model.observation().kind());
  if (g == nullptr || n == nullptr) return std::nullopt;
  if (const auto* v = std::get_if<testchannels::AdditiveGaussianKernel>(&channel.kind())) {
    return GaussianTriple{g->mean, g->var, n->noise_var, v->var};
  }
  if (channel.is_identity()) return GaussianTriple{g->mean, g->var, n->noise_var, 0.0};
  return std::nullopt;
}

double gaussian_entropy(double var) { return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * var); }

Interval observation_range(const models::JointModel& model) {
  const Interval s = model.source().quadrature_support();
  const auto& obs = model.observation();
  if (obs.is_location_family()) {
    const Interval o = obs.quadrature_support(0.0);
    return {s.lo + o.lo, s.hi + o.hi};
  }
  Interval r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (int i = 0; i <= 64; ++i) {
    const double x = s.lo + (s.hi - s.lo) * i / 64.0;
    const Interval o = obs.quadrature_support(x);
    r.lo = std::min(r.lo, o.lo);
    r.hi = std::max(r.hi, o.hi);
  }
  return r;
}

Interval codeword_range(const models::JointModel& model, const testchannels::TestChannelSpec& channel) {
  const Interval y = observation_range(model);
  if (channel.is_identity()) return y;
  if (channel.is_independent()) return {-8.0, 8.0};
  const Interval v = channel.noise_quadrature_support();
  return {y.lo + v.lo, y.hi + v.hi};
}

double observation_marginal_pdf(const models::JointModel& model, double y) {
  const auto& obs = model.observation();
  const Interval s = model.source().quadrature_support();
  std::vector<double> cuts{s.lo, s.hi};
  if (obs.is_location_family()) {
    for (double b : obs.breakpoints(0.0)) cuts.push_back(y - b);
  } else {
    cuts.push_back(y);
  }
  for (double& c : cuts) c = std::clamp(c, s.lo, s.hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (cuts.size() < 2) return 0.0;
  auto integrand = [&](double x) { return model.source().pdf(x) * obs.pdf(y, x); };
  return numerics::integrate_piecewise(integrand, cuts, 1e-11).value;
}

double codeword_marginal_pdf(const models::JointModel& model, const testchannels::TestChannelSpec& channel,
                             double u) {
  const auto& obs = model.observation();
  const Interval s = model.source().quadrature_support();
  std::vector<double> cuts{s.lo, s.hi};
  if (obs.is_location_family()) {
    for (double b : ComposedKernel(model, channel, 0.0).breakpoints()) cuts.push_back(u - b);
  } else {
    cuts.push_back(u);
  }
  for (double& c : cuts) c = std::clamp(c, s.lo, s.hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (cuts.size() < 2) return 0.0;
  auto integrand = [&](double x) { return model.source().pdf(x) * ComposedKernel(model, channel, x).pdf(u); };
  return numerics::integrate_piecewise(integrand, cuts, 1e-10).value;
}

double codeword_marginal_entropy(const models::JointModel& model, const testchannels::TestChannelSpec& channel) {
  if (const auto g = gaussian_triple(model, channel)) return gaussian_entropy(g->var_x + g->var_n + g->var_v);
  const Interval r = codeword_range(model, channel);
  std::vector<double> cuts;
  const int pieces = 32;
  for (int i = 0; i <= pieces; ++i) cuts.push_back(r.lo + (r.hi - r.lo) * i / pieces);
  auto integrand = [&](double u) {
    const double f = codeword_marginal_pdf(model, channel, u);
    return f > 0.0 ? -f * std::log(f) : 0.0;
  };
  return numerics::integrate_piecewise(integrand, cuts, 1e-8, std::size_t{1} << 12).value;
}

double expected_codeword_entropy(const models::JointModel& model, const testchannels::TestChannelSpec& channel) {
  if (model.observation().is_location_family()) {
    return ComposedKernel(model, channel, model.source().mean()).entropy();
  }
  const auto grid = testchannels::source_expectation_grid(model.source(), 64);
  double acc = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    acc += grid.weights[i] * ComposedKernel(model, channel, grid.nodes[i]).entropy(testchannels::Evaluation::numeric);
    mass += grid.weights[i];
  }
  return acc / mass;
}

// Cell index range [first, last] on the anchored grid covering [a, b].
std::pair<long, long> cell_range(const QuantizerSpec& spec, double a, double b) {
  const long first = static_cast<long>(std::floor((a - spec.lo) / spec.step));
  const long last = static_cast<long>(std::ceil((b - spec.lo) / spec.step)) - 1;
  return {first, std::max(first, last)};
}

double boundary(const QuantizerSpec& spec, long k) { return spec.lo + static_cast<double>(k) * spec.step; }

// Mutual information of a banded joint pmf. Row j has masses for column
// indices [col_first[j], col_first[j] + rows[j].size()).
double banded_mutual_information(const std::vector<std::vector<double>>& rows, const std::vector<long>& col_first) {
  long cmin = std::numeric_limits<long>::max();
  long cmax = std::numeric_limits<long>::min();
  double total = 0.0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].empty()) continue;
    cmin = std::min(cmin, col_first[j]);
    cmax = std::max(cmax, col_first[j] + static_cast<long>(rows[j].size()) - 1);
    for (double p : rows[j]) total += p;
  }
  if (!(total > 0.0)) throw NumericalError("discrete joint pmf has no mass");
  std::vector<double> col(static_cast<std::size_t>(cmax - cmin + 1), 0.0);
  std::vector<double> row(rows.size(), 0.0);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t k = 0; k < rows[j].size(); ++k) {
      const double p = rows[j][k] / total;
      row[j] += p;
      col[static_cast<std::size_t>(col_first[j] - cmin) + k] += p;
    }
  }
  numerics::CompensatedSum mi;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t k = 0; k < rows[j].size(); ++k) {
      const double p = rows[j][k] / total;
      if (p <= 0.0) continue;
      const double pc = col[static_cast<std::size_t>(col_first[j] - cmin) + k];
      mi.add(p * std::log(p / (row[j] * pc)));
    }
  }
  return std::max(0.0, mi.value());
}

}  // namespace

std::size_t QuantizerSpec::cells() const {
  if (!enabled()) return 0;
  return static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / step - 1e-9)));
}

QuantizerSpec make_quantizer(double step, double lo, double hi) {
  if (!(step >= 0.0) || !std::isfinite(step)) throw ConfigError("quantizer step must be >= 0");
  if (step > 0.0 && !(lo < hi)) throw ConfigError("quantizer range needs lo < hi");
  return QuantizerSpec{step, lo, hi};
}

double quantize(const QuantizerSpec& spec, double u, std::size_t* clamp_count) {
  if (!spec.enabled()) return u;
  const auto n = static_cast<long>(spec.cells());
  long k = static_cast<long>(std::ceil((u - spec.lo) / spec.step)) - 1;
  if (u < spec.lo || u > spec.hi) {
    if (clamp_count != nullptr) ++*clamp_count;
  }
  k = std::clamp(k, 0L, n - 1);
  return spec.midpoint(static_cast<std::size_t>(k));
}

std::size_t quantize_in_place(const QuantizerSpec& spec, std::span<double> values) {
  std::size_t clamps = 0;
  for (double& v : values) v = quantize(spec, v, &clamps);
  return clamps;
}

double default_step(const models::JointModel& model, const testchannels::TestChannelSpec& channel,
                    estimators::Rule rule, std::size_t L_max) {
  if (L_max == 0) throw PreconditionError("default_step needs L_max >= 1");
  const double x0 = model.source().mean();
  double var = model.observation().is_noiseless() ? 0.0 : model.observation().conditional_variance(x0);
  if (!channel.is_identity()) var += channel.noise_variance();
  if (!(var > 0.0) || !std::isfinite(var)) var = model.source().variance();
  const double sd = std::sqrt(var);
  const double L = static_cast<double>(L_max);
  return rule == estimators::Rule::midrange ? 1e-2 * sd / L : 1e-2 * sd / std::sqrt(L);
}

QuantizerSpec default_quantizer(const models::JointModel& model, const testchannels::TestChannelSpec& channel,
                                estimators::Rule rule, std::size_t L_max) {
  const Interval r = codeword_range(model, channel);
  const double step = default_step(model, channel, rule, L_max);
  // Anchor the grid so that the range is a whole number of cells.
  const double cells = std::ceil((r.hi - r.lo) / step);
  return make_quantizer(step, r.lo, r.lo + cells * step);
}

double mutual_information_xu(const models::JointModel& model, const testchannels::TestChannelSpec& channel) {
  if (const auto g = gaussian_triple(model, channel)) {
    return 0.5 * std::log1p(g->var_x / (g->var_n + g->var_v));
  }
  return codeword_marginal_entropy(model, channel) - expected_codeword_entropy(model, channel);
}

double mutual_information_yu(const models::JointModel& model, const testchannels::TestChannelSpec& channel) {
  if (channel.is_identity()) return std::numeric_limits<double>::infinity();
  if (channel.is_independent()) return 0.0;
  if (const auto g = gaussian_triple(model, channel)) {
    return 0.5 * std::log1p((g->var_x + g->var_n) / g->var_v);
  }
  return codeword_marginal_entropy(model, channel) - channel.noise_entropy();
}

double discrete_mutual_information_xu(const QuantizerSpec& spec, const models::JointModel& model,
                                      const testchannels::TestChannelSpec& channel) {
  if (!spec.enabled()) throw PreconditionError("discrete mutual information needs a quantizer step > 0");
  const Interval xs = model.source().quadrature_support();
  const auto [x_first, x_last] = cell_range(spec, xs.lo, xs.hi);
  const auto& rule = rule4();
  std::vector<std::vector<double>> rows;
  std::vector<long> col_first;
  rows.reserve(static_cast<std::size_t>(x_last - x_first + 1));

  for (long j = x_first; j <= x_last; ++j) {
    const double a = std::max(boundary(spec, j), xs.lo);
    const double b = std::min(boundary(spec, j + 1), xs.hi);
    std::vector<double> row;
    long first = 0;
    if (b > a) {
      const double half = 0.5 * (b - a);
      const double mid = 0.5 * (a + b);
      std::vector<double> nodes(rule.size());
      std::vector<double> weights(rule.size());
      Interval band{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
      for (std::size_t i = 0; i < rule.size(); ++i) {
        nodes[i] = mid + half * rule.nodes[i];
        weights[i] = half * rule.weights[i] * model.source().pdf(nodes[i]);
        const Interval q = ComposedKernel(model, channel, nodes[i]).quadrature_support();
        band.lo = std::min(band.lo, q.lo);
        band.hi = std::max(band.hi, q.hi);
      }
      const auto [u_first, u_last] = cell_range(spec, band.lo, band.hi);
      first = u_first;
      row.assign(static_cast<std::size_t>(u_last - u_first + 1), 0.0);
      for (std::size_t i = 0; i < rule.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        const ComposedKernel k(model, channel, nodes[i]);
        double prev = k.cdf(boundary(spec, u_first));
        for (long c = u_first; c <= u_last; ++c) {
          const double next = k.cdf(boundary(spec, c + 1));
          row[static_cast<std::size_t>(c - u_first)] += weights[i] * std::max(0.0, next - prev);
          prev = next;
        }
      }
    }
    rows.push_back(std::move(row));
    col_first.push_back(first);
  }
  return banded_mutual_information(rows, col_first);
}

double discrete_mutual_information_yu(const QuantizerSpec& spec, const models::JointModel& model,
                                      const testchannels::TestChannelSpec& channel) {
  if (!spec.enabled()) throw PreconditionError("discrete mutual information needs a quantizer step > 0");
  if (!channel.is_additive()) throw PreconditionError("discrete I(qY;qU) needs an additive test channel");
  if (model.observation().is_noiseless()) throw PreconditionError("discrete I(qY;qU) needs a noisy observation");
  const Interval ys = observation_range(model);
  const Interval vs = channel.noise_quadrature_support();
  const auto gt = gaussian_triple(model, channel);
  auto f_y = [&](double y) {
    if (gt) {
      const double var = gt->var_x + gt->var_n;
      const double z = (y - gt->mean) / std::sqrt(var);
      return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi * var);
    }
    return observation_marginal_pdf(model, y);
  };

  const auto [y_first, y_last] = cell_range(spec, ys.lo, ys.hi);
  const auto& rule = rule4();
  std::vector<std::vector<double>> rows;
  std::vector<long> col_first;
  for (long j = y_first; j <= y_last; ++j) {
    const double a = std::max(boundary(spec, j), ys.lo);
    const double b = std::min(boundary(spec, j + 1), ys.hi);
    std::vector<double> row;
    long first = 0;
    if (b > a) {
      const double half = 0.5 * (b - a);
      const double mid = 0.5 * (a + b);
      const auto [u_first, u_last] = cell_range(spec, a + vs.lo, b + vs.hi);
      first = u_first;
      row.assign(static_cast<std::size_t>(u_last - u_first + 1), 0.0);
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const double y = mid + half * rule.nodes[i];
        const double w = half * rule.weights[i] * f_y(y);
        if (w <= 0.0) continue;
        double prev = channel.noise_cdf(boundary(spec, u_first) - y);
        for (long c = u_first; c <= u_last; ++c) {
          const double next = channel.noise_cdf(boundary(spec, c + 1) - y);
          row[static_cast<std::size_t>(c - u_first)] += w * std::max(0.0, next - prev);
          prev = next;
        }
      }
    }
    rows.push_back(std::move(row));
    col_first.push_back(first);
  }
  return banded_mutual_information(rows, col_first);
}

FinenessReport verify_fineness(const QuantizerSpec& spec, const models::JointModel& model,
                               const testchannels::TestChannelSpec& channel, std::size_t L, int r,
                               std::size_t trials, std::uint64_t seed, std::size_t threads) {
  if (trials < 1000) throw PreconditionError("verify_fineness needs at least 1000 trials");
  if (r < 1) throw PreconditionError("verify_fineness needs r >= 1");
  if (L == 0) throw PreconditionError("verify_fineness needs L >= 1");
  const auto jmax = static_cast<std::size_t>(2 * r);

  std::vector<double> d0(trials * jmax);
  std::vector<double> d0_dec(trials * jmax);
  std::vector<std::size_t> clamps(trials, 0);
  numerics::parallel_for(trials, threads, [&](std::size_t t) {
    numerics::RngStream rng(seed, numerics::mix_stream_id({kFinenessTag, L, t}));
    const double x = model.source().sample(rng);
    const auto y = models::sample_observations(model, x, L, rng);
    auto u = testchannels::sample_codeword_surrogates(channel, y, rng);
    const bool odd = L % 2 == 1;
    const double s = odd ? estimators::OrderStats(u).median() : u.front();
    const double qs = quantize(spec, s, &clamps[t]);
    std::vector<double> qu = u;
    for (double& v : qu) v = quantize(spec, v);
    const double qmed = odd ? estimators::OrderStats(qu).median() : qu.front();
    for (std::size_t j = 1; j <= jmax; ++j) {
      d0[t * jmax + j - 1] = std::pow(std::abs(s - qs), static_cast<double>(j));
      d0_dec[t * jmax + j - 1] = std::pow(std::abs(qs - qmed), static_cast<double>(j));
    }
  });

  FinenessReport rep;
  std::vector<double> column(trials);
  for (std::size_t j = 0; j < jmax; ++j) {
    for (std::size_t t = 0; t < trials; ++t) column[t] = d0[t * jmax + j];
    rep.delta0.push_back(numerics::batch_means(column));
    for (std::size_t t = 0; t < trials; ++t) column[t] = d0_dec[t * jmax + j];
    rep.delta0_decoded.push_back(numerics::batch_means(column));
  }
  for (std::size_t c : clamps) rep.clamps += c;

  rep.i_xu = mutual_information_xu(model, channel);
  rep.i_xu_discrete = discrete_mutual_information_xu(spec, model, channel);
  rep.delta2 = std::abs(rep.i_xu - rep.i_xu_discrete);
  if (channel.is_additive()) {
    rep.i_yu = mutual_information_yu(model, channel);
    rep.i_yu_discrete = discrete_mutual_information_yu(spec, model, channel);
    rep.delta1 = std::abs(rep.i_yu - rep.i_yu_discrete);
  } else {
    rep.i_yu = mutual_information_yu(model, channel);
    rep.i_yu_discrete = std::numeric_limits<double>::quiet_NaN();
    rep.delta1 = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

}  // namespace ceo::quantizer
