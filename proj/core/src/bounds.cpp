#include "ceo/bounds.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numbers>

#include "ceo/errors.hpp"
#include "ceo/optimize.hpp"
#include "ceo/stats.hpp"

namespace ceo::bounds {

namespace {

using numerics::GaussLegendreRule;

std::vector<double> merge_breakpoints(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

void require_regular_order(double r) {
  if (!(r >= 2.0)) throw PreconditionError("regular-model constants are stated for r >= 2");
}

struct Nested {
  double value;
  double residual;
};

// Outer h on [0,1], inner x on [lo(h), hi(h)], with the n-point rule and the
// 2n-point rule; returns the 2n value and |Q_2n - Q_n|.
template <class Inner>
Nested nested_gauss_legendre(std::size_t n, const Inner& inner) {
  auto eval = [&](const GaussLegendreRule& rule) {
    numerics::CompensatedSum acc;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double h = 0.5 * (1.0 + rule.nodes[i]);
      acc.add(0.5 * rule.weights[i] * inner(h, rule));
    }
    return acc.value();
  };
  const GaussLegendreRule coarse = numerics::gauss_legendre(n);
  const GaussLegendreRule fine = numerics::gauss_legendre(2 * n);
  const double q1 = eval(coarse);
  const double q2 = eval(fine);
  return {q2, std::abs(q2 - q1)};
}

}  // namespace

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::slb: return "slb";
    case BoundKind::clarke_barron: return "clarke_barron";
    case BoundKind::thm1_ach: return "thm1_ach";
    case BoundKind::thm2_conv: return "thm2_conv";
    case BoundKind::thm3_ach: return "thm3_ach";
    case BoundKind::thm4_conv: return "thm4_conv";
    case BoundKind::czz_finite_L: return "czz_finite_L";
  }
  return "unknown";
}

double shannon_lower_bound(double h_source, double r, double D) {
  if (!(D > 0.0)) throw PreconditionError("shannon_lower_bound needs D > 0");
  if (!(r >= 1.0)) throw PreconditionError("shannon_lower_bound needs r >= 1");
  const double g = 2.0 * std::tgamma(1.0 + 1.0 / r);
  return h_source - (std::log(r * std::numbers::e * D) + r * std::log(g)) / r;
}

double slb_zero_crossing(double h_source, double r) {
  if (!(r >= 1.0)) throw PreconditionError("slb_zero_crossing needs r >= 1");
  const double g = 2.0 * std::tgamma(1.0 + 1.0 / r);
  return std::exp(r * h_source) / (r * std::numbers::e * std::pow(g, r));
}

double clarke_barron_mi(double h_source, double mean_log_fisher, double L) {
  if (!(L >= 2.0)) throw PreconditionError("clarke_barron_mi needs L >= 2");
  return 0.5 * std::log(L / (2.0 * std::numbers::pi * std::numbers::e)) + h_source + 0.5 * mean_log_fisher;
}

double thm2_converse_coefficient(double r) {
  require_regular_order(r);
  const double base = std::sqrt(std::numbers::pi * std::numbers::e) / (std::numbers::sqrt2 * std::tgamma(1.0 + 1.0 / r));
  return std::pow(base, r) / (r * std::numbers::e);
}

double thm1_achievability_coefficient(double r) {
  require_regular_order(r);
  return std::pow(std::numbers::sqrt2 / 2.0, r) * std::tgamma(0.5 * (r + 1.0)) / std::sqrt(std::numbers::pi);
}

ChernoffResult chernoff_information(const numerics::ScalarFunction& f0, const numerics::ScalarFunction& f1,
                                    std::span<const double> breakpoints) {
  if (breakpoints.size() < 2) throw PreconditionError("chernoff_information needs a quadrature support");
  double residual = 0.0;
  bool converged = true;
  auto overlap = [&](double s) {
    auto integrand = [&](double u) {
      const double a = f0(u);
      const double b = f1(u);
      if (s <= 0.0) return a > 0.0 ? b : 0.0;
      if (s >= 1.0) return b > 0.0 ? a : 0.0;
      if (!(a > 0.0) || !(b > 0.0)) return 0.0;
      return std::exp(s * std::log(a) + (1.0 - s) * std::log(b));
    };
    const auto q = numerics::integrate_piecewise(integrand, breakpoints, 1e-12);
    residual = std::max(residual, q.residual_estimate);
    converged = converged && q.converged;
    return q.value;
  };
  // Minimizing log of the overlap maximizes the exponent.
  auto objective = [&](double s) {
    const double v = overlap(s);
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::max();
  };
  const auto best = numerics::minimize_1d(objective, 0.0, 1.0, 1e-10, 64);
  ChernoffResult res;
  res.s_star = best.x;
  res.value = std::max(0.0, -best.value);
  res.quadrature_residual = residual;
  res.converged = converged;
  return res;
}

ChernoffResult codeword_chernoff(const models::JointModel& model, const testchannels::TestChannelSpec& channel,
                                 double x0, double x1) {
  const testchannels::ComposedKernel k0(model, channel, x0);
  const testchannels::ComposedKernel k1(model, channel, x1);
  const auto cuts = merge_breakpoints(k0.breakpoints(), k1.breakpoints());
  return chernoff_information([&](double u) { return k0.pdf(u); }, [&](double u) { return k1.pdf(u); }, cuts);
}

DerivativeEstimate g_of_x(const models::JointModel& model, const testchannels::TestChannelSpec& channel, double x) {
  const double steps[3] = {1e-3, 5e-4, 2.5e-4};
  const models::Interval s = model.source().support();
  const double scale = std::max(1.0, std::abs(x));
  double slopes[3];
  for (int i = 0; i < 3; ++i) {
    const double d = steps[i] * scale;
    const bool backward = std::isfinite(s.hi) && x + d > s.hi;
    const auto c = backward ? codeword_chernoff(model, channel, x - d, x) : codeword_chernoff(model, channel, x, x + d);
    if (!std::isfinite(c.value)) throw NumericalError("g(x): Chernoff information is not finite");
    slopes[i] = c.value / d;
  }
  // Two levels of Richardson extrapolation for a step-halving sequence.
  const double r1a = 2.0 * slopes[1] - slopes[0];
  const double r1b = 2.0 * slopes[2] - slopes[1];
  const double r2 = (4.0 * r1b - r1a) / 3.0;
  if (!std::isfinite(r2)) throw NumericalError("g(x): non-finite finite differences");
  return {r2, std::abs(r2 - r1b)};
}

BoundReport czz_lower_bound_exact(const numerics::ScalarFunction& source_pdf, const PminFunction& p_min, double r,
                                  std::size_t nodes) {
  if (!(r >= 1.0)) throw PreconditionError("czz bound needs r >= 1");
  auto inner = [&](double h, const GaussLegendreRule& rule) {
    const double width = 1.0 - h;
    if (width <= 0.0) return 0.0;
    numerics::CompensatedSum acc;
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const double x = 0.5 * width * (1.0 + rule.nodes[j]);
      const double w = 0.5 * width * rule.weights[j];
      acc.add(w * 0.5 * (source_pdf(x) + source_pdf(x + h)) * p_min(x, x + h));
    }
    return r * std::pow(2.0, -r) * std::pow(h, r - 1.0) * acc.value();
  };
  const Nested n = nested_gauss_legendre(nodes, inner);
  BoundReport rep;
  rep.kind = BoundKind::czz_finite_L;
  rep.value = n.value;
  rep.quadrature_residual = n.residual;
  rep.inputs = {{"r", r}, {"nodes", static_cast<double>(nodes)}};
  return rep;
}

BoundReport czz_lower_bound_shift_invariant(const numerics::ScalarFunction& source_pdf,
                                            const std::function<double(double)>& p_min_of_h, double r,
                                            std::size_t nodes) {
  if (!(r >= 1.0)) throw PreconditionError("czz bound needs r >= 1");
  auto inner = [&](double h, const GaussLegendreRule& rule) {
    const double width = 1.0 - h;
    if (width <= 0.0) return 0.0;
    const double p = p_min_of_h(h);
    if (p == 0.0) return 0.0;
    numerics::CompensatedSum acc;
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const double x = 0.5 * width * (1.0 + rule.nodes[j]);
      acc.add(0.5 * width * rule.weights[j] * 0.5 * (source_pdf(x) + source_pdf(x + h)));
    }
    return r * std::pow(2.0, -r) * std::pow(h, r - 1.0) * acc.value() * p;
  };
  const Nested n = nested_gauss_legendre(nodes, inner);
  BoundReport rep;
  rep.kind = BoundKind::czz_finite_L;
  rep.value = n.value;
  rep.quadrature_residual = n.residual;
  rep.inputs = {{"r", r}, {"nodes", static_cast<double>(nodes)}};
  return rep;
}

double p_min_additive_uniform(std::size_t L, double width, double x0, double x1) {
  if (L < 1) throw PreconditionError("p_min_additive_uniform needs L >= 1");
  if (!(width > 0.0)) throw PreconditionError("p_min_additive_uniform needs width > 0");
  if (x1 < x0) std::swap(x0, x1);
  // One sample: both likelihoods are flat at 1/width on the overlap.
  if (L == 1) return 0.5 * std::max(0.0, x0 + width - x1) / width;
  // Both likelihoods are L(L-1)(M-m)^(L-2) / width^L on their triangles
  // x_i <= m <= M <= x_i + width; min(p0, p1) lives on the intersection.
  const double lo = x1;
  const double hi = x0 + width;
  if (!(hi > lo)) return 0.0;
  const double Ld = static_cast<double>(L);
  // The integrand is a polynomial of degree L-2 in each variable, so this
  // many nodes integrate it exactly.
  const std::size_t n = std::max<std::size_t>(8, L / 2 + 2);
  const GaussLegendreRule rule = numerics::gauss_legendre(n);
  const double log_norm = std::log(Ld) + std::log(Ld - 1.0) - Ld * std::log(width);
  numerics::CompensatedSum acc;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = lo + 0.5 * (hi - lo) * (1.0 + rule.nodes[i]);
    const double wm = 0.5 * (hi - lo) * rule.weights[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double M = m + 0.5 * (hi - m) * (1.0 + rule.nodes[j]);
      const double wM = 0.5 * (hi - m) * rule.weights[j];
      const double gap = M - m;
      if (gap <= 0.0) continue;
      acc.add(wm * wM * std::exp(log_norm + (Ld - 2.0) * std::log(gap)));
    }
  }
  return 0.5 * acc.value();
}

BoundReport thm4_converse_value(const numerics::ScalarFunction& source_pdf, models::Interval source_support,
                                const numerics::ScalarFunction& g, double r, double mi) {
  if (!(r >= 1.0)) throw PreconditionError("thm4 converse needs r >= 1");
  if (!source_support.bounded()) throw PreconditionError("thm4 converse needs a bounded source support");
  const std::size_t n = 64;
  const double a = source_support.lo;
  const double b = source_support.hi;
  auto eval = [&](const GaussLegendreRule& rule) {
    std::vector<double> fx(rule.size());
    std::vector<double> gx(rule.size());
    std::vector<double> wx(rule.size());
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[j];
      wx[j] = 0.5 * (b - a) * rule.weights[j];
      fx[j] = source_pdf(x);
      gx[j] = g(x);
    }
    numerics::CompensatedSum outer;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double h = 0.5 * (1.0 + rule.nodes[i]);
      numerics::CompensatedSum inner;
      for (std::size_t j = 0; j < rule.size(); ++j) inner.add(wx[j] * fx[j] * std::exp(-h * gx[j]));
      outer.add(0.5 * rule.weights[i] * std::pow(h, r - 1.0) * inner.value());
    }
    return r * std::pow(2.0, -r) * std::pow(mi, r) * outer.value();
  };
  const double q1 = eval(numerics::gauss_legendre(n));
  const double q2 = eval(numerics::gauss_legendre(2 * n));
  BoundReport rep;
  rep.kind = BoundKind::thm4_conv;
  rep.value = q2;
  rep.quadrature_residual = std::abs(q2 - q1);
  rep.inputs = {{"r", r}, {"mi_nats", mi}};
  return rep;
}

BoundReport thm4_converse_value(const models::JointModel& model, const testchannels::TestChannelSpec& channel,
                                double r, std::optional<double> mi_override) {
  const double mi = mi_override ? *mi_override : testchannels::conditional_mutual_information(model, channel).nats;
  const models::Interval support = model.source().support();
  BoundReport rep;
  if (model.observation().is_location_family()) {
    const auto g0 = g_of_x(model, channel, model.source().mean());
    rep = thm4_converse_value([&](double x) { return model.source().pdf(x); }, support,
                              [&](double) { return g0.value; }, r, mi);
    rep.inputs.emplace_back("g", g0.value);
    rep.quadrature_residual += g0.error_estimate;
  } else {
    rep = thm4_converse_value([&](double x) { return model.source().pdf(x); }, support,
                              [&](double x) { return g_of_x(model, channel, x).value; }, r, mi);
  }
  rep.note = "bound under configured channel class";
  return rep;
}

double thm3_achievability_value(double K_U, double delta_U, double r, double mi) {
  if (!(delta_U > 0.0)) throw PreconditionError("thm3 achievability needs delta_U > 0 (endpoint density vanishes)");
  if (!(r >= 1.0)) throw PreconditionError("thm3 achievability needs r >= 1");
  return 2.0 * std::tgamma(r + 1.0) * std::pow(K_U * mi / delta_U, r);
}

BoundReport thm3_achievability_value(const testchannels::NonRegularCertificate& cert, double r, double mi) {
  BoundReport rep;
  rep.kind = BoundKind::thm3_ach;
  rep.value = thm3_achievability_value(cert.K_U, cert.delta_U, r, mi);
  rep.inputs = {{"K_U", cert.K_U}, {"delta_U", cert.delta_U}, {"r", r}, {"mi_nats", mi}};
  rep.note = "bound under configured channel class";
  return rep;
}

Thm2Value thm2_converse_value(const models::JointModel& model, const testchannels::TestChannelSpec& channel,
                              double r) {
  const double c1 = thm2_converse_coefficient(r);
  Thm2Value v;
  v.mi = testchannels::conditional_mutual_information(model, channel).nats;
  if (model.observation().is_location_family()) {
    const double fi = testchannels::codeword_fisher_information(model, channel, model.source().mean());
    v.mean_fisher = fi;
    v.mean_log_fisher = std::log(fi);
  } else {
    const auto grid = testchannels::source_expectation_grid(model.source(), 64);
    double mass = 0.0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
      const double fi = testchannels::codeword_fisher_information(model, channel, grid.nodes[i]);
      v.mean_fisher += grid.weights[i] * fi;
      v.mean_log_fisher += grid.weights[i] * std::log(fi);
      mass += grid.weights[i];
    }
    v.mean_fisher /= mass;
    v.mean_log_fisher /= mass;
  }
  v.exp_log = c1 * std::pow(v.mi / std::exp(v.mean_log_fisher), 0.5 * r);
  v.jensen = c1 * std::pow(v.mi / v.mean_fisher, 0.5 * r);
  return v;
}

double thm1_achievability_value(const testchannels::RegularCertificate& cert, double r, double mi) {
  if (!(cert.alpha_U > 0.0)) throw PreconditionError("thm1 achievability needs alpha_U > 0");
  return thm1_achievability_coefficient(r) * std::pow(cert.K_U * cert.K_U * mi / (cert.alpha_U * cert.alpha_U), 0.5 * r);
}

Extrapolation extrapolate_to_zero_rate(std::span<const double> mi, std::span<const double> values) {
  if (mi.size() != values.size() || mi.size() < 4) {
    throw PreconditionError("zero-rate extrapolation needs at least 4 sweep points");
  }
  const auto fit = numerics::fit_polynomial(mi, values, 2);
  Extrapolation e;
  e.intercept = fit.coefficients[0];
  e.stderr_ = fit.stderrs[0];
  const double dof = static_cast<double>(mi.size()) - 3.0;
  const boost::math::students_t dist(dof);
  e.ci_half_width = boost::math::quantile(dist, 0.975) * e.stderr_;
  return e;
}

}  // namespace ceo::bounds
