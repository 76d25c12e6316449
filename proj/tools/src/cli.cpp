#include "ceo_tools/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "CLI11.hpp"
#include "ceo/config.hpp"
#include "ceo/errors.hpp"
#include "ceo/parallel.hpp"
#include "ceo/verify.hpp"
#include "json.hpp"
#include "output.hpp"

namespace ceo::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::optional<std::size_t> threads;
  bool bits = false;
  bool quick = false;
};

struct Context {
  const Options& opts;
  std::ostream& out;
  std::ostream& err;
};

config::LoadedConfig load_config(const Options& opts) {
  if (opts.config_path.empty()) throw ConfigError("--config PATH is required");
  auto cfg = config::load(opts.config_path);
  if (opts.seed) cfg.experiment.seed = *opts.seed;
  if (opts.threads) {
    cfg.experiment.threads = *opts.threads;
  } else if (const std::size_t env = numerics::threads_from_environment(); env > 0) {
    cfg.experiment.threads = env;
  }
  return cfg;
}

double display_rate(const Options& opts, double nats) { return opts.bits ? nats / std::log(2.0) : nats; }
const char* rate_unit(const Options& opts) { return opts.bits ? "bits" : "nats"; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

RunManifest start_manifest(const char* command, const Options& opts, const config::LoadedConfig& cfg) {
  RunManifest m;
  m.command = command;
  m.config_path = opts.config_path;
  m.config_hash = cfg.hash;
  m.tool_version = kToolVersion;
  m.seed = cfg.experiment.seed;
  m.started_utc = utc_now();
  return m;
}

void emit(RunManifest& m, const fs::path& path, const std::string& contents) {
  write_file(path, contents);
  m.outputs.push_back(path.filename().string());
}

void finish(RunManifest& m, const Options& opts) {
  m.finished_utc = utc_now();
  const fs::path path = fs::path(opts.out_dir) / "manifest.json";
  m.outputs.push_back(path.filename().string());
  write_file(path, manifest_json(m));
}

json report_json(const bounds::BoundReport& rep) {
  json j;
  j["kind"] = bounds::to_string(rep.kind);
  j["value"] = rep.value;
  j["quadrature_residual"] = rep.quadrature_residual;
  json inputs = json::object();
  for (const auto& [k, v] : rep.inputs) inputs[k] = v;
  j["inputs"] = inputs;
  j["note"] = rep.note;
  return j;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int cmd_simulate(const Context& ctx) {
  auto cfg = load_config(ctx.opts);
  const auto& x = cfg.experiment;
  x.validate();
  auto manifest = start_manifest("simulate", ctx.opts, cfg);

  std::vector<CsvRow> rows;
  ctx.out << "L  R_sum[" << rate_unit(ctx.opts) << "]  D_hat  ci_lo  ci_hi\n";
  for (std::size_t L : x.L_grid) {
    const auto p = harness::run_distortion_point(x, L);
    rows.push_back(CsvRow{L, p.rate.r_sum(), x.r, estimators::to_string(x.rule), p.distortion, x.seed});
    ctx.out << L << "  " << fmt("%.6g", display_rate(ctx.opts, p.rate.r_sum())) << "  "
            << fmt("%.6g", p.distortion.mean) << "  " << fmt("%.6g", p.distortion.lo()) << "  "
            << fmt("%.6g", p.distortion.hi()) << '\n';
    if (p.clamps > 0) ctx.err << "warning: " << p.clamps << " codewords clamped at L=" << L << '\n';
  }
  emit(manifest, fs::path(ctx.opts.out_dir) / "distortion.csv", distortion_csv(rows));
  finish(manifest, ctx.opts);
  return kOk;
}

int cmd_bounds(const Context& ctx) {
  auto cfg = load_config(ctx.opts);
  const auto& x = cfg.experiment;
  auto manifest = start_manifest("bounds", ctx.opts, cfg);

  json j;
  j["schema_version"] = kJsonSchemaVersion;
  j["config"] = x.name;
  j["r"] = x.r;
  std::vector<bounds::BoundReport> reports;

  if (!cfg.has_channel) {
    // Without a test channel only the source-side bound is defined.
    bounds::BoundReport slb;
    slb.kind = bounds::BoundKind::slb;
    const double h = x.model.source().differential_entropy();
    slb.value = bounds::slb_zero_crossing(h, x.r);
    slb.inputs = {{"h_source", h}, {"r", x.r}};
    slb.note = "distortion where the Shannon lower bound reaches zero rate";
    reports.push_back(slb);
    j["mode"] = "slb_only";
  } else {
    x.validate();
    const auto cmp = harness::run_bound_comparison(x, false);
    j["mode"] = "full";
    j["regular"] = cmp.regular;
    j["C1"] = optional_json(cmp.C1);
    j["C2"] = optional_json(cmp.C2);
    json rows = json::array();
    for (const auto& row : cmp.rows) {
      json r;
      r["channel"] = row.channel;
      r["channel_param"] = row.channel_param;
      r["mi_nats"] = row.mi;
      r["converse"] = optional_json(row.converse);
      r["converse_exp_log"] = optional_json(row.converse_exp_log);
      r["achievability"] = optional_json(row.achievability);
      r["note"] = row.note;
      rows.push_back(r);
    }
    j["rows"] = rows;
    auto extrap = [](const std::optional<bounds::Extrapolation>& e) {
      if (!e) return json(nullptr);
      json o;
      o["intercept"] = e->intercept;
      o["stderr"] = e->stderr_;
      o["ci_half_width"] = e->ci_half_width;
      return o;
    };
    j["converse_limit"] = extrap(cmp.converse_limit);
    j["achievability_limit"] = extrap(cmp.achievability_limit);
    reports = cmp.reports;

    if (x.model.source().support().lo == 0.0 && x.model.source().support().hi == 1.0 &&
        x.model.observation().name() == "additive_uniform" && x.channel.is_identity()) {
      for (std::size_t L : x.L_grid) {
        if (L <= 1001) reports.push_back(harness::czz_finite_L(x, L, x.r));
      }
    }
  }

  json reps = json::array();
  double worst = 0.0;
  for (const auto& rep : reports) {
    reps.push_back(report_json(rep));
    worst = std::max(worst, rep.quadrature_residual);
    ctx.out << bounds::to_string(rep.kind) << "  " << fmt("%.10g", rep.value) << "  residual "
            << fmt("%.3g", rep.quadrature_residual) << '\n';
  }
  j["reports"] = reps;
  j["residual_tolerance"] = cfg.residual_tolerance;
  j["max_quadrature_residual"] = worst;
  emit(manifest, fs::path(ctx.opts.out_dir) / "bounds.json", j.dump(2) + "\n");
  finish(manifest, ctx.opts);

  if (worst > cfg.residual_tolerance) {
    ctx.err << "quadrature residual " << worst << " exceeds tolerance " << cfg.residual_tolerance
            << "; partial output written\n";
    return kThresholdViolation;
  }
  return kOk;
}

bool check_band(std::ostream& out, const char* what, double value, const std::optional<double>& lo,
                const std::optional<double>& hi) {
  if (!lo && !hi) return true;
  const bool ok = (!lo || value >= *lo) && (!hi || value <= *hi);
  out << (ok ? "[PASS] " : "[FAIL] ") << what << " = " << fmt("%.6g", value) << " in ["
      << (lo ? fmt("%.6g", *lo) : std::string("-inf")) << ", " << (hi ? fmt("%.6g", *hi) : std::string("inf"))
      << "]\n";
  return ok;
}

int cmd_scaling(const Context& ctx) {
  auto cfg = load_config(ctx.opts);
  const auto& x = cfg.experiment;
  x.validate();
  auto manifest = start_manifest("scaling", ctx.opts, cfg);
  const auto res = harness::run_scaling_study(x);

  std::vector<CsvRow> rows;
  for (const auto& row : res.rows) {
    rows.push_back(CsvRow{row.L, row.r_sum, x.r, estimators::to_string(x.rule), row.distortion, x.seed});
  }
  json j;
  j["schema_version"] = kJsonSchemaVersion;
  j["regular"] = res.regular;
  j["per_agent_rate_nats"] = res.per_agent_rate;
  j["slope"] = res.fit.slope;
  j["slope_stderr"] = res.fit.slope_stderr;
  j["beta_hat"] = res.beta_hat;
  j["beta_half_width"] = res.beta_half_width;
  j["beta_normalization"] = res.regular ? "R_sum^(r/2) D" : "R_sum^r D";
  emit(manifest, fs::path(ctx.opts.out_dir) / "scaling.csv", distortion_csv(rows));
  emit(manifest, fs::path(ctx.opts.out_dir) / "scaling.json", j.dump(2) + "\n");
  finish(manifest, ctx.opts);

  ctx.out << "per-agent rate " << fmt("%.6g", display_rate(ctx.opts, res.per_agent_rate)) << ' '
          << rate_unit(ctx.opts) << '\n';
  ctx.out << "slope " << fmt("%.4f", res.fit.slope) << " +- " << fmt("%.4f", 1.96 * res.fit.slope_stderr) << '\n';
  ctx.out << "beta_hat " << fmt("%.5g", res.beta_hat) << " +- " << fmt("%.3g", res.beta_half_width) << '\n';
  bool ok = check_band(ctx.out, "slope", res.fit.slope, cfg.thresholds.slope_min, cfg.thresholds.slope_max);
  ok = check_band(ctx.out, "beta_hat", res.beta_hat, cfg.thresholds.beta_min, cfg.thresholds.beta_max) && ok;
  return ok ? kOk : kThresholdViolation;
}

int cmd_equivalence(const Context& ctx) {
  auto cfg = load_config(ctx.opts);
  const auto& x = cfg.experiment;
  x.validate();
  auto manifest = start_manifest("equivalence", ctx.opts, cfg);
  const auto rows = harness::run_equivalence_study(x);
  emit(manifest, fs::path(ctx.opts.out_dir) / "equivalence.csv", equivalence_csv(rows, x.seed));
  finish(manifest, ctx.opts);

  const double gap_max = cfg.thresholds.gap_max.value_or(1e-9);
  bool ok = true;
  ctx.out << "L  D_Q  D_Log  gap  epi\n";
  for (const auto& row : rows) {
    ctx.out << row.L << "  " << fmt("%.8g", row.d_q) << "  " << fmt("%.8g", row.d_log) << "  "
            << fmt("%.3g", row.gap) << "  " << (row.epi_holds ? "ok" : "VIOLATED") << '\n';
    ok = ok && std::abs(row.gap) < gap_max && row.epi_holds;
  }
  ctx.out << (ok ? "[PASS] " : "[FAIL] ") << "|gap| < " << fmt("%.3g", gap_max) << " and EPI direction on every row\n";
  return ok ? kOk : kThresholdViolation;
}

int cmd_verify(const Context& ctx) {
  verify::SuiteOptions o;
  if (ctx.opts.seed) o.seed = *ctx.opts.seed;
  o.threads = ctx.opts.threads.value_or(std::max<std::size_t>(1, numerics::threads_from_environment()));
  o.reduction = ctx.opts.quick ? 5 : 1;
  bool ok = true;
  for (const auto& c : verify::run_lemma_suite(o)) {
    ok = ok && c.passed;
    ctx.out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << fmt("%.10g", c.value);
    if (c.tolerance > 0.0) {
      ctx.out << " (target " << fmt("%.10g", c.target) << " +- " << fmt("%.3g", c.tolerance) << ")";
    } else {
      ctx.out << " (limit " << fmt("%.10g", c.target) << ")";
    }
    if (!c.detail.empty()) ctx.out << " [" << c.detail << "]";
    ctx.out << '\n';
  }
  return ok ? kOk : kThresholdViolation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opts;
  CLI::App app{"Distributed estimation (CEO problem) simulator and bound calculator", "ceo"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", opts.config_path, "Experiment file (INI)");
  app.add_option("--seed", opts.seed, "Override the configured seed");
  app.add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", opts.threads, "Worker threads (CEO_THREADS is the fallback)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--bits", opts.bits, "Show rates in bits on the terminal; files stay in nats");

  auto* simulate = app.add_subcommand("simulate", "Distortion vs L table");
  auto* bounds_cmd = app.add_subcommand("bounds", "Converse/achievability values as JSON");
  auto* scaling = app.add_subcommand("scaling", "Slope and scale-constant study");
  auto* equivalence = app.add_subcommand("equivalence", "Quadratic vs logarithmic distortion study");
  auto* verify_cmd = app.add_subcommand("verify", "Built-in lemma checks");
  verify_cmd->add_flag("--quick", opts.quick, "Smaller Monte-Carlo sizes");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  }

  const Context ctx{opts, out, err};
  try {
    if (simulate->parsed()) return cmd_simulate(ctx);
    if (bounds_cmd->parsed()) return cmd_bounds(ctx);
    if (scaling->parsed()) return cmd_scaling(ctx);
    if (equivalence->parsed()) return cmd_equivalence(ctx);
    if (verify_cmd->parsed()) return cmd_verify(ctx);
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << '\n';
    return kPrecondition;
  } catch (const CertificateUnavailable& e) {
    err << "precondition violated: " << e.what() << '\n';
    return kPrecondition;
  } catch (const UndefinedQuantityError& e) {
    err << "precondition violated: " << e.what() << '\n';
    return kPrecondition;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace ceo::cli
