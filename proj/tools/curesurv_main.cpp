// curesurv command-line interface: file-to-file survival and cure-model runs.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli_support.hpp"
#include "curesurv/cure_nonparametric.hpp"
#include "curesurv/data_model.hpp"
#include "curesurv/error.hpp"
#include "curesurv/format.hpp"
#include "curesurv/hypothesis_tests.hpp"
#include "curesurv/mixture_parametric.hpp"
#include "curesurv/simulation.hpp"
#include "curesurv/survival.hpp"

using namespace curesurv;
using curesurv::cli::Json;
using curesurv::cli::UsageError;

namespace {

// ---------------------------------------------------------------------------
// Shared option groups

struct InputOptions {
  std::string input;
  std::string patients;
  std::string window_start;
  std::string window_end;
  CsvSchema schema;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--input", in.input, "Sample CSV with columns time,delta[,covariates]");
  cmd->add_option("--patients", in.patients, "Patient CSV (id, age, sex, diagnosis and admission dates)");
  cmd->add_option("--window-start", in.window_start, "Study window start (YYYY-MM-DD), with --patients");
  cmd->add_option("--window-end", in.window_end, "Study window end (YYYY-MM-DD), with --patients");
  cmd->add_option("--id-column", in.schema.id, "Patient id column")->capture_default_str();
  cmd->add_option("--age-column", in.schema.age, "Age column")->capture_default_str();
  cmd->add_option("--sex-column", in.schema.sex, "Sex column")->capture_default_str();
  cmd->add_option("--diagnosis-column", in.schema.diagnosis_date, "Diagnosis date column")->capture_default_str();
  cmd->add_option("--admission-column", in.schema.admission_date, "Admission date column")->capture_default_str();
}

SurvivalSample load_input(const InputOptions& in) {
  if (in.input.empty() == in.patients.empty()) throw UsageError("exactly one of --input or --patients is required");
  if (!in.input.empty()) {
    if (!in.window_start.empty() || !in.window_end.empty()) {
      throw UsageError("--window-start/--window-end only apply to --patients");
    }
    return load_sample_csv(in.input);
  }
  if (in.window_start.empty() || in.window_end.empty()) {
    throw UsageError("--patients requires --window-start and --window-end");
  }
  const StudyWindow window{parse_date(in.window_start), parse_date(in.window_end)};
  return derive_survival_times(load_csv(in.patients, in.schema), window);
}

struct SmoothingOptions {
  std::string covariate;
  std::string kernel = "epanechnikov";
  std::string stratum;
};

void add_smoothing_options(CLI::App* cmd, SmoothingOptions& s, bool covariate_required) {
  auto* opt = cmd->add_option("--covariate", s.covariate, "Covariate to condition on");
  if (covariate_required) opt->required();
  cmd->add_option("--kernel", s.kernel, "Kernel: epanechnikov or gaussian")->capture_default_str();
  cmd->add_option("--stratum", s.stratum, "Restrict smoothing to a binary covariate level, e.g. sex=1");
}

std::pair<std::string, double> parse_assignment(const std::string& text, const std::string& flag) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw UsageError(fmt::format("{} expects name=value, got '{}'", flag, text));
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text.substr(eq + 1), &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() - eq - 1) throw UsageError(fmt::format("{} has a non-numeric value in '{}'", flag, text));
  return {text.substr(0, eq), value};
}

std::optional<Stratum> parse_stratum(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto [name, value] = parse_assignment(text, "--stratum");
  return Stratum{name, value};
}

Kernel kernel_from(const std::string& name) {
  try {
    return parse_kernel(name);
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
}

Bandwidth bandwidth_from(double h) {
  try {
    return Bandwidth(h);
  } catch (const DataError& e) {
    throw UsageError(fmt::format("--bandwidth: {}", e.what()));
  }
}

void log_seed(const std::string& command, std::uint64_t seed) {
  fmt::print(stderr, "curesurv {}: seed {}\n", command, seed);
}

std::string curve_text(const StepCurve& curve) {
  std::ostringstream out;
  write_curve(out, curve);
  return out.str();
}

Json report_header(const std::string& command, const CLI::App& cmd) {
  Json report;
  report["command"] = command;
  report["config"] = cli::resolved_config(cmd);
  return report;
}

Json test_report_json(const TestReport& r) {
  Json j;
  j["method"] = std::string(method_name(r.method));
  j["calibration"] = std::string(calibration_name(r.calibration));
  j["statistic"] = cli::number(r.statistic);
  j["p_value"] = cli::number(r.p_value);
  j["n_permutations"] = r.n_permutations ? Json(*r.n_permutations) : Json(nullptr);
  j["seed"] = r.seed ? Json(*r.seed) : Json(nullptr);
  j["warning"] = r.warning ? Json(*r.warning) : Json(nullptr);
  Json details = Json::object();
  for (const auto& [key, value] : r.details) details[key] = cli::number(value);
  j["details"] = details;
  return j;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::optional<double> parse_optional_x(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_assignment("x=" + text, "--x").second;
}

std::map<std::string, double> parse_coefs(const std::vector<std::string>& items, const std::string& flag) {
  std::map<std::string, double> coefs;
  for (const auto& item : items) {
    const auto [name, value] = parse_assignment(item, flag);
    coefs[name] = value;
  }
  return coefs;
}

// ---------------------------------------------------------------------------
// Subcommands. Each registers its flags and returns the work to run after parsing.

using Runner = std::function<void(cli::OutputSet&)>;

Runner add_km(CLI::App& app) {
  auto* cmd = app.add_subcommand("km", "Kaplan-Meier survival curve (t,s)");
  auto in = std::make_shared<InputOptions>();
  auto output = std::make_shared<std::string>();
  add_input_options(cmd, *in);
  cmd->add_option("--output", *output, "Curve CSV")->required();
  return [=](cli::OutputSet& out) { out.add(*output, curve_text(km_fit(load_input(*in)))); };
}

Runner add_beran(CLI::App& app) {
  auto* cmd = app.add_subcommand("beran", "Beran conditional survival curve (t,s)");
  auto in = std::make_shared<InputOptions>();
  auto smooth = std::make_shared<SmoothingOptions>();
  auto output = std::make_shared<std::string>();
  auto x = std::make_shared<std::string>();
  auto h = std::make_shared<double>(0.0);
  auto weights = std::make_shared<std::string>();
  add_input_options(cmd, *in);
  add_smoothing_options(cmd, *smooth, false);
  cmd->add_option("--x", *x, "Covariate value to condition on");
  cmd->add_option("--bandwidth", *h, "Kernel bandwidth");
  cmd->add_option("--weights-column", *weights, "Use a column of non-negative weights instead of a kernel");
  cmd->add_option("--output", *output, "Curve CSV")->required();
  return [=](cli::OutputSet& out) {
    const auto sample = load_input(*in);
    if (!weights->empty()) {
      if (!smooth->covariate.empty() || !x->empty()) {
        throw UsageError("--weights-column cannot be combined with --covariate/--x");
      }
      std::vector<double> w = sample.covariate(*weights).values;
      double total = 0.0;
      for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DataError("weights must be finite and non-negative");
        total += v;
      }
      if (!(total > 0.0)) throw DataError("weights sum to zero");
      for (double& v : w) v /= total;
      out.add(*output, curve_text(beran_fit(sample, w)));
      return;
    }
    if (smooth->covariate.empty() || x->empty()) {
      throw UsageError("beran needs --covariate and --x (or --weights-column)");
    }
    const bool binary = sample.covariate(smooth->covariate).kind == CovariateKind::binary;
    if (!binary && *h <= 0.0) throw UsageError("--bandwidth is required for a continuous covariate");
    const Bandwidth bw = binary && *h <= 0.0 ? Bandwidth(1.0) : bandwidth_from(*h);
    out.add(*output, curve_text(beran_fit(sample, smooth->covariate, *parse_optional_x(*x), kernel_from(smooth->kernel),
                                          bw, parse_stratum(smooth->stratum))));
  };
}

Runner add_cure_rate(CLI::App& app) {
  auto* cmd = app.add_subcommand("cure-rate", "Cure probability table (x,cure_prob,h)");
  auto in = std::make_shared<InputOptions>();
  auto smooth = std::make_shared<SmoothingOptions>();
  auto output = std::make_shared<std::string>();
  auto xs = std::make_shared<std::vector<double>>();
  auto h = std::make_shared<double>(0.0);
  auto bootstrap = std::make_shared<bool>(false);
  auto resamples = std::make_shared<std::size_t>(100);
  auto seed = std::make_shared<std::uint64_t>(0);
  add_input_options(cmd, *in);
  add_smoothing_options(cmd, *smooth, false);
  cmd->add_option("--x", *xs, "Covariate values (default: deciles of the covariate)")->delimiter(',');
  cmd->add_option("--bandwidth", *h, "Fixed kernel bandwidth");
  cmd->add_flag("--bootstrap", *bootstrap, "Select the bandwidth per x by bootstrap");
  cmd->add_option("--resamples", *resamples, "Bootstrap resamples")->capture_default_str();
  auto* seed_opt = cmd->add_option("--seed", *seed, "Seed for the bootstrap");
  cmd->add_option("--output", *output, "Table CSV")->required();
  return [=](cli::OutputSet& out) {
    const auto sample = load_input(*in);
    std::string table = "x,cure_prob,h\n";
    if (smooth->covariate.empty()) {
      if (*bootstrap || *h > 0.0 || !xs->empty()) throw UsageError("conditional options need --covariate");
      table += "NA," + format_number(cure_rate_unconditional(sample).cure_prob) + ",NA\n";
      out.add(*output, table);
      return;
    }
    const auto& values = sample.covariate(smooth->covariate).values;
    const bool binary = sample.covariate(smooth->covariate).kind == CovariateKind::binary;
    std::vector<double> points = *xs;
    if (points.empty()) points = binary ? std::vector<double>{0.0, 1.0} : default_eval_points(values);
    const Kernel kernel = kernel_from(smooth->kernel);
    const auto stratum = parse_stratum(smooth->stratum);
    std::vector<Bandwidth> chosen;
    if (*bootstrap) {
      if (*h > 0.0) throw UsageError("--bootstrap and --bandwidth are mutually exclusive");
      if (seed_opt->count() == 0) throw UsageError("--bootstrap requires --seed");
      if (binary) throw UsageError("--bootstrap needs a continuous covariate");
      log_seed("cure-rate", *seed);
      BootstrapOptions opt;
      opt.resamples = *resamples;
      opt.seed = *seed;
      opt.kernel = kernel;
      opt.stratum = stratum;
      const auto sel = bootstrap_bandwidth(sample, smooth->covariate, points, default_bandwidth_grid(values), opt);
      for (const auto& p : sel.points) chosen.push_back(p.selected);
    } else if (binary) {
      chosen.assign(points.size(), *h > 0.0 ? bandwidth_from(*h) : Bandwidth(1.0));
    } else {
      if (*h <= 0.0) throw UsageError("cure-rate needs --bandwidth or --bootstrap for a continuous covariate");
      chosen.assign(points.size(), bandwidth_from(*h));
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto est = cure_rate_conditional(sample, smooth->covariate, points[i], kernel, chosen[i], stratum);
      table += format_number(points[i]) + "," + format_number(est.cure_prob) + "," +
               (binary ? std::string("NA") : format_number(chosen[i].value())) + "\n";
    }
    out.add(*output, table);
  };
}

Runner add_latency(CLI::App& app) {
  auto* cmd = app.add_subcommand("latency", "Survival curve of the susceptible group (t,s)");
  auto in = std::make_shared<InputOptions>();
  auto smooth = std::make_shared<SmoothingOptions>();
  auto output = std::make_shared<std::string>();
  auto x = std::make_shared<double>(0.0);
  auto h = std::make_shared<double>(0.0);
  add_input_options(cmd, *in);
  add_smoothing_options(cmd, *smooth, true);
  cmd->add_option("--x", *x, "Covariate value")->required();
  cmd->add_option("--bandwidth", *h, "Kernel bandwidth");
  cmd->add_option("--output", *output, "Curve CSV")->required();
  return [=](cli::OutputSet& out) {
    const auto sample = load_input(*in);
    const bool binary = sample.covariate(smooth->covariate).kind == CovariateKind::binary;
    if (!binary && *h <= 0.0) throw UsageError("--bandwidth is required for a continuous covariate");
    const Bandwidth bw = binary && *h <= 0.0 ? Bandwidth(1.0) : bandwidth_from(*h);
    const auto latency =
        latency_estimate(sample, smooth->covariate, *x, kernel_from(smooth->kernel), bw, parse_stratum(smooth->stratum));
    out.add(*output, curve_text(latency.base));
  };
}

Runner add_bandwidth(CLI::App& app) {
  auto* cmd = app.add_subcommand("bandwidth", "Bootstrap bandwidth selection for the cure rate (x,h,criterion)");
  auto in = std::make_shared<InputOptions>();
  auto smooth = std::make_shared<SmoothingOptions>();
  auto output = std::make_shared<std::string>();
  auto criteria = std::make_shared<std::string>();
  auto xs = std::make_shared<std::vector<double>>();
  auto grid_size = std::make_shared<std::size_t>(15);
  auto resamples = std::make_shared<std::size_t>(100);
  auto pilot = std::make_shared<double>(0.0);
  auto seed = std::make_shared<std::uint64_t>(0);
  add_input_options(cmd, *in);
  add_smoothing_options(cmd, *smooth, true);
  cmd->add_option("--x", *xs, "Covariate values (default: deciles)")->delimiter(',');
  cmd->add_option("--grid-size", *grid_size, "Number of log-spaced grid bandwidths")->capture_default_str();
  cmd->add_option("--resamples", *resamples, "Bootstrap resamples")->capture_default_str();
  cmd->add_option("--pilot", *pilot, "Pilot bandwidth (default: 1.5 x reference bandwidth)");
  cmd->add_option("--seed", *seed, "Bootstrap seed")->required();
  cmd->add_option("--criteria", *criteria, "Optional CSV with the criterion at every grid value");
  cmd->add_option("--output", *output, "Selected bandwidth CSV")->required();
  return [=](cli::OutputSet& out) {
    const auto sample = load_input(*in);
    log_seed("bandwidth", *seed);
    const auto& values = sample.covariate(smooth->covariate).values;
    std::vector<double> points = xs->empty() ? default_eval_points(values) : *xs;
    if (*grid_size == 0) throw UsageError("--grid-size must be positive");
    BootstrapOptions opt;
    opt.resamples = *resamples;
    opt.seed = *seed;
    opt.kernel = kernel_from(smooth->kernel);
    opt.stratum = parse_stratum(smooth->stratum);
    if (*pilot != 0.0) opt.pilot = bandwidth_from(*pilot);
    const auto sel =
        bootstrap_bandwidth(sample, smooth->covariate, points, default_bandwidth_grid(values, *grid_size), opt);
    std::string table = "x,h,criterion\n";
    std::string long_table = "x,h,criterion,resamples_used\n";
    for (const auto& p : sel.points) {
      std::size_t best = 0;
      for (std::size_t j = 0; j < sel.grid.size(); ++j) {
        if (sel.grid[j] == p.selected) best = j;
        long_table += format_number(p.x) + "," + format_number(sel.grid[j].value()) + "," +
                      (std::isnan(p.criterion[j]) ? std::string("NA") : format_number(p.criterion[j])) + "," +
                      std::to_string(p.resamples_used[j]) + "\n";
      }
      table += format_number(p.x) + "," + format_number(p.selected.value()) + "," + format_number(p.criterion[best]) +
               "\n";
    }
    out.add(*output, table);
    if (!criteria->empty()) out.add(*criteria, long_table);
  };
}

Runner add_mz_test(CLI::App& app) {
  auto* cmd = app.add_subcommand("mz-test", "Plateau test for a cured fraction");
  auto in = std::make_shared<InputOptions>();
  auto output = std::make_shared<std::string>();
  auto format = std::make_shared<std::string>("structured");
  add_input_options(cmd, *in);
  cmd->add_option("--format", *format, "Report format: structured or table")->capture_default_str();
  cmd->add_option("--output", *output, "Report file")->required();
  return [=](cli::OutputSet& out) {
    const auto fmt_kind = cli::parse_report_format(*format);
    Json report = report_header("mz-test", *cmd);
    report.update(test_report_json(maller_zhou_test(load_input(*in))));
    out.add(*output, cli::render_report(report, fmt_kind));
  };
}

Runner add_cov_test(CLI::App& app) {
  auto* cmd = app.add_subcommand("cov-test", "Permutation test of covariate effect on the cure probability");
  auto in = std::make_shared<InputOptions>();
  auto output = std::make_shared<std::string>();
  auto format = std::make_shared<std::string>("structured");
  auto covariate = std::make_shared<std::string>();
  auto permutations = std::make_shared<std::size_t>(999);
  auto seed = std::make_shared<std::uint64_t>(0);
  add_input_options(cmd, *in);
  cmd->add_option("--covariate", *covariate, "Covariate to test")->required();
  cmd->add_option("--permutations", *permutations, "Number of permutations")->capture_default_str();
  cmd->add_option("--seed", *seed, "Permutation seed")->required();
  cmd->add_option("--format", *format, "Report format: structured or table")->capture_default_str();
  cmd->add_option("--output", *output, "Report file")->required();
  return [=](cli::OutputSet& out) {
    const auto fmt_kind = cli::parse_report_format(*format);
    const auto sample = load_input(*in);
    log_seed("cov-test", *seed);
    Json report = report_header("cov-test", *cmd);
    report["covariate"] = *covariate;
    report.update(test_report_json(covariate_cure_test(sample, *covariate, *permutations, *seed)));
    out.add(*output, cli::render_report(report, fmt_kind));
  };
}

Runner add_fit(CLI::App& app) {
  auto* cmd = app.add_subcommand("fit", "Maximum-likelihood mixture cure model with Weibull latency");
  auto in = std::make_shared<InputOptions>();
  auto output = std::make_shared<std::string>();
  auto format = std::make_shared<std::string>("structured");
  auto link = std::make_shared<std::string>("logit");
  auto incidence = std::make_shared<std::string>();
  auto latency = std::make_shared<std::string>();
  auto susceptible_only = std::make_shared<bool>(false);
  auto options = std::make_shared<FitOptions>();
  add_input_options(cmd, *in);
  cmd->add_option("--link", *link, "Incidence link: logit, probit or cloglog")->capture_default_str();
  cmd->add_option("--incidence-covariates", *incidence, "Comma-separated incidence covariates");
  cmd->add_option("--latency-covariates", *latency, "Comma-separated latency covariates");
  cmd->add_flag("--susceptible-only", *susceptible_only, "Fit a plain Weibull AFT model (no cured fraction)");
  cmd->add_option("--starts", options->n_starts, "Number of optimizer starts")->capture_default_str();
  cmd->add_option("--max-iter", options->max_iter, "Iterations per start")->capture_default_str();
  cmd->add_option("--tol", options->tol, "Convergence tolerance on the log-likelihood gain")->capture_default_str();
  cmd->add_option("--seed", options->seed, "Seed for the perturbed starts")->required();
  cmd->add_option("--format", *format, "Report format: structured or table")->capture_default_str();
  cmd->add_option("--output", *output, "Report file")->required();
  return [=](cli::OutputSet& out) {
    const auto fmt_kind = cli::parse_report_format(*format);
    MixtureModel model;
    try {
      model.link = parse_link(*link);
    } catch (const DataError& e) {
      throw UsageError(e.what());
    }
    model.incidence_covariates = split_list(*incidence);
    model.latency_covariates = split_list(*latency);
    model.susceptible_only = *susceptible_only;
    if (model.susceptible_only && !model.incidence_covariates.empty()) {
      throw UsageError("--susceptible-only has no incidence covariates");
    }
    const auto sample = load_input(*in);
    log_seed("fit", options->seed);
    const auto fit = fit_mle(sample, model, *options);

    Json report = report_header("fit", *cmd);
    report["link"] = std::string(link_name(model.link));
    if (model.susceptible_only) {
      report["incidence"] = nullptr;
    } else {
      Json inc;
      inc["intercept"] = cli::number(fit.params.incidence[0]);
      for (std::size_t j = 0; j < model.incidence_covariates.size(); ++j) {
        inc[model.incidence_covariates[j]] = cli::number(fit.params.incidence[j + 1]);
      }
      report["incidence"] = inc;
    }
    Json lat;
    lat["intercept"] = cli::number(fit.params.latency_intercept);
    for (std::size_t j = 0; j < model.latency_covariates.size(); ++j) {
      lat[model.latency_covariates[j]] = cli::number(fit.params.latency_coefs[j]);
    }
    report["latency"] = lat;
    report["shape_k"] = cli::number(fit.params.shape_k);
    report["log_likelihood"] = cli::number(fit.log_likelihood);
    report["converged"] = fit.converged;
    report["iterations"] = fit.n_iterations;
    report["best_start"] = fit.best_start;
    report["starts_converged"] = fit.starts_converged;
    report["n"] = sample.size();
    out.add(*output, cli::render_report(report, fmt_kind));
  };
}

Runner add_simulate(CLI::App& app) {
  auto* cmd = app.add_subcommand("simulate", "Draw a mixture cure cohort");
  auto spec = std::make_shared<SimulationSpec>();
  auto output = std::make_shared<std::string>();
  auto truth = std::make_shared<std::string>();
  auto link = std::make_shared<std::string>("logit");
  auto inc_coefs = std::make_shared<std::vector<std::string>>();
  auto lat_coefs = std::make_shared<std::vector<std::string>>();
  auto fixed = std::make_shared<double>(0.0);
  auto censoring = std::make_shared<std::string>("exponential");
  cmd->add_option("--n", spec->n, "Cohort size")->required();
  cmd->add_option("--seed", spec->seed, "Simulation seed")->required();
  cmd->add_option("--age-lo", spec->age_lo, "Lower age bound")->capture_default_str();
  cmd->add_option("--age-hi", spec->age_hi, "Upper age bound")->capture_default_str();
  cmd->add_option("--sex-prob", spec->sex_prob, "P(sex = 1)")->capture_default_str();
  cmd->add_option("--link", *link, "Incidence link")->capture_default_str();
  cmd->add_option("--incidence-intercept", spec->incidence.intercept, "Incidence intercept")->capture_default_str();
  cmd->add_option("--incidence-coef", *inc_coefs, "Incidence coefficient name=value (age, sex)");
  auto* fixed_opt = cmd->add_option("--incidence-fixed", *fixed, "Constant incidence p in [0, 1]");
  cmd->add_option("--latency-intercept", spec->latency.gamma0, "Latency log-scale intercept")->capture_default_str();
  cmd->add_option("--latency-coef", *lat_coefs, "Latency coefficient name=value (age, sex)");
  cmd->add_option("--shape", spec->latency.shape_k, "Weibull shape k")->capture_default_str();
  cmd->add_option("--censoring", *censoring, "Censoring law: exponential, uniform or none")->capture_default_str();
  cmd->add_option("--censoring-parameter", spec->censoring.parameter, "Exponential rate or uniform upper bound")
      ->capture_default_str();
  cmd->add_option("--output", *output, "Sample CSV")->required();
  cmd->add_option("--truth", *truth, "Latent truth CSV (B,Y,C,p)")->required();
  return [=](cli::OutputSet& out) {
    SimulationSpec s = *spec;
    try {
      s.incidence.link = parse_link(*link);
    } catch (const DataError& e) {
      throw UsageError(e.what());
    }
    s.incidence.coefs = parse_coefs(*inc_coefs, "--incidence-coef");
    s.latency.coefs = parse_coefs(*lat_coefs, "--latency-coef");
    if (fixed_opt->count() > 0) s.incidence.fixed = *fixed;
    using Kind = SimulationSpec::Censoring::Kind;
    if (*censoring == "exponential") {
      s.censoring.kind = Kind::exponential;
    } else if (*censoring == "uniform") {
      s.censoring.kind = Kind::uniform;
    } else if (*censoring == "none") {
      s.censoring.kind = Kind::none;
    } else {
      throw UsageError("unknown censoring law '" + *censoring + "'");
    }
    log_seed("simulate", s.seed);
    const auto result = simulate(s);
    std::ostringstream sample_text, truth_text;
    write_sample(sample_text, result.sample);
    write_truth(truth_text, result.truth);
    out.add(*output, sample_text.str());
    out.add(*truth, truth_text.str());
  };
}

Runner add_jitter(CLI::App& app) {
  auto* cmd = app.add_subcommand("jitter", "Break ties of day-resolution times with U(-1, 1) noise");
  auto in = std::make_shared<InputOptions>();
  auto output = std::make_shared<std::string>();
  auto seed = std::make_shared<std::uint64_t>(0);
  add_input_options(cmd, *in);
  cmd->add_option("--seed", *seed, "Jitter seed")->required();
  cmd->add_option("--output", *output, "Sample CSV")->required();
  return [=](cli::OutputSet& out) {
    const auto sample = load_input(*in);
    log_seed("jitter", *seed);
    std::ostringstream text;
    write_sample(text, jitter_times(sample, *seed));
    out.add(*output, text.str());
  };
}

Runner add_summary(CLI::App& app) {
  auto* cmd = app.add_subcommand("summary", "Descriptive statistics of a sample");
  auto in = std::make_shared<InputOptions>();
  auto output = std::make_shared<std::string>();
  auto format = std::make_shared<std::string>("structured");
  add_input_options(cmd, *in);
  cmd->add_option("--format", *format, "Report format: structured or table")->capture_default_str();
  cmd->add_option("--output", *output, "Report file")->required();
  return [=](cli::OutputSet& out) {
    const auto fmt_kind = cli::parse_report_format(*format);
    const auto stats = summary_stats(load_input(*in));
    auto opt = [](const std::optional<double>& v) { return v ? cli::number(*v) : Json(nullptr); };
    auto group = [&](const std::optional<SexGroupStats>& g) {
      if (!g) return Json(nullptr);
      Json j;
      j["count"] = g->count;
      j["percent"] = cli::number(g->percent);
      j["mean_age"] = opt(g->mean_age);
      return j;
    };
    Json report = report_header("summary", *cmd);
    report["n"] = stats.n;
    report["mean_age"] = opt(stats.mean_age);
    report["male"] = group(stats.male);
    report["female"] = group(stats.female);
    report["uncensored"] = stats.uncensored;
    report["min_uncensored_time"] = opt(stats.min_uncensored_time);
    report["max_uncensored_time"] = opt(stats.max_uncensored_time);
    report["censoring_proportion"] = cli::number(stats.censoring_proportion);
    out.add(*output, cli::render_report(report, fmt_kind));
  };
}

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

int fail(const std::string& kind, const std::string& message, int code) {
  fmt::print(stderr, "error: {}: {}\n", kind, one_line(message));
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Right-censored survival analysis and mixture cure models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "curesurv 0.1.0");

  std::map<std::string, Runner> commands{
      {"km", add_km(app)},           {"beran", add_beran(app)},       {"cure-rate", add_cure_rate(app)},
      {"latency", add_latency(app)}, {"bandwidth", add_bandwidth(app)}, {"mz-test", add_mz_test(app)},
      {"cov-test", add_cov_test(app)}, {"fit", add_fit(app)},         {"simulate", add_simulate(app)},
      {"jitter", add_jitter(app)},   {"summary", add_summary(app)},
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    for (const CLI::App* cmd : app.get_subcommands()) {
      cli::OutputSet outputs;
      commands.at(cmd->get_name())(outputs);
      outputs.commit();
    }
  } catch (const UsageError& e) {
    return fail("usage", e.what(), 2);
  } catch (const DataError& e) {
    return fail("data", e.what(), 1);
  } catch (const NumericError& e) {
    return fail("numeric", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}
