#include "curesurv/mixture_parametric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "curesurv/error.hpp"
#include "curesurv/rng.hpp"
#include "optimizer.hpp"

namespace curesurv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// log p and log(1 - p) for the incidence link.
struct LogIncidence {
  double log_p;
  double log_q;
};

LogIncidence log_incidence(LinkFunction link, double eta) {
  switch (link) {
    case LinkFunction::logit:
      return {-softplus(-eta), -softplus(eta)};
    case LinkFunction::probit:
      return {std::log(0.5 * std::erfc(-eta / std::numbers::sqrt2)),
              std::log(0.5 * std::erfc(eta / std::numbers::sqrt2))};
    case LinkFunction::cloglog: {
      const double e = std::exp(eta);
      return {std::log(-std::expm1(-e)), -e};
    }
  }
  return {kNegInf, kNegInf};
}

double linear(double intercept, std::span<const double> coefs, std::span<const double> values) {
  if (coefs.size() != values.size()) throw DataError("coefficient and covariate counts differ");
  double eta = intercept;
  for (std::size_t j = 0; j < coefs.size(); ++j) eta += coefs[j] * values[j];
  return eta;
}

// Inverse of link_eval by bisection; only used for starting values.
double link_inverse(LinkFunction link, double p) {
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (link_eval(link, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Column-major copies of the covariates the model uses.
struct Design {
  std::vector<double> log_t;
  std::vector<int> delta;
  std::vector<std::vector<double>> incidence;  // one column per incidence covariate
  std::vector<std::vector<double>> latency;

  Design(const SurvivalSample& sample, const MixtureModel& model) {
    for (double t : sample.times()) log_t.push_back(std::log(t));
    delta.assign(sample.deltas().begin(), sample.deltas().end());
    if (!model.susceptible_only) {
      for (const auto& name : model.incidence_covariates) incidence.push_back(sample.covariate(name).values);
    }
    for (const auto& name : model.latency_covariates) latency.push_back(sample.covariate(name).values);
  }

  std::size_t size() const { return log_t.size(); }
};

// Log-likelihood in packed coordinates; NaN or -inf signal infeasible points.
double packed_log_likelihood(const Design& design, const MixtureModel& model, std::span<const double> theta) {
  const std::size_t n_inc = model.susceptible_only ? 0 : 1 + model.incidence_covariates.size();
  const std::size_t n_lat = model.latency_covariates.size();
  const double log_k = theta[n_inc + 1 + n_lat];
  const double k = std::exp(log_k);
  double total = 0.0;
  for (std::size_t i = 0; i < design.size(); ++i) {
    LogIncidence inc{0.0, kNegInf};
    if (!model.susceptible_only) {
      double eta = theta[0];
      for (std::size_t j = 0; j < design.incidence.size(); ++j) eta += theta[1 + j] * design.incidence[j][i];
      inc = log_incidence(model.link, eta);
    }
    double log_lambda = theta[n_inc];
    for (std::size_t j = 0; j < n_lat; ++j) log_lambda += theta[n_inc + 1 + j] * design.latency[j][i];
    const double log_scaled = design.log_t[i] - log_lambda;
    const double cum_hazard = std::exp(k * log_scaled);
    if (design.delta[i] == 1) {
      total += inc.log_p + log_k - log_lambda + (k - 1.0) * log_scaled - cum_hazard;
    } else {
      total += log_add_exp(inc.log_q, inc.log_p - cum_hazard);
    }
  }
  return std::isnan(total) ? kNegInf : total;
}

// Step divisors for finite differences: the root-mean-square of each
// coefficient's covariate (at least 1), so every step moves the linear
// predictor by a comparable amount.
std::vector<double> coordinate_scale(const Design& design, const MixtureModel& model) {
  auto rms = [](const std::vector<double>& column) {
    double ss = 0.0;
    for (double v : column) ss += v * v;
    return std::max(1.0, std::sqrt(ss / static_cast<double>(column.size())));
  };
  std::vector<double> scale;
  if (!model.susceptible_only) {
    scale.push_back(1.0);
    for (const auto& column : design.incidence) scale.push_back(rms(column));
  }
  scale.push_back(1.0);
  for (const auto& column : design.latency) scale.push_back(rms(column));
  scale.push_back(1.0);
  return scale;
}

void check_model(const SurvivalSample& sample, const MixtureModel& model) {
  for (const auto& name : model.incidence_covariates) sample.covariate(name);
  for (const auto& name : model.latency_covariates) sample.covariate(name);
}

// Weibull fit (shape, log scale) to the uncensored times alone. Solves the
// profile score 1/k + mean(log t) - sum t^k log t / sum t^k = 0 by bisection
// in log k; falls back to log-time moments when fewer than two distinct times exist.
std::pair<double, double> uncensored_weibull_fit(std::span<const double> log_t) {
  const double m = static_cast<double>(log_t.size());
  const double mean = std::accumulate(log_t.begin(), log_t.end(), 0.0) / std::max(m, 1.0);
  const auto [lo_it, hi_it] = std::minmax_element(log_t.begin(), log_t.end());
  if (log_t.size() < 2 || *lo_it == *hi_it) return {1.0, mean};
  const double top = *hi_it;
  // Sums of t^k and t^k log t, scaled by exp(-k * max log t) to avoid overflow.
  auto sums = [&](double k) {
    double a = 0.0, b = 0.0;
    for (double v : log_t) {
      const double w = std::exp(k * (v - top));
      a += w;
      b += w * v;
    }
    return std::pair{a, b};
  };
  auto score = [&](double k) {
    const auto [a, b] = sums(k);
    return 1.0 / k + mean - b / a;
  };
  double lo = std::log(0.05), hi = std::log(50.0);
  if (score(std::exp(lo)) <= 0.0 || score(std::exp(hi)) >= 0.0) {
    double ss = 0.0;
    for (double v : log_t) ss += (v - mean) * (v - mean);
    const double k = std::clamp(std::numbers::pi / (std::sqrt(ss / (m - 1.0)) * std::sqrt(6.0)), 0.05, 50.0);
    return {k, mean + std::numbers::egamma / k};
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (score(std::exp(mid)) > 0.0 ? lo : hi) = mid;
  }
  const double k = std::exp(0.5 * (lo + hi));
  return {k, top + std::log(sums(k).first / m) / k};
}

std::vector<double> starting_point(const SurvivalSample& sample, const MixtureModel& model) {
  CureParams start;
  const auto times = sample.times();
  const auto deltas = sample.deltas();
  std::vector<double> log_events;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (deltas[i] == 1) log_events.push_back(std::log(times[i]));
  }
  const double m = static_cast<double>(log_events.size());
  if (!model.susceptible_only) {
    const double share = std::clamp(m / static_cast<double>(sample.size()), 0.01, 0.99);
    start.incidence.assign(1 + model.incidence_covariates.size(), 0.0);
    start.incidence[0] = link_inverse(model.link, share);
  }
  const auto [shape, log_scale] = uncensored_weibull_fit(log_events);
  start.shape_k = shape;
  start.latency_intercept = log_scale;
  start.latency_coefs.assign(model.latency_covariates.size(), 0.0);
  return pack_params(model, start);
}

double standard_normal(std::mt19937_64& engine) {
  const double u1 = uniform_open01(engine);
  const double u2 = uniform_open01(engine);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

LinkFunction parse_link(std::string_view name) {
  if (name == "logit") return LinkFunction::logit;
  if (name == "probit") return LinkFunction::probit;
  if (name == "cloglog") return LinkFunction::cloglog;
  throw DataError(fmt::format("unknown link '{}'", name));
}

std::string_view link_name(LinkFunction link) {
  switch (link) {
    case LinkFunction::logit: return "logit";
    case LinkFunction::probit: return "probit";
    case LinkFunction::cloglog: return "cloglog";
  }
  return "";
}

double link_eval(LinkFunction link, double eta) {
  switch (link) {
    case LinkFunction::logit:
      return eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
    case LinkFunction::probit:
      return 0.5 * std::erfc(-eta / std::numbers::sqrt2);
    case LinkFunction::cloglog:
      return -std::expm1(-std::exp(eta));
  }
  return 0.0;
}

double weibull_aft_survival(double t, std::span<const double> z, double gamma0,
                            std::span<const double> gamma, double k) {
  if (!(k > 0.0)) throw DataError("Weibull shape must be positive");
  if (t < 0.0) throw DataError("time must be non-negative");
  const double lambda = std::exp(linear(gamma0, gamma, z));
  return std::exp(-std::pow(t / lambda, k));
}

double weibull_aft_density(double t, std::span<const double> z, double gamma0,
                           std::span<const double> gamma, double k) {
  if (!(k > 0.0)) throw DataError("Weibull shape must be positive");
  if (t < 0.0) throw DataError("time must be non-negative");
  const double lambda = std::exp(linear(gamma0, gamma, z));
  const double r = t / lambda;
  return (k / lambda) * std::pow(r, k - 1.0) * std::exp(-std::pow(r, k));
}

double population_survival(double t, std::span<const double> x, std::span<const double> z,
                           LinkFunction link, const CureParams& params) {
  if (params.incidence.empty()) throw DataError("incidence needs an intercept");
  const double p = link_eval(link, linear(params.incidence[0], std::span(params.incidence).subspan(1), x));
  const double su = weibull_aft_survival(t, z, params.latency_intercept, params.latency_coefs, params.shape_k);
  return 1.0 - p + p * su;
}

std::size_t MixtureModel::parameter_count() const {
  return (susceptible_only ? 0 : 1 + incidence_covariates.size()) + 1 + latency_covariates.size() + 1;
}

std::vector<double> pack_params(const MixtureModel& model, const CureParams& params) {
  std::vector<double> theta;
  if (!model.susceptible_only) {
    if (params.incidence.size() != 1 + model.incidence_covariates.size()) {
      throw DataError("incidence coefficient count does not match the model");
    }
    theta = params.incidence;
  }
  if (params.latency_coefs.size() != model.latency_covariates.size()) {
    throw DataError("latency coefficient count does not match the model");
  }
  if (!(params.shape_k > 0.0)) throw DataError("Weibull shape must be positive");
  theta.push_back(params.latency_intercept);
  theta.insert(theta.end(), params.latency_coefs.begin(), params.latency_coefs.end());
  theta.push_back(std::log(params.shape_k));
  return theta;
}

CureParams unpack_params(const MixtureModel& model, std::span<const double> theta) {
  if (theta.size() != model.parameter_count()) throw DataError("parameter vector has the wrong length");
  CureParams params;
  std::size_t pos = 0;
  if (!model.susceptible_only) {
    params.incidence.assign(theta.begin(), theta.begin() + 1 + model.incidence_covariates.size());
    pos = params.incidence.size();
  }
  params.latency_intercept = theta[pos++];
  params.latency_coefs.assign(theta.begin() + pos, theta.begin() + pos + model.latency_covariates.size());
  pos += model.latency_covariates.size();
  params.shape_k = std::exp(theta[pos]);
  return params;
}

double mixture_log_likelihood(const SurvivalSample& sample, const MixtureModel& model,
                              const CureParams& params) {
  check_model(sample, model);
  const Design design(sample, model);
  const auto theta = pack_params(model, params);
  const double ll = packed_log_likelihood(design, model, theta);
  if (!std::isfinite(ll)) throw NumericError("log-likelihood is not finite at these parameters");
  return ll;
}

std::vector<double> log_likelihood_gradient(const SurvivalSample& sample, const MixtureModel& model,
                                            std::span<const double> theta, double relative_step) {
  check_model(sample, model);
  if (theta.size() != model.parameter_count()) throw DataError("parameter vector has the wrong length");
  const Design design(sample, model);
  return detail::central_gradient(
      [&](std::span<const double> p) { return packed_log_likelihood(design, model, p); }, theta,
      relative_step, coordinate_scale(design, model));
}

ParametricCureFit fit_mle(const SurvivalSample& sample, const MixtureModel& model, const FitOptions& options) {
  check_model(sample, model);
  if (options.n_starts == 0) throw DataError("fit needs at least one start");
  if (sample.size() < model.parameter_count() + 1) {
    throw DataError(fmt::format("fit needs at least {} observations", model.parameter_count() + 1));
  }
  if (sample.uncensored_count() == 0) {
    throw DataError("every observation is censored; the incidence is not identifiable");
  }

  const Design design(sample, model);
  const detail::Objective objective = [&](std::span<const double> theta) {
    return packed_log_likelihood(design, model, theta);
  };
  detail::AscentOptions ascent;
  ascent.max_iter = options.max_iter;
  ascent.tol = options.tol;
  ascent.coordinate_scale = coordinate_scale(design, model);

  const auto base = starting_point(sample, model);
  ParametricCureFit fit;
  fit.model = model;
  std::optional<detail::AscentResult> best;
  for (std::size_t s = 0; s < options.n_starts; ++s) {
    auto start = base;
    if (s > 0) {
      auto engine = substream(options.seed, s);
      for (auto& v : start) v += 0.5 * standard_normal(engine);
    }
    auto run = detail::maximize_bfgs(objective, std::move(start), ascent);
    if (run.converged) ++fit.starts_converged;
    if (std::isfinite(run.value) && (!best || run.value > best->value)) {
      best = std::move(run);
      fit.best_start = s;
    }
  }
  if (!best) throw NumericError("no start reached a finite log-likelihood");

  fit.params = unpack_params(model, best->x);
  fit.log_likelihood = best->value;
  fit.converged = best->converged;
  fit.n_iterations = best->iterations;
  return fit;
}

double promotion_time_survival(const PromotionTimeModel& model, double t) {
  if (!(model.theta >= 0.0)) throw DataError("promotion-time theta must be non-negative");
  if (t < 0.0) throw DataError("time must be non-negative");
  if (!model.baseline_cdf) throw DataError("promotion-time model needs a baseline distribution");
  return std::exp(-model.theta * model.baseline_cdf(t));
}

}  // namespace curesurv
