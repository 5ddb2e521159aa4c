#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curesurv/data_model.hpp"

namespace curesurv {

// Incidence links mapping a linear predictor to p(x) in (0, 1).
enum class LinkFunction { logit, probit, cloglog };

LinkFunction parse_link(std::string_view name);
std::string_view link_name(LinkFunction link);

/// logit: 1 / (1 + e^-eta); probit: standard normal CDF; cloglog: 1 - exp(-e^eta).
double link_eval(LinkFunction link, double eta);

/// Weibull AFT latency survival exp(-(t / lambda)^k), lambda = exp(gamma0 + gamma . z).
double weibull_aft_survival(double t, std::span<const double> z, double gamma0,
                            std::span<const double> gamma, double k);

/// Density matching weibull_aft_survival.
double weibull_aft_density(double t, std::span<const double> z, double gamma0,
                           std::span<const double> gamma, double k);

/// Coefficients of a parametric mixture cure model.
struct CureParams {
  std::vector<double> incidence;  // intercept, then one per incidence covariate
  double latency_intercept = 0.0;
  std::vector<double> latency_coefs;  // one per latency covariate
  double shape_k = 1.0;               // Weibull shape; AFT scale sigma = 1 / k
};

/// 1 - p(x) + p(x) S_u(t | z).
double population_survival(double t, std::span<const double> x, std::span<const double> z,
                           LinkFunction link, const CureParams& params);

struct MixtureModel {
  LinkFunction link = LinkFunction::logit;
  std::vector<std::string> incidence_covariates;
  std::vector<std::string> latency_covariates;
  /// Fix p = 1 (plain Weibull AFT model, no cured fraction).
  bool susceptible_only = false;

  std::size_t parameter_count() const;
};

/// sum_{delta=1} log[p f_u(t|z)] + sum_{delta=0} log[1 - p + p S_u(t|z)].
/// Throws NumericError if the result is not finite.
double mixture_log_likelihood(const SurvivalSample& sample, const MixtureModel& model,
                              const CureParams& params);

/// Unconstrained parameter vector: incidence coefficients (unless
/// susceptible_only), latency intercept, latency coefficients, log k.
std::vector<double> pack_params(const MixtureModel& model, const CureParams& params);
CureParams unpack_params(const MixtureModel& model, std::span<const double> theta);

/// Central finite-difference gradient of the log-likelihood in packed coordinates,
/// with per-coordinate step `relative_step * max(1, |theta_i|) / c_i`, where c_i is the
/// root-mean-square of the coefficient's covariate (at least 1; 1 for intercepts and log k).
std::vector<double> log_likelihood_gradient(const SurvivalSample& sample, const MixtureModel& model,
                                            std::span<const double> theta, double relative_step = 1e-5);

struct FitOptions {
  int max_iter = 500;
  double tol = 1e-8;
  std::size_t n_starts = 5;
  std::uint64_t seed = 0;
};

struct ParametricCureFit {
  MixtureModel model;
  CureParams params;
  double log_likelihood = 0.0;
  bool converged = false;
  int n_iterations = 0;
  std::size_t best_start = 0;
  std::size_t starts_converged = 0;
};

/// Maximum-likelihood fit by multi-start quasi-Newton (BFGS) ascent with
/// finite-difference gradients. The best start by likelihood wins, lowest index on ties.
ParametricCureFit fit_mle(const SurvivalSample& sample, const MixtureModel& model,
                          const FitOptions& options = {});

/// Promotion-time cure model: population survival exp(-theta F(t)).
struct PromotionTimeModel {
  double theta = 0.0;
  std::function<double(double)> baseline_cdf;
};

double promotion_time_survival(const PromotionTimeModel& model, double t);

}  // namespace curesurv
