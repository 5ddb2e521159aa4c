#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curesurv/data_model.hpp"
#include "curesurv/mixture_parametric.hpp"

namespace curesurv {

/// Generative description of a mixture cure cohort.
///
/// Covariates: age ~ U[age_lo, age_hi], sex ~ Bernoulli(sex_prob). Incidence
/// p(x) = link(intercept + sum coefs[name] * x_name), or a fixed probability.
/// Latency: Weibull with log scale gamma0 + sum coefs[name] * x_name and shape k.
struct SimulationSpec {
  std::size_t n = 100;
  double age_lo = 20.0;
  double age_hi = 80.0;
  double sex_prob = 0.5;

  struct Incidence {
    LinkFunction link = LinkFunction::logit;
    double intercept = 0.0;
    std::map<std::string, double> coefs;
    std::optional<double> fixed;  // constant p(x) when set
  } incidence;

  struct Latency {
    double gamma0 = 0.0;
    std::map<std::string, double> coefs;
    double shape_k = 1.0;
  } latency;

  struct Censoring {
    enum class Kind { exponential, uniform, none } kind = Kind::exponential;
    double parameter = 1.0;  // rate for exponential, upper bound tau for uniform
  } censoring;

  std::uint64_t seed = 0;
};

/// Latent quantities retained for oracle checks.
struct TruthRecord {
  int susceptible = 1;  // B
  double event_time = 0.0;  // Y, +inf when cured
  double censoring_time = 0.0;  // C, +inf without censoring
  double incidence = 1.0;  // p(x)
};

struct SimulationResult {
  SurvivalSample sample;
  std::vector<TruthRecord> truth;
};

/// Throws DataError for invalid ranges or a law that could produce infinite times.
void validate(const SimulationSpec& spec);

/// Draws the cohort; subject i uses its own substream of spec.seed.
SimulationResult simulate(const SimulationSpec& spec);

/// p(x) under the simulation settings; `covariates` maps covariate names to values.
double true_incidence(const SimulationSpec& spec, const std::map<std::string, double>& covariates);

/// Latency survival S_u(t | x) under the simulation settings.
double true_latency_survival(const SimulationSpec& spec, double t,
                             const std::map<std::string, double>& covariates);

/// 1 - p(x) + p(x) S_u(t | x) under the simulation settings.
double true_population_survival(const SimulationSpec& spec, double t,
                                const std::map<std::string, double>& covariates);

/// Writes `B,Y,C,p` rows (Y and C may be "inf").
void write_truth(std::ostream& out, const std::vector<TruthRecord>& truth);

}  // namespace curesurv
