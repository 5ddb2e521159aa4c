#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curesurv/data_model.hpp"
#include "curesurv/kernels.hpp"
#include "curesurv/survival.hpp"

namespace curesurv {

/// Estimated cure probability 1 - p (or 1 - p(x)).
struct CureEstimate {
  double cure_prob = 1.0;
  std::optional<double> at_x;
  std::optional<Bandwidth> bandwidth_used;
  /// Largest uncensored time of the sample; 0 when every observation is censored.
  double last_uncensored_time = 0.0;
};

/// Survival of the susceptible subjects, S_u(t | x) = P(T > t | X = x, B = 1).
struct LatencyCurve {
  StepCurve base;
  CureEstimate incidence_used;
};

/// Kaplan-Meier cure rate: the KM curve at the largest uncensored time
/// (1 when there are no uncensored observations).
CureEstimate cure_rate_unconditional(const SurvivalSample& sample);

/// Beran-based cure rate at covariate value x, clamped to [0, 1].
CureEstimate cure_rate_conditional(const SurvivalSample& sample, std::string_view covariate, double x,
                                   Kernel kernel, Bandwidth h,
                                   const std::optional<Stratum>& stratum = std::nullopt);

/// Latency estimate (S_h(t|x) - (1 - p_h(x))) / p_h(x) at every jump of the Beran curve.
/// Throws NumericError when p_h(x) = 0 (everybody cured at x).
LatencyCurve latency_estimate(const SurvivalSample& sample, std::string_view covariate, double x,
                              Kernel kernel, Bandwidth h,
                              const std::optional<Stratum>& stratum = std::nullopt);

/// sd(X) * n^(-1/5) over the rows used for smoothing.
double reference_bandwidth(std::span<const double> xs);

/// 15 log-spaced bandwidths on [0.2 h0, 5 h0] with h0 = reference_bandwidth(xs).
std::vector<Bandwidth> default_bandwidth_grid(std::span<const double> xs, std::size_t count = 15);

/// Pilot bandwidth 1.5 h0 used as the bootstrap reference estimate.
Bandwidth default_pilot_bandwidth(std::span<const double> xs);

/// Quantiles 0.1, 0.2, ..., 0.9 (linear interpolation between order statistics).
std::vector<double> default_eval_points(std::span<const double> xs);

struct BootstrapOptions {
  std::size_t resamples = 100;
  std::uint64_t seed = 0;
  Kernel kernel = Kernel::epanechnikov;
  std::optional<Bandwidth> pilot;  // default_pilot_bandwidth when absent
  std::optional<Stratum> stratum;
};

struct PointSelection {
  double x = 0.0;
  Bandwidth selected{1.0};
  double pilot_cure_prob = 0.0;
  /// Monte-Carlo MISE proxy per grid value; NaN when every resample was skipped.
  std::vector<double> criterion;
  /// Resamples that contributed to each criterion value.
  std::vector<std::size_t> resamples_used;
};

struct BandwidthSelection {
  std::vector<Bandwidth> grid;
  Bandwidth pilot{1.0};
  std::vector<PointSelection> points;
};

/// Row indices of bootstrap resample `b` (naive resampling with replacement).
std::vector<std::size_t> bootstrap_resample_indices(std::size_t n, std::uint64_t seed, std::size_t b);

/// Bootstrap bandwidth selection for the conditional cure rate.
///
/// For each x and grid value h, the criterion is the mean over resamples of
/// (p*_{h,b}(x) - p_g(x))^2 where p_g is the pilot estimate on the original
/// sample. Resamples with an empty neighborhood at (x, h) are skipped; grid
/// values skipped by every resample are disqualified. Returns the first
/// minimizer per x.
BandwidthSelection bootstrap_bandwidth(const SurvivalSample& sample, std::string_view covariate,
                                       std::span<const double> eval_points,
                                       std::span<const Bandwidth> grid, const BootstrapOptions& options);

}  // namespace curesurv
