#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curesurv/data_model.hpp"
#include "curesurv/kernels.hpp"

namespace curesurv {

/// Right-continuous, non-increasing step function starting at S(0) = 1.
/// values[j] is the value on [jump_times[j], jump_times[j+1]).
struct StepCurve {
  std::vector<double> jump_times;
  std::vector<double> values;
};

/// Right-continuous evaluation: 1 before the first jump, the last value after the last one.
double curve_eval(const StepCurve& curve, double t);

/// Writes the curve as CSV with header `t,s`, one row per jump, 10 significant digits.
void write_curve(std::ostream& out, const StepCurve& curve);

/// Restricts weighting to the subjects whose binary column `covariate` equals `value`.
struct Stratum {
  std::string covariate;
  double value = 0.0;
};

/// Weights B_h(i)(x) aligned with the sample rows. Binary covariates use exact
/// matching (the kernel and bandwidth are then ignored); continuous covariates
/// use Nadaraya-Watson weights. An optional stratum zeroes the rows outside it
/// before normalization.
std::vector<double> covariate_weights(const SurvivalSample& sample, std::string_view covariate,
                                      double x, Kernel kernel, Bandwidth h,
                                      const std::optional<Stratum>& stratum = std::nullopt);

/// Kaplan-Meier product-limit estimator. Ties put uncensored observations first.
StepCurve km_fit(const SurvivalSample& sample);

/// Beran estimator from explicit weights aligned with the sample rows.
StepCurve beran_fit(const SurvivalSample& sample, std::span<const double> weights);

/// Beran conditional survival estimator S_h(t | covariate = x).
StepCurve beran_fit(const SurvivalSample& sample, std::string_view covariate, double x, Kernel kernel,
                    Bandwidth h, const std::optional<Stratum>& stratum = std::nullopt);

/// Largest uncensored time, if any.
std::optional<double> last_uncensored_time(const SurvivalSample& sample);

namespace detail {

/// Row order by time, uncensored before censored at equal times, stable otherwise.
std::vector<std::size_t> survival_order(std::span<const double> times, std::span<const int> deltas);

/// Beran product evaluated at `t` using a precomputed order; O(n).
double beran_value_at(std::span<const double> times, std::span<const int> deltas,
                      std::span<const std::size_t> order, std::span<const double> weights, double t);

}  // namespace detail

}  // namespace curesurv
