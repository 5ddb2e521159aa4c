#include "curesurv/cure_nonparametric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "curesurv/error.hpp"
#include "curesurv/rng.hpp"

namespace curesurv {

CureEstimate cure_rate_unconditional(const SurvivalSample& sample) {
  CureEstimate est;
  const auto t_max = last_uncensored_time(sample);
  if (!t_max) return est;
  est.last_uncensored_time = *t_max;
  est.cure_prob = std::clamp(curve_eval(km_fit(sample), *t_max), 0.0, 1.0);
  return est;
}

CureEstimate cure_rate_conditional(const SurvivalSample& sample, std::string_view covariate, double x,
                                   Kernel kernel, Bandwidth h, const std::optional<Stratum>& stratum) {
  const auto curve = beran_fit(sample, covariate, x, kernel, h, stratum);
  CureEstimate est;
  est.at_x = x;
  est.bandwidth_used = h;
  if (const auto t_max = last_uncensored_time(sample)) {
    est.last_uncensored_time = *t_max;
    est.cure_prob = std::clamp(curve_eval(curve, *t_max), 0.0, 1.0);
  }
  return est;
}

LatencyCurve latency_estimate(const SurvivalSample& sample, std::string_view covariate, double x,
                              Kernel kernel, Bandwidth h, const std::optional<Stratum>& stratum) {
  const auto beran = beran_fit(sample, covariate, x, kernel, h, stratum);
  CureEstimate incidence;
  incidence.at_x = x;
  incidence.bandwidth_used = h;
  if (const auto t_max = last_uncensored_time(sample)) {
    incidence.last_uncensored_time = *t_max;
    incidence.cure_prob = std::clamp(curve_eval(beran, *t_max), 0.0, 1.0);
  }
  const double cure = incidence.cure_prob;
  const double susceptible = 1.0 - cure;
  if (!(susceptible > 0.0)) {
    throw NumericError(fmt::format("latency undefined at x = {}: estimated cure probability is 1", x));
  }
  LatencyCurve latency{StepCurve{beran.jump_times, {}}, incidence};
  latency.base.values.reserve(beran.values.size());
  for (double s : beran.values) {
    latency.base.values.push_back(std::clamp((s - cure) / susceptible, 0.0, 1.0));
  }
  return latency;
}

// --- bandwidth grid ---------------------------------------------------------

double reference_bandwidth(std::span<const double> xs) {
  if (xs.size() < 2) throw DataError("bandwidth reference needs at least two covariate values");
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : xs) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) throw DataError("covariate is constant; no reference bandwidth");
  return sd * std::pow(n, -0.2);
}

std::vector<Bandwidth> default_bandwidth_grid(std::span<const double> xs, std::size_t count) {
  if (count == 0) throw DataError("bandwidth grid must not be empty");
  const double h0 = reference_bandwidth(xs);
  const double lo = std::log(0.2 * h0);
  const double hi = std::log(5.0 * h0);
  std::vector<Bandwidth> grid;
  grid.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double frac = count == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(count - 1);
    grid.emplace_back(std::exp(lo + frac * (hi - lo)));
  }
  return grid;
}

Bandwidth default_pilot_bandwidth(std::span<const double> xs) {
  return Bandwidth(1.5 * reference_bandwidth(xs));
}

std::vector<double> default_eval_points(std::span<const double> xs) {
  if (xs.empty()) throw DataError("no covariate values");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> points;
  for (int d = 1; d <= 9; ++d) {
    const double pos = 0.1 * d * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    points.push_back(sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]));
  }
  return points;
}

// --- bootstrap --------------------------------------------------------------

std::vector<std::size_t> bootstrap_resample_indices(std::size_t n, std::uint64_t seed, std::size_t b) {
  auto engine = substream(seed, b);
  std::vector<std::size_t> rows(n);
  for (auto& r : rows) {
    r = std::min(static_cast<std::size_t>(uniform_open01(engine) * static_cast<double>(n)), n - 1);
  }
  return rows;
}

BandwidthSelection bootstrap_bandwidth(const SurvivalSample& sample, std::string_view covariate,
                                       std::span<const double> eval_points,
                                       std::span<const Bandwidth> grid, const BootstrapOptions& options) {
  if (grid.empty()) throw DataError("bandwidth grid must not be empty");
  if (options.resamples == 0) throw DataError("bootstrap needs at least one resample");
  if (eval_points.empty()) throw DataError("no evaluation points");
  const auto& column = sample.covariate(covariate);
  if (column.kind != CovariateKind::continuous) {
    throw DataError("bandwidth selection needs a continuous covariate");
  }

  BandwidthSelection result;
  result.grid.assign(grid.begin(), grid.end());
  result.pilot = options.pilot ? *options.pilot : default_pilot_bandwidth(column.values);

  const std::size_t n_x = eval_points.size();
  const std::size_t n_h = grid.size();
  std::vector<double> pilot(n_x);
  for (std::size_t i = 0; i < n_x; ++i) {
    pilot[i] = cure_rate_conditional(sample, covariate, eval_points[i], options.kernel, result.pilot,
                                     options.stratum)
                   .cure_prob;
  }

  std::vector<double> sum_sq(n_x * n_h, 0.0);
  std::vector<std::size_t> used(n_x * n_h, 0);
  for (std::size_t b = 0; b < options.resamples; ++b) {
    const auto rows = bootstrap_resample_indices(sample.size(), options.seed, b);
    const auto resample = sample.subset(rows);
    const auto times = resample.times();
    const auto deltas = resample.deltas();
    const auto order = detail::survival_order(times, deltas);
    const auto t_max = last_uncensored_time(resample);
    for (std::size_t i = 0; i < n_x; ++i) {
      for (std::size_t j = 0; j < n_h; ++j) {
        double cure = 1.0;
        try {
          const auto w = covariate_weights(resample, covariate, eval_points[i], options.kernel, grid[j],
                                           options.stratum);
          if (t_max) cure = std::clamp(detail::beran_value_at(times, deltas, order, w, *t_max), 0.0, 1.0);
        } catch (const EmptyNeighborhoodError&) {
          continue;
        }
        const double diff = cure - pilot[i];
        sum_sq[i * n_h + j] += diff * diff;
        ++used[i * n_h + j];
      }
    }
  }

  for (std::size_t i = 0; i < n_x; ++i) {
    PointSelection point;
    point.x = eval_points[i];
    point.pilot_cure_prob = pilot[i];
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < n_h; ++j) {
      const std::size_t k = i * n_h + j;
      const double value = used[k] > 0 ? sum_sq[k] / static_cast<double>(used[k])
                                       : std::numeric_limits<double>::quiet_NaN();
      point.criterion.push_back(value);
      point.resamples_used.push_back(used[k]);
      if (used[k] > 0 && (!best || value < point.criterion[*best])) best = j;
    }
    if (!best) {
      throw NumericError(
          fmt::format("every bandwidth was disqualified at x = {} (empty bootstrap neighborhoods)",
                      eval_points[i]));
    }
    point.selected = grid[*best];
    result.points.push_back(std::move(point));
  }
  return result;
}

}  // namespace curesurv
