#include "curesurv/survival.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "curesurv/error.hpp"
#include "curesurv/format.hpp"

namespace curesurv {

namespace {

constexpr std::size_t kLogSpaceThreshold = 100000;

// Running product of survival factors; switches to log space for large samples.
class ProductAccumulator {
public:
  explicit ProductAccumulator(std::size_t n) : log_space_(n > kLogSpaceThreshold) {}

  void multiply(double factor) {
    factor = std::clamp(factor, 0.0, 1.0);
    if (log_space_) {
      log_value_ += factor > 0.0 ? std::log(factor) : -INFINITY;
    } else {
      value_ *= factor;
    }
  }
  double value() const { return log_space_ ? std::exp(log_value_) : value_; }

private:
  bool log_space_;
  double value_ = 1.0;
  double log_value_ = 0.0;
};

// Walks the ordered sample, applying 1 - hazard(rank, row) at uncensored rows
// with positive hazard, and records one jump per distinct event time.
template <class Hazard>
StepCurve product_limit(std::span<const double> times, std::span<const int> deltas,
                        std::span<const std::size_t> order, Hazard hazard) {
  StepCurve curve;
  ProductAccumulator s(order.size());
  bool pending = false;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t row = order[k];
    if (deltas[row] == 1) {
      const double h = hazard(k, row);
      if (h > 0.0) {
        s.multiply(1.0 - h);
        pending = true;
      }
    }
    const bool last_at_time = k + 1 == order.size() || times[order[k + 1]] != times[row];
    if (pending && last_at_time) {
      curve.jump_times.push_back(times[row]);
      curve.values.push_back(s.value());
      pending = false;
    }
  }
  return curve;
}

std::vector<double> tail_sums(std::span<const std::size_t> order, std::span<const double> weights) {
  std::vector<double> tail(order.size() + 1, 0.0);
  for (std::size_t k = order.size(); k-- > 0;) tail[k] = tail[k + 1] + weights[order[k]];
  return tail;
}

}  // namespace

namespace detail {

std::vector<std::size_t> survival_order(std::span<const double> times, std::span<const int> deltas) {
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (times[a] != times[b]) return times[a] < times[b];
    return deltas[a] > deltas[b];
  });
  return order;
}

double beran_value_at(std::span<const double> times, std::span<const int> deltas,
                      std::span<const std::size_t> order, std::span<const double> weights, double t) {
  const auto tail = tail_sums(order, weights);
  ProductAccumulator s(order.size());
  for (std::size_t k = 0; k < order.size() && times[order[k]] <= t; ++k) {
    const std::size_t row = order[k];
    if (deltas[row] == 1 && weights[row] > 0.0) s.multiply(1.0 - weights[row] / tail[k]);
  }
  return s.value();
}

}  // namespace detail

double curve_eval(const StepCurve& curve, double t) {
  const auto it = std::upper_bound(curve.jump_times.begin(), curve.jump_times.end(), t);
  if (it == curve.jump_times.begin()) return 1.0;
  return curve.values[static_cast<std::size_t>(it - curve.jump_times.begin()) - 1];
}

void write_curve(std::ostream& out, const StepCurve& curve) {
  out << "t,s\n";
  for (std::size_t j = 0; j < curve.jump_times.size(); ++j) {
    out << format_number(curve.jump_times[j]) << ',' << format_number(curve.values[j]) << '\n';
  }
}

std::vector<double> covariate_weights(const SurvivalSample& sample, std::string_view covariate,
                                      double x, Kernel kernel, Bandwidth h,
                                      const std::optional<Stratum>& stratum) {
  const auto& column = sample.covariate(covariate);
  auto weigh = [&](std::span<const double> xs) {
    return column.kind == CovariateKind::binary ? binary_weights(x, xs) : nw_weights(kernel, h, x, xs);
  };
  if (!stratum) return weigh(column.values);

  const auto& strat = sample.covariate(stratum->covariate);
  if (strat.kind != CovariateKind::binary) {
    throw DataError("stratum covariate '" + stratum->covariate + "' must be binary");
  }
  // Restrict to the stratum first, then weight within it.
  std::vector<std::size_t> rows;
  std::vector<double> within;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (strat.values[i] == stratum->value) {
      rows.push_back(i);
      within.push_back(column.values[i]);
    }
  }
  if (rows.empty()) {
    throw EmptyNeighborhoodError(
        fmt::format("stratum {} = {} is empty", stratum->covariate, stratum->value));
  }
  const auto local = weigh(within);
  std::vector<double> full(sample.size(), 0.0);
  for (std::size_t j = 0; j < rows.size(); ++j) full[rows[j]] = local[j];
  return full;
}

StepCurve km_fit(const SurvivalSample& sample) {
  const auto times = sample.times();
  const auto deltas = sample.deltas();
  const auto order = detail::survival_order(times, deltas);
  const std::size_t n = order.size();
  return product_limit(times, deltas, order, [n](std::size_t rank, std::size_t) {
    return 1.0 / static_cast<double>(n - rank);
  });
}

StepCurve beran_fit(const SurvivalSample& sample, std::span<const double> weights) {
  if (weights.size() != sample.size()) throw DataError("weights are not aligned with the sample");
  const auto times = sample.times();
  const auto deltas = sample.deltas();
  const auto order = detail::survival_order(times, deltas);
  const auto tail = tail_sums(order, weights);
  return product_limit(times, deltas, order, [&](std::size_t rank, std::size_t row) {
    return weights[row] > 0.0 ? weights[row] / tail[rank] : 0.0;
  });
}

StepCurve beran_fit(const SurvivalSample& sample, std::string_view covariate, double x, Kernel kernel,
                    Bandwidth h, const std::optional<Stratum>& stratum) {
  const auto weights = covariate_weights(sample, covariate, x, kernel, h, stratum);
  return beran_fit(sample, weights);
}

std::optional<double> last_uncensored_time(const SurvivalSample& sample) {
  std::optional<double> best;
  const auto times = sample.times();
  const auto deltas = sample.deltas();
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (deltas[i] == 1 && (!best || times[i] > *best)) best = times[i];
  }
  return best;
}

}  // namespace curesurv
