#include "curesurv/hypothesis_tests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "curesurv/cure_nonparametric.hpp"
#include "curesurv/error.hpp"
#include "curesurv/rng.hpp"
#include "curesurv/survival.hpp"

namespace curesurv {

std::string_view method_name(TestMethod method) {
  return method == TestMethod::maller_zhou ? "maller_zhou" : "covariate_cm";
}

std::string_view calibration_name(Calibration calibration) {
  return calibration == Calibration::closed_form ? "closed_form" : "permutation";
}

TestReport maller_zhou_test(const SurvivalSample& sample) {
  TestReport report;
  report.method = TestMethod::maller_zhou;
  report.calibration = Calibration::closed_form;
  const auto times = sample.times();
  const auto deltas = sample.deltas();
  const double n = static_cast<double>(sample.size());
  const auto t_star = last_uncensored_time(sample);
  if (!t_star) {
    report.statistic = 0.0;
    report.p_value = 1.0;
    report.warning = "no uncensored observations";
    return report;
  }
  const double t_max = *std::max_element(times.begin(), times.end());
  const double lower = 2.0 * *t_star - t_max;
  std::size_t count = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (deltas[i] == 1 && times[i] > lower && times[i] <= *t_star) ++count;
  }
  const double share = static_cast<double>(count) / n;
  report.statistic = share;
  report.p_value = std::clamp(std::pow(1.0 - share, n), 0.0, 1.0);
  report.details = {{"n", n},
                    {"n_in_interval", static_cast<double>(count)},
                    {"t_max", t_max},
                    {"t_max_uncensored", *t_star},
                    {"interval_lower", lower}};
  return report;
}

namespace {

// Covariate order with the end position of every tie group.
struct RankLayout {
  std::vector<std::size_t> order;
  std::vector<std::size_t> group_ends;  // exclusive end of each tie group in `order`
};

RankLayout rank_layout(std::span<const double> covariate) {
  RankLayout layout;
  layout.order.resize(covariate.size());
  std::iota(layout.order.begin(), layout.order.end(), 0);
  std::stable_sort(layout.order.begin(), layout.order.end(),
                   [&](std::size_t a, std::size_t b) { return covariate[a] < covariate[b]; });
  for (std::size_t k = 0; k < layout.order.size(); ++k) {
    if (k + 1 == layout.order.size() || covariate[layout.order[k + 1]] != covariate[layout.order[k]]) {
      layout.group_ends.push_back(k + 1);
    }
  }
  return layout;
}

// n^-1 sum_j U_n(X_j)^2 with marks already centered and laid out in covariate order.
double cvm_sorted(std::span<const double> centered, std::span<const std::size_t> group_ends) {
  const double n = static_cast<double>(centered.size());
  double partial = 0.0;
  double total = 0.0;
  std::size_t start = 0;
  // The last group always closes the full (zero) sum, so it is skipped.
  for (std::size_t g = 0; g + 1 < group_ends.size(); ++g) {
    for (std::size_t k = start; k < group_ends[g]; ++k) partial += centered[k];
    const double multiplicity = static_cast<double>(group_ends[g] - start);
    total += multiplicity * partial * partial;
    start = group_ends[g];
  }
  return total / (n * n);
}

std::vector<double> centered_in_order(std::span<const double> marks, std::span<const std::size_t> order) {
  const double mean = std::accumulate(marks.begin(), marks.end(), 0.0) / static_cast<double>(marks.size());
  std::vector<double> centered;
  centered.reserve(order.size());
  for (auto r : order) centered.push_back(marks[r] - mean);
  return centered;
}

}  // namespace

namespace detail {

std::vector<double> cure_proxy(const SurvivalSample& sample) {
  const auto km = km_fit(sample);
  const auto cure = cure_rate_unconditional(sample);
  const auto t_star = last_uncensored_time(sample);
  const auto times = sample.times();
  const auto deltas = sample.deltas();
  std::vector<double> nu(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (deltas[i] == 1) {
      nu[i] = 0.0;
    } else if (!t_star || times[i] > *t_star) {
      nu[i] = 1.0;
    } else {
      const double s = curve_eval(km, times[i]);
      nu[i] = s > 0.0 ? std::clamp(cure.cure_prob / s, 0.0, 1.0) : 0.0;
    }
  }
  return nu;
}

double cramer_von_mises(std::span<const double> covariate, std::span<const double> marks) {
  if (covariate.size() != marks.size() || covariate.empty()) {
    throw DataError("covariate and marks must be aligned and non-empty");
  }
  const auto layout = rank_layout(covariate);
  const auto centered = centered_in_order(marks, layout.order);
  return cvm_sorted(centered, layout.group_ends);
}

}  // namespace detail

TestReport covariate_cure_test(const SurvivalSample& sample, std::string_view covariate,
                               std::size_t n_permutations, std::uint64_t seed) {
  if (sample.size() < 2) throw DataError("covariate test needs at least two observations");
  if (n_permutations == 0) throw DataError("covariate test needs at least one permutation");
  const auto& xs = sample.covariate(covariate).values;

  TestReport report;
  report.method = TestMethod::covariate_cm;
  report.calibration = Calibration::permutation;
  report.n_permutations = n_permutations;
  report.seed = seed;

  const auto nu = detail::cure_proxy(sample);
  const auto layout = rank_layout(xs);
  const auto centered = centered_in_order(nu, layout.order);
  const double observed = cvm_sorted(centered, layout.group_ends);
  report.statistic = observed;
  report.details = {{"n", static_cast<double>(sample.size())},
                    {"distinct_covariate_values", static_cast<double>(layout.group_ends.size())}};

  const bool constant_marks =
      std::all_of(nu.begin(), nu.end(), [&](double v) { return v == nu.front(); });
  if (constant_marks) {
    report.p_value = 1.0;
    report.warning = "cure proxy is constant (no censored subjects); test is degenerate";
    return report;
  }

  // Permuting the covariate relative to (T, delta) is equivalent to permuting
  // the marks over the fixed covariate ranks.
  const double threshold = observed * (1.0 - 1e-10);
  std::size_t at_least = 0;
  std::vector<double> permuted(centered.size());
  for (std::size_t r = 0; r < n_permutations; ++r) {
    auto engine = substream(seed, r);
    permuted = centered;
    std::shuffle(permuted.begin(), permuted.end(), engine);
    if (cvm_sorted(permuted, layout.group_ends) >= threshold) ++at_least;
  }
  report.p_value = static_cast<double>(1 + at_least) / static_cast<double>(n_permutations + 1);
  return report;
}

}  // namespace curesurv
