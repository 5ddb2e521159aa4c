#pragma once

// Shared helpers for the test suites: random samples and brute-force oracles
// that do not go through the library's estimator code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "curesurv/data_model.hpp"

namespace testing_support {

inline curesurv::SurvivalSample random_sample(std::uint64_t seed, std::size_t n, double censor_prob,
                                              bool integer_times = false) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> life(0.2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> times(n);
  std::vector<int> deltas(n);
  curesurv::Covariate x{std::vector<double>(n), curesurv::CovariateKind::continuous};
  curesurv::Covariate sex{std::vector<double>(n), curesurv::CovariateKind::binary};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = life(rng);
    times[i] = integer_times ? std::ceil(t) : t + 1e-9;
    deltas[i] = unit(rng) < censor_prob ? 0 : 1;
    x.values[i] = 10.0 * unit(rng);
    sex.values[i] = unit(rng) < 0.5 ? 0.0 : 1.0;
  }
  curesurv::CovariateMap cov;
  cov.emplace("x", std::move(x));
  cov.emplace("sex", std::move(sex));
  return curesurv::SurvivalSample(std::move(times), std::move(deltas), std::move(cov));
}

/// Textbook Kaplan-Meier at time t: product over distinct event times s <= t of
/// (1 - d(s) / Y(s)), with Y counting subjects whose time is >= s.
inline double km_brute_force(const curesurv::SurvivalSample& sample, double t) {
  std::set<double> event_times;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (sample.deltas()[i] == 1 && sample.times()[i] <= t) event_times.insert(sample.times()[i]);
  }
  double s = 1.0;
  for (double e : event_times) {
    double at_risk = 0.0, deaths = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      if (sample.times()[i] >= e) at_risk += 1.0;
      if (sample.times()[i] == e && sample.deltas()[i] == 1) deaths += 1.0;
    }
    s *= 1.0 - deaths / at_risk;
  }
  return s;
}

/// Weighted analogue: hazard at event time s is (weighted deaths) / (weighted at risk).
inline double beran_brute_force(const curesurv::SurvivalSample& sample, const std::vector<double>& w,
                                double t) {
  std::set<double> event_times;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (sample.deltas()[i] == 1 && w[i] > 0 && sample.times()[i] <= t) event_times.insert(sample.times()[i]);
  }
  double s = 1.0;
  for (double e : event_times) {
    double at_risk = 0.0, deaths = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      if (sample.times()[i] >= e) at_risk += w[i];
      if (sample.times()[i] == e && sample.deltas()[i] == 1) deaths += w[i];
    }
    s *= 1.0 - deaths / at_risk;
  }
  return s;
}

/// Empirical survivor function 1 - F_n(t) of the raw times.
inline double empirical_survivor(const curesurv::SurvivalSample& sample, double t) {
  const auto times = sample.times();
  const auto above = std::count_if(times.begin(), times.end(), [t](double v) { return v > t; });
  return static_cast<double>(above) / static_cast<double>(times.size());
}

}  // namespace testing_support
