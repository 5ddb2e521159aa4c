#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "curesurv/error.hpp"
#include "curesurv/simulation.hpp"
#include "curesurv/survival.hpp"

using namespace curesurv;
using Catch::Matchers::WithinAbs;

namespace {

SimulationSpec exponential_spec(std::size_t n, double event_rate, double censor_rate, std::uint64_t seed) {
  SimulationSpec spec;
  spec.n = n;
  spec.incidence.fixed = 1.0;
  spec.latency.gamma0 = -std::log(event_rate);  // scale 1 / rate with k = 1
  spec.latency.shape_k = 1.0;
  spec.censoring.kind = SimulationSpec::Censoring::Kind::exponential;
  spec.censoring.parameter = censor_rate;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("uncensored share under competing exponentials", "[simulation]") {
  // P(Y <= C) = mu / (mu + c).
  const std::size_t n = 20000;
  const auto sim = simulate(exponential_spec(n, 0.3, 0.1, 9));
  const double expected = 0.3 / 0.4;
  const double share = static_cast<double>(sim.sample.uncensored_count()) / static_cast<double>(n);
  const double se = std::sqrt(expected * (1.0 - expected) / static_cast<double>(n));
  CHECK(std::abs(share - expected) < 3.0 * se);
}

TEST_CASE("incidence fixed at zero censors everyone at C", "[simulation]") {
  auto spec = exponential_spec(500, 0.3, 0.1, 1);
  spec.incidence.fixed = 0.0;
  const auto sim = simulate(spec);
  CHECK(sim.sample.uncensored_count() == 0);
  for (std::size_t i = 0; i < sim.sample.size(); ++i) {
    CHECK(sim.sample.times()[i] == sim.truth[i].censoring_time);
    CHECK(std::isinf(sim.truth[i].event_time));
    CHECK(sim.truth[i].susceptible == 0);
  }
}

TEST_CASE("cured subjects are never uncensored", "[simulation]") {
  SimulationSpec spec;
  spec.n = 2000;
  spec.incidence.intercept = 1.0;
  spec.incidence.coefs = {{"age", -0.02}, {"sex", 0.5}};
  spec.latency.gamma0 = 0.5;
  spec.latency.shape_k = 2.0;
  spec.censoring.kind = SimulationSpec::Censoring::Kind::uniform;
  spec.censoring.parameter = 20.0;
  spec.seed = 3;
  const auto sim = simulate(spec);
  double susceptible = 0.0, mean_p = 0.0;
  for (std::size_t i = 0; i < sim.sample.size(); ++i) {
    const auto& r = sim.truth[i];
    if (r.susceptible == 0) CHECK(sim.sample.deltas()[i] == 0);
    CHECK(sim.sample.times()[i] == std::min(r.event_time, r.censoring_time));
    CHECK(sim.sample.times()[i] <= 20.0);
    const std::map<std::string, double> x{{"age", sim.sample.covariate("age").values[i]},
                                          {"sex", sim.sample.covariate("sex").values[i]}};
    CHECK(r.incidence == true_incidence(spec, x));
    susceptible += r.susceptible;
    mean_p += r.incidence;
  }
  // Susceptible share concentrates on the average incidence.
  const double n = static_cast<double>(spec.n);
  CHECK(std::abs(susceptible / n - mean_p / n) < 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("simulate is deterministic in the seed", "[simulation]") {
  const auto spec = exponential_spec(300, 0.5, 0.2, 77);
  const auto a = simulate(spec);
  const auto b = simulate(spec);
  CHECK(std::equal(a.sample.times().begin(), a.sample.times().end(), b.sample.times().begin()));
  CHECK(a.sample.covariate("age").values == b.sample.covariate("age").values);
  auto other = spec;
  other.seed = 78;
  const auto c = simulate(other);
  CHECK_FALSE(std::equal(a.sample.times().begin(), a.sample.times().end(), c.sample.times().begin()));
  // Subject streams are independent of n.
  auto longer = spec;
  longer.n = 400;
  const auto d = simulate(longer);
  CHECK(std::equal(a.sample.times().begin(), a.sample.times().end(), d.sample.times().begin()));
}

TEST_CASE("Kaplan-Meier of an uncensored Weibull cohort matches the law", "[simulation]") {
  SimulationSpec spec;
  spec.n = 5000;
  spec.incidence.fixed = 1.0;
  spec.latency.gamma0 = 0.8;
  spec.latency.shape_k = 1.7;
  spec.censoring.kind = SimulationSpec::Censoring::Kind::none;
  spec.seed = 12;
  const auto sim = simulate(spec);
  CHECK(sim.sample.uncensored_count() == spec.n);
  const auto km = km_fit(sim.sample);
  const std::map<std::string, double> x{{"age", 50.0}, {"sex", 0.0}};
  double sup = 0.0, left = 1.0;
  for (std::size_t j = 0; j < km.jump_times.size(); ++j) {
    const double truth = true_latency_survival(spec, km.jump_times[j], x);
    sup = std::max({sup, std::abs(km.values[j] - truth), std::abs(left - truth)});
    left = km.values[j];
  }
  CHECK(sup < 0.05);
}

TEST_CASE("cure fraction plateau approaches 1 - p", "[simulation]") {
  SimulationSpec spec;
  spec.n = 5000;
  spec.incidence.fixed = 0.6;
  spec.latency.gamma0 = 0.0;
  spec.latency.shape_k = 1.5;
  spec.censoring.kind = SimulationSpec::Censoring::Kind::uniform;
  spec.censoring.parameter = 15.0;
  spec.seed = 5;
  const auto sim = simulate(spec);
  const auto km = km_fit(sim.sample);
  CHECK_THAT(curve_eval(km, 1e9), WithinAbs(0.4, 0.03));
  CHECK_THAT(true_population_survival(spec, 1e9, {{"age", 0.0}, {"sex", 0.0}}), WithinAbs(0.4, 1e-15));
}

TEST_CASE("validate rejects impossible specifications", "[simulation]") {
  auto spec = exponential_spec(10, 1.0, 1.0, 0);
  spec.n = 0;
  CHECK_THROWS_AS(simulate(spec), DataError);
  spec = exponential_spec(10, 1.0, 1.0, 0);
  spec.censoring.kind = SimulationSpec::Censoring::Kind::none;
  spec.incidence.fixed = 0.7;
  CHECK_THROWS_AS(simulate(spec), DataError);
  spec = exponential_spec(10, 1.0, 1.0, 0);
  spec.latency.coefs = {{"bmi", 0.1}};
  CHECK_THROWS_AS(simulate(spec), DataError);
  spec = exponential_spec(10, 1.0, 1.0, 0);
  spec.censoring.parameter = -1.0;
  CHECK_THROWS_AS(simulate(spec), DataError);
  spec = exponential_spec(10, 1.0, 1.0, 0);
  spec.incidence.fixed = 1.5;
  CHECK_THROWS_AS(simulate(spec), DataError);
}

TEST_CASE("write_truth formats infinite latent times", "[simulation]") {
  std::ostringstream out;
  write_truth(out, {TruthRecord{0, std::numeric_limits<double>::infinity(), 2.5, 0.25}});
  CHECK(out.str() == "B,Y,C,p\n0,inf,2.5,0.25\n");
}
