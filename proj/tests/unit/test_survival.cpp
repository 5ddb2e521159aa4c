#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "curesurv/error.hpp"
#include "curesurv/survival.hpp"
#include "support.hpp"

using namespace curesurv;
using Catch::Matchers::WithinAbs;

TEST_CASE("km_fit hand example", "[survival]") {
  const SurvivalSample s({1.0, 2.0, 3.0}, {1, 0, 1});
  const auto km = km_fit(s);
  REQUIRE(km.jump_times == std::vector<double>{1.0, 3.0});
  CHECK_THAT(km.values[0], WithinAbs(2.0 / 3.0, 1e-15));
  CHECK(km.values[1] == 0.0);
  CHECK(curve_eval(km, 0.0) == 1.0);
  CHECK_THAT(curve_eval(km, 2.5), WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THAT(curve_eval(km, 1.0), WithinAbs(2.0 / 3.0, 1e-15));  // right-continuous
  CHECK(curve_eval(km, 0.999) == 1.0);
  CHECK(curve_eval(km, 100.0) == 0.0);
}

TEST_CASE("km_fit without events is flat", "[survival]") {
  const auto km = km_fit(SurvivalSample({1.0, 4.0, 2.0}, {0, 0, 0}));
  CHECK(km.jump_times.empty());
  CHECK(curve_eval(km, 10.0) == 1.0);
}

TEST_CASE("km_fit puts events before censorings at tied times", "[survival]") {
  // At t = 2 one event and one censoring: the censored subject is still at risk.
  const auto km = km_fit(SurvivalSample({1.0, 2.0, 2.0, 3.0}, {1, 0, 1, 1}));
  CHECK_THAT(curve_eval(km, 2.0), WithinAbs(0.75 * (2.0 / 3.0), 1e-15));
}

TEST_CASE("km_fit agrees with the textbook estimator", "[survival][property]") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto s = testing_support::random_sample(seed, 80, 0.35, /*integer_times=*/seed % 2 == 0);
    const auto km = km_fit(s);
    double previous = 1.0;
    for (std::size_t j = 0; j < km.jump_times.size(); ++j) {
      CHECK_THAT(km.values[j], WithinAbs(testing_support::km_brute_force(s, km.jump_times[j]), 1e-12));
      CHECK(km.values[j] <= previous);
      CHECK(km.values[j] >= 0.0);
      previous = km.values[j];
    }
  }
}

TEST_CASE("km_fit on uncensored data is the empirical survivor function", "[survival][property]") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = testing_support::random_sample(seed, 60, 0.0, seed % 2 == 1);
    const auto km = km_fit(s);
    for (double t : km.jump_times) {
      CHECK_THAT(curve_eval(km, t), WithinAbs(testing_support::empirical_survivor(s, t), 1e-12));
    }
  }
}

TEST_CASE("beran_fit hand example", "[survival]") {
  const SurvivalSample s({1.0, 2.0}, {1, 1});
  const std::vector<double> w{0.8, 0.2};
  const auto curve = beran_fit(s, w);
  REQUIRE(curve.jump_times == std::vector<double>{1.0, 2.0});
  CHECK_THAT(curve.values[0], WithinAbs(0.2, 1e-15));
  CHECK(curve.values[1] == 0.0);
}

TEST_CASE("beran_fit limits", "[survival]") {
  SECTION("huge bandwidth reproduces Kaplan-Meier") {
    const auto s = testing_support::random_sample(9, 120, 0.3);
    const auto km = km_fit(s);
    const auto beran = beran_fit(s, "x", 5.0, Kernel::epanechnikov, Bandwidth(1e9));
    REQUIRE(beran.jump_times == km.jump_times);
    for (std::size_t j = 0; j < km.values.size(); ++j) CHECK_THAT(beran.values[j], WithinAbs(km.values[j], 1e-10));
  }
  SECTION("no events") {
    const SurvivalSample s({1.0, 2.0}, {0, 0});
    CHECK(curve_eval(beran_fit(s, std::vector<double>{0.5, 0.5}), 5.0) == 1.0);
  }
}

TEST_CASE("beran_fit agrees with the weighted textbook estimator", "[survival][property]") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto s = testing_support::random_sample(100 + seed, 150, 0.3, seed % 3 == 0);
    const double x = 1.0 + 0.25 * static_cast<double>(seed);
    const auto w = covariate_weights(s, "x", x, Kernel::epanechnikov, Bandwidth(2.0));
    const auto curve = beran_fit(s, w);
    double previous = 1.0;
    for (std::size_t j = 0; j < curve.jump_times.size(); ++j) {
      CHECK_THAT(curve.values[j], WithinAbs(testing_support::beran_brute_force(s, w, curve.jump_times[j]), 1e-12));
      CHECK(curve.values[j] <= previous);
      previous = curve.values[j];
    }
    const auto t_max = *last_uncensored_time(s);
    const auto order = detail::survival_order(s.times(), s.deltas());
    CHECK_THAT(detail::beran_value_at(s.times(), s.deltas(), order, w, t_max),
               WithinAbs(curve_eval(curve, t_max), 1e-14));
  }
}

TEST_CASE("beran_fit uses exact matching for binary covariates", "[survival]") {
  const auto s = testing_support::random_sample(4, 100, 0.3);
  const auto curve = beran_fit(s, "sex", 1.0, Kernel::epanechnikov, Bandwidth(1.0));
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.covariate("sex").values[i] == 1.0) rows.push_back(i);
  }
  const auto km_women = km_fit(s.subset(rows));
  REQUIRE(curve.jump_times == km_women.jump_times);
  for (std::size_t j = 0; j < curve.values.size(); ++j) CHECK_THAT(curve.values[j], WithinAbs(km_women.values[j], 1e-12));
}

TEST_CASE("stratified weights smooth within the stratum", "[survival]") {
  const auto s = testing_support::random_sample(8, 200, 0.3);
  const Stratum women{"sex", 1.0};
  const auto w = covariate_weights(s, "x", 5.0, Kernel::epanechnikov, Bandwidth(1e9), women);
  const auto& sex = s.covariate("sex").values;
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (sex[i] == 0.0) CHECK(w[i] == 0.0);
    total += w[i];
  }
  CHECK_THAT(total, WithinAbs(1.0, 1e-12));
  CHECK_THROWS_AS(covariate_weights(s, "x", 5.0, Kernel::epanechnikov, Bandwidth(1.0), Stratum{"x", 1.0}),
                  DataError);
}

TEST_CASE("beran_fit propagates empty neighborhoods", "[survival]") {
  const auto s = testing_support::random_sample(1, 50, 0.3);
  CHECK_THROWS_AS(beran_fit(s, "x", 500.0, Kernel::epanechnikov, Bandwidth(1.0)), EmptyNeighborhoodError);
}

TEST_CASE("flipping the largest observation to an event lowers the plateau", "[survival][property]") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto s = testing_support::random_sample(seed, 40, 0.5);
    std::size_t last = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.times()[i] > s.times()[last]) last = i;
    }
    std::vector<int> flipped(s.deltas().begin(), s.deltas().end());
    std::vector<int> censored = flipped;
    censored[last] = 0;
    flipped[last] = 1;
    const std::vector<double> times(s.times().begin(), s.times().end());
    const auto before = km_fit(SurvivalSample(times, censored));
    const auto after = km_fit(SurvivalSample(times, flipped));
    CHECK(curve_eval(after, 1e12) <= curve_eval(before, 1e12));
  }
}

TEST_CASE("write_curve emits t,s rows", "[survival]") {
  std::ostringstream out;
  write_curve(out, km_fit(SurvivalSample({1.0, 2.0, 3.0}, {1, 0, 1})));
  CHECK(out.str() == "t,s\n1,0.6666666667\n3,0\n");
}
