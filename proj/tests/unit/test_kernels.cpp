#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include "curesurv/error.hpp"
#include "curesurv/kernels.hpp"

using namespace curesurv;
using Catch::Matchers::WithinAbs;

TEST_CASE("kernel_eval values", "[kernels]") {
  CHECK(kernel_eval(Kernel::epanechnikov, 0.0) == 0.75);
  CHECK(kernel_eval(Kernel::epanechnikov, 1.0) == 0.0);
  CHECK(kernel_eval(Kernel::epanechnikov, -1.5) == 0.0);
  CHECK_THAT(kernel_eval(Kernel::gaussian, 0.0), WithinAbs(0.3989422804014327, 1e-15));
  for (double u : {0.1, 0.37, 0.9, 2.5}) {
    CHECK(kernel_eval(Kernel::epanechnikov, u) == kernel_eval(Kernel::epanechnikov, -u));
    CHECK(kernel_eval(Kernel::gaussian, u) == kernel_eval(Kernel::gaussian, -u));
  }
}

TEST_CASE("kernels integrate to one", "[kernels]") {
  // Midpoint rule on [-10, 10].
  for (auto k : {Kernel::epanechnikov, Kernel::gaussian}) {
    const int steps = 200000;
    const double du = 20.0 / steps;
    double total = 0.0;
    for (int i = 0; i < steps; ++i) total += kernel_eval(k, -10.0 + (i + 0.5) * du) * du;
    CHECK_THAT(total, WithinAbs(1.0, 1e-8));
  }
}

TEST_CASE("nw_weights hand example", "[kernels]") {
  const std::vector<double> xs{0.0, 0.5};
  const auto w = nw_weights(Kernel::epanechnikov, Bandwidth(1.0), 0.0, xs);
  CHECK_THAT(w[0], WithinAbs(0.75 / 1.3125, 1e-15));
  CHECK_THAT(w[1], WithinAbs(0.5625 / 1.3125, 1e-15));
}

TEST_CASE("nw_weights limits", "[kernels]") {
  const std::vector<double> same{2.0, 2.0, 2.0};
  for (double v : nw_weights(Kernel::gaussian, Bandwidth(0.3), 2.0, same)) {
    CHECK_THAT(v, WithinAbs(1.0 / 3.0, 1e-15));
  }
  const std::vector<double> spread{0.0, 3.0, 10.0, 55.0};
  for (double v : nw_weights(Kernel::epanechnikov, Bandwidth(1e9), 7.0, spread)) {
    CHECK_THAT(v, WithinAbs(0.25, 1e-12));
  }
}

TEST_CASE("nw_weights signals an empty neighborhood", "[kernels]") {
  const std::vector<double> xs{0.0, 0.5};
  CHECK_THROWS_AS(nw_weights(Kernel::epanechnikov, Bandwidth(0.1), 5.0, xs), EmptyNeighborhoodError);
  CHECK_THROWS_AS(Bandwidth(0.0), DataError);
  CHECK_THROWS_AS(Bandwidth(-1.0), DataError);
}

TEST_CASE("nw_weights properties", "[kernels][property]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 10.0);
  std::uniform_real_distribution<double> bw(0.2, 5.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> xs(30);
    for (auto& v : xs) v = unif(rng);
    const double x = unif(rng);
    const Bandwidth h(bw(rng));
    for (auto k : {Kernel::epanechnikov, Kernel::gaussian}) {
      std::vector<double> w;
      try {
        w = nw_weights(k, h, x, xs);
      } catch (const EmptyNeighborhoodError&) {
        continue;
      }
      CHECK_THAT(std::accumulate(w.begin(), w.end(), 0.0), WithinAbs(1.0, 1e-12));
      CHECK(std::all_of(w.begin(), w.end(), [](double v) { return v >= 0.0; }));
      if (k == Kernel::epanechnikov) {
        for (std::size_t i = 0; i < xs.size(); ++i) CHECK((w[i] == 0.0) == (std::abs(x - xs[i]) >= h.value()));
      }
      // Permutation equivariance.
      std::vector<std::size_t> perm(xs.size());
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<double> shuffled(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) shuffled[i] = xs[perm[i]];
      const auto ws = nw_weights(k, h, x, shuffled);
      for (std::size_t i = 0; i < xs.size(); ++i) CHECK_THAT(ws[i], WithinAbs(w[perm[i]], 1e-15));
    }
  }
}

TEST_CASE("binary_weights", "[kernels]") {
  const std::vector<double> xs{1.0, 0.0, 1.0};
  const auto w = binary_weights(1.0, xs);
  CHECK(w == std::vector<double>{0.5, 0.0, 0.5});
  CHECK_THROWS_AS(binary_weights(0.0, std::vector<double>{1.0, 1.0}), EmptyNeighborhoodError);
  const std::vector<double> mixed{0, 1, 1, 0, 0, 1, 0};
  for (double x : {0.0, 1.0}) {
    const auto v = binary_weights(x, mixed);
    CHECK_THAT(std::accumulate(v.begin(), v.end(), 0.0), WithinAbs(1.0, 1e-15));
  }
}
