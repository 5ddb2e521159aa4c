#include "curesurv/kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "curesurv/error.hpp"

namespace curesurv {

Kernel parse_kernel(std::string_view name) {
  if (name == "epanechnikov") return Kernel::epanechnikov;
  if (name == "gaussian") return Kernel::gaussian;
  throw DataError(fmt::format("unknown kernel '{}'", name));
}

std::string_view kernel_name(Kernel kernel) {
  return kernel == Kernel::epanechnikov ? "epanechnikov" : "gaussian";
}

Bandwidth::Bandwidth(double h) : h_(h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw DataError(fmt::format("bandwidth must be positive and finite (got {})", h));
  }
}

double kernel_eval(Kernel kernel, double u) {
  switch (kernel) {
    case Kernel::epanechnikov:
      return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case Kernel::gaussian:
      return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  }
  return 0.0;
}

std::vector<double> nw_weights(Kernel kernel, Bandwidth h, double x, std::span<const double> xs) {
  if (xs.empty()) throw DataError("no covariate values to weight");
  const double bw = h.value();
  std::vector<double> w(xs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = x - xs[i];
    // Compare distances directly so the compact support is exact.
    if (kernel == Kernel::epanechnikov && std::abs(d) >= bw) {
      w[i] = 0.0;
    } else {
      w[i] = kernel_eval(kernel, d / bw);
    }
    total += w[i];
  }
  if (!(total > 0.0)) {
    throw EmptyNeighborhoodError(
        fmt::format("no observation within bandwidth {} of x = {}", bw, x));
  }
  for (auto& v : w) v /= total;
  return w;
}

std::vector<double> binary_weights(double x, std::span<const double> xs) {
  if (xs.empty()) throw DataError("no covariate values to weight");
  std::size_t m = 0;
  for (double v : xs) m += (v == x);
  if (m == 0) {
    throw EmptyNeighborhoodError(fmt::format("no observation with covariate value {}", x));
  }
  std::vector<double> w(xs.size(), 0.0);
  const double share = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == x) w[i] = share;
  }
  return w;
}

}  // namespace curesurv
