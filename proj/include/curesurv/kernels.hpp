#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace curesurv {

enum class Kernel { epanechnikov, gaussian };

Kernel parse_kernel(std::string_view name);
std::string_view kernel_name(Kernel kernel);

/// Smoothing parameter of a kernel estimator, in covariate units.
class Bandwidth {
public:
  explicit Bandwidth(double h);
  double value() const noexcept { return h_; }
  friend bool operator==(Bandwidth, Bandwidth) = default;

private:
  double h_;
};

/// K(u). Epanechnikov is 0.75 (1 - u^2) on |u| < 1; Gaussian is the standard normal density.
double kernel_eval(Kernel kernel, double u);

/// Nadaraya-Watson weights K_h(x - X_i) / sum_j K_h(x - X_j), in the order of `xs`.
/// Throws EmptyNeighborhoodError when every kernel evaluation is zero.
std::vector<double> nw_weights(Kernel kernel, Bandwidth h, double x, std::span<const double> xs);

/// Exact-match weights for a binary covariate: 1/m on the m entries equal to x.
std::vector<double> binary_weights(double x, std::span<const double> xs);

}  // namespace curesurv
