#pragma once

#include <functional>
#include <span>
#include <vector>

namespace curesurv::detail {

using Objective = std::function<double(std::span<const double>)>;

/// Central differences with step relative_step * max(1, |x_i|) / scale_i
/// (scale_i = 1 when `scale` is empty).
std::vector<double> central_gradient(const Objective& f, std::span<const double> x, double relative_step,
                                     std::span<const double> scale = {});

struct AscentOptions {
  int max_iter = 500;
  double tol = 1e-8;            // stop when the objective gain per iteration falls below this
  double gradient_tol = 1e-3;   // gain-based stops with a larger gradient restart the metric once
  double relative_step = 1e-5;  // finite-difference step
  std::vector<double> coordinate_scale;  // per-coordinate step divisors, empty for none
};

struct AscentResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// BFGS maximization of `f` with backtracking (Armijo) line search.
/// Non-finite objective values are treated as infeasible and shrink the step.
AscentResult maximize_bfgs(const Objective& f, std::vector<double> x0, const AscentOptions& options);

}  // namespace curesurv::detail
