#include "optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace curesurv::detail {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Dense row-major inverse-Hessian approximation.
struct Metric {
  std::size_t n;
  std::vector<double> h;

  explicit Metric(std::size_t dim, double scale = 1.0) : n(dim), h(dim * dim, 0.0) { reset(scale); }

  void reset(double scale) {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) h[i * n + i] = scale;
  }

  std::vector<double> apply(std::span<const double> v) const {
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) out[i] = dot(std::span(h).subspan(i * n, n), v);
    return out;
  }

  // BFGS update of the inverse Hessian of the minimization objective.
  void update(std::span<const double> s, std::span<const double> y) {
    const double sy = dot(s, y);
    if (!(sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y)))) return;
    const double rho = 1.0 / sy;
    const auto hy = apply(y);
    const double yhy = dot(y, hy);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
      }
    }
  }
};

}  // namespace

std::vector<double> central_gradient(const Objective& f, std::span<const double> x, double relative_step,
                                     std::span<const double> scale) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = relative_step * std::max(1.0, std::abs(x[i])) / (scale.empty() ? 1.0 : scale[i]);
    probe[i] = x[i] + step;
    const double up = f(probe);
    probe[i] = x[i] - step;
    const double down = f(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

AscentResult maximize_bfgs(const Objective& f, std::vector<double> x0, const AscentOptions& options) {
  AscentResult result;
  result.x = std::move(x0);
  result.value = f(result.x);
  if (!std::isfinite(result.value)) return result;

  const std::size_t n = result.x.size();
  auto grad = central_gradient(f, result.x, options.relative_step, options.coordinate_scale);
  Metric metric(n, 1.0 / std::max(1.0, max_abs(grad)));
  bool restarted = false;
  bool first_update = true;

  while (result.iterations < options.max_iter) {
    auto direction = metric.apply(grad);
    double slope = dot(grad, direction);
    if (!(slope > 0.0)) {
      metric.reset(1.0 / std::max(1.0, max_abs(grad)));
      direction = metric.apply(grad);
      slope = dot(grad, direction);
      first_update = true;
    }

    std::vector<double> trial(n);
    double trial_value = -INFINITY;
    bool accepted = false;
    for (double step = 1.0; step > 1e-16; step *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = result.x[i] + step * direction[i];
      trial_value = f(trial);
      if (std::isfinite(trial_value) && trial_value >= result.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }

    if (!accepted) {
      if (max_abs(grad) < options.gradient_tol) {
        result.converged = true;
        break;
      }
      if (restarted) break;
      metric.reset(1.0 / std::max(1.0, max_abs(grad)));
      restarted = true;
      first_update = true;
      continue;
    }

    ++result.iterations;
    const double gain = trial_value - result.value;
    auto new_grad = central_gradient(f, trial, options.relative_step, options.coordinate_scale);
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial[i] - result.x[i];
      y[i] = grad[i] - new_grad[i];  // gradient change of the negated objective
    }
    if (first_update) {
      const double yy = dot(y, y);
      const double sy = dot(s, y);
      if (yy > 0.0 && sy > 0.0) metric.reset(sy / yy);
      first_update = false;
    }
    metric.update(s, y);
    result.x = std::move(trial);
    result.value = trial_value;
    grad = std::move(new_grad);

    if (gain < options.tol) {
      if (max_abs(grad) < options.gradient_tol || restarted) {
        result.converged = true;
        break;
      }
      metric.reset(1.0 / std::max(1.0, max_abs(grad)));
      restarted = true;
      first_update = true;
    } else {
      restarted = false;
    }
  }
  return result;
}

}  // namespace curesurv::detail
