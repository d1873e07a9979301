#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mgcn {

/// Outcome of comparing an analytic gradient against central differences.
struct GradientReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
  double step = 0.0;
};

/// Central-difference gradient (f(p+h e_i) - f(p-h e_i)) / (2h).
std::vector<double> finite_diff_grad(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> p, double h = 1e-5);

/// Compares an analytic gradient with finite_diff_grad at the same point.
GradientReport check_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& p, const std::vector<double>& analytic,
    double h = 1e-5);

}  // namespace mgcn
