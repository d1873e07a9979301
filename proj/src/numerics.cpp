#include "mgcn/numerics.hpp"

#include <cmath>

#include "mgcn/dense.hpp"

namespace mgcn {

std::vector<double> finite_diff_grad(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> p, double h) {
  if (h <= 0.0) throw Error("finite_diff_grad: h must be positive");
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double orig = p[i];
    p[i] = orig + h;
    const double fp = f(p);
    p[i] = orig - h;
    const double fm = f(p);
    p[i] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw Error("finite_diff_grad: non-finite function value");
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

GradientReport check_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& p, const std::vector<double>& analytic,
    double h) {
  if (p.size() != analytic.size())
    throw Error("check_gradient: size mismatch");
  const std::vector<double> numeric = finite_diff_grad(f, p, h);
  GradientReport rep;
  rep.step = h;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double denom =
        std::max({std::fabs(analytic[i]), std::fabs(numeric[i]), 1e-8});
    const double rel = std::fabs(analytic[i] - numeric[i]) / denom;
    if (rel >= rep.max_rel_error) {
      rep.max_rel_error = rel;
      rep.worst_index = i;
      rep.analytic_at_worst = analytic[i];
      rep.numeric_at_worst = numeric[i];
    }
  }
  return rep;
}

}  // namespace mgcn
