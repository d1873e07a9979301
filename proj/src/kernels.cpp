#include "mgcn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mgcn {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw Error("matmul: inner dimension mismatch");
  const std::int64_t n = static_cast<std::int64_t>(a.rows());
  const std::size_t k = a.cols(), m = b.cols();
  DenseMatrix c(a.rows(), m);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    double* ci = c.row(static_cast<std::size_t>(i));
    const double* ai = a.row(static_cast<std::size_t>(i));
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      const double* bp = b.row(p);
      for (std::size_t j = 0; j < m; ++j) ci[j] += av * bp[j];
    }
  }
  return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) throw Error("matmul_nt: inner dimension mismatch");
  const std::int64_t n = static_cast<std::int64_t>(a.rows());
  const std::size_t k = a.cols(), m = b.rows();
  DenseMatrix c(a.rows(), m);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const double* ai = a.row(static_cast<std::size_t>(i));
    double* ci = c.row(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < m; ++j) {
      const double* bj = b.row(j);
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
      ci[j] = acc;
    }
  }
  return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw Error("matmul_tn: inner dimension mismatch");
  const std::int64_t n = static_cast<std::int64_t>(a.cols());
  const std::size_t k = a.rows(), m = b.cols();
  DenseMatrix c(a.cols(), m);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    double* ci = c.row(static_cast<std::size_t>(i));
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a(p, static_cast<std::size_t>(i));
      if (av == 0.0) continue;
      const double* bp = b.row(p);
      for (std::size_t j = 0; j < m; ++j) ci[j] += av * bp[j];
    }
  }
  return c;
}

DenseMatrix spmm(const CsrMatrix& s, const DenseMatrix& x) {
  if (s.cols != x.rows()) throw Error("spmm: inner dimension mismatch");
  const std::int64_t n = static_cast<std::int64_t>(s.rows);
  const std::size_t m = x.cols();
  DenseMatrix y(s.rows, m);
#pragma omp parallel
  {
    std::vector<double> terms;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const std::size_t lo = s.row_ptr[static_cast<std::size_t>(i)];
      const std::size_t hi = s.row_ptr[static_cast<std::size_t>(i) + 1];
      double* yi = y.row(static_cast<std::size_t>(i));
      for (std::size_t j = 0; j < m; ++j) {
        terms.clear();
        for (std::size_t p = lo; p < hi; ++p)
          terms.push_back(s.values[p] * x(s.col_idx[p], j));
        // Canonical accumulation order: the sum depends only on the
        // multiset of terms, not on column storage order.
        std::sort(terms.begin(), terms.end());
        double acc = 0.0;
        for (double t : terms) acc += t;
        yi[j] = acc;
      }
    }
  }
  return y;
}

double sigmoid(double x) {
  double r;
  if (x >= 0.0) {
    r = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    r = e / (1.0 + e);
  }
  // Keep the output strictly inside (0,1) even when exp underflows.
  if (r == 0.0) return std::numeric_limits<double>::denorm_min();
  if (r == 1.0) return std::nextafter(1.0, 0.0);
  return r;
}

DenseMatrix elementwise_sigmoid(const DenseMatrix& x) {
  DenseMatrix y(x.rows(), x.cols());
  const std::int64_t total = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < total; ++i)
    y.data()[i] = sigmoid(x.data()[i]);
  return y;
}

DenseMatrix row_softmax(const DenseMatrix& x) {
  DenseMatrix y(x.rows(), x.cols());
  const std::int64_t n = static_cast<std::int64_t>(x.rows());
  const std::size_t m = x.cols();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const double* xi = x.row(static_cast<std::size_t>(i));
    double* yi = y.row(static_cast<std::size_t>(i));
    double mx = xi[0];
    for (std::size_t j = 1; j < m; ++j) mx = std::max(mx, xi[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      yi[j] = std::exp(xi[j] - mx);
      sum += yi[j];
    }
    for (std::size_t j = 0; j < m; ++j) yi[j] /= sum;
  }
  return y;
}

DenseMatrix relu(const DenseMatrix& x) {
  DenseMatrix y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i)
    y.data()[i] = x.data()[i] > 0.0 ? x.data()[i] : 0.0;
  return y;
}

DenseMatrix relu_backward(const DenseMatrix& pre, const DenseMatrix& g) {
  if (!pre.same_shape(g)) throw Error("relu_backward: shape mismatch");
  DenseMatrix out(g.rows(), g.cols());
  for (std::size_t i = 0; i < g.size(); ++i)
    out.data()[i] = pre.data()[i] > 0.0 ? g.data()[i] : 0.0;
  return out;
}

namespace ref {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw Error("matmul: inner dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) acc += a(i, p) * b(p, j);
      c(i, j) = acc;
    }
  return c;
}

DenseMatrix spmm(const CsrMatrix& s, const DenseMatrix& x) {
  if (s.cols != x.rows()) throw Error("spmm: inner dimension mismatch");
  DenseMatrix y(s.rows, x.cols());
  for (std::size_t i = 0; i < s.rows; ++i)
    for (std::size_t p = s.row_ptr[i]; p < s.row_ptr[i + 1]; ++p)
      for (std::size_t j = 0; j < x.cols(); ++j)
        y(i, j) += s.values[p] * x(s.col_idx[p], j);
  return y;
}

}  // namespace ref
}  // namespace mgcn
