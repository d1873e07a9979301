#pragma once

#include "mgcn/dense.hpp"
#include "mgcn/sparse.hpp"

namespace mgcn {

// Dense kernels. All are row-parallel over the output, so results are
// bitwise identical for any thread count.

/// C = A * B
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// C = A * B^T
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

/// C = A^T * B
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);

/// Y = S * X for CSR S. Each output entry sums its terms in a canonical
/// (value-sorted) order, so the result is invariant to the storage order
/// of equivalent rows.
DenseMatrix spmm(const CsrMatrix& s, const DenseMatrix& x);

/// Entrywise stable sigmoid.
DenseMatrix elementwise_sigmoid(const DenseMatrix& x);
double sigmoid(double x);

/// Row-wise softmax with max subtraction.
DenseMatrix row_softmax(const DenseMatrix& x);

/// Entrywise max(x, 0).
DenseMatrix relu(const DenseMatrix& x);

/// g masked by the positive entries of the pre-activation.
DenseMatrix relu_backward(const DenseMatrix& pre, const DenseMatrix& g);

namespace ref {
// Serial naive implementations kept as test oracles and benchmark baselines.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix spmm(const CsrMatrix& s, const DenseMatrix& x);
}  // namespace ref

}  // namespace mgcn
