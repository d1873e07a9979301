#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "mgcn/dense.hpp"

namespace mgcn {

/// Binary sparse matrix stored as a sorted, duplicate-free coordinate list.
class SparseBinaryMatrix {
 public:
  using Entry = std::pair<std::uint32_t, std::uint32_t>;

  SparseBinaryMatrix() = default;
  SparseBinaryMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  /// Collects entries; call finalize() before reading.
  void push(std::uint32_t i, std::uint32_t j) {
    if (i >= rows_ || j >= cols_) throw Error("sparse entry out of range");
    entries_.emplace_back(i, j);
  }

  /// Sorts lexicographically and drops duplicates.
  void finalize() {
    std::sort(entries_.begin(), entries_.end());
    entries_.erase(std::unique(entries_.begin(), entries_.end()),
                   entries_.end());
  }

  bool contains(std::uint32_t i, std::uint32_t j) const {
    return std::binary_search(entries_.begin(), entries_.end(), Entry{i, j});
  }

  /// CSR row pointers over the sorted entry list.
  std::vector<std::size_t> row_ptr() const {
    std::vector<std::size_t> ptr(rows_ + 1, 0);
    for (const auto& [i, j] : entries_) ++ptr[i + 1];
    for (std::size_t i = 0; i < rows_; ++i) ptr[i + 1] += ptr[i];
    return ptr;
  }

  DenseMatrix to_dense() const {
    DenseMatrix m(rows_, cols_);
    for (const auto& [i, j] : entries_) m(i, j) = 1.0;
    return m;
  }

  bool operator==(const SparseBinaryMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && entries_ == o.entries_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Entry> entries_;
};

/// Real sparse matrix in CSR form; used for the normalized adjacency.
struct CsrMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<std::size_t> row_ptr;   // size rows+1
  std::vector<std::uint32_t> col_idx; // size nnz, sorted within each row
  std::vector<double> values;         // size nnz

  std::size_t nnz() const { return col_idx.size(); }

  static CsrMatrix identity(std::size_t n) {
    CsrMatrix m;
    m.rows = m.cols = n;
    m.row_ptr.resize(n + 1);
    m.col_idx.resize(n);
    m.values.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      m.row_ptr[i] = i;
      m.col_idx[i] = static_cast<std::uint32_t>(i);
    }
    m.row_ptr[n] = n;
    return m;
  }

  DenseMatrix to_dense() const {
    DenseMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
        m(i, col_idx[p]) = values[p];
    return m;
  }
};

}  // namespace mgcn
