#pragma once

#include <span>
#include <vector>

#include "gap/matrix.hpp"

namespace gap {

struct Triplet {
  int row;
  int col;
  double value;
};

// CSR sparse matrix. Built from triplets sorted by (row, col); duplicates and
// explicit zeros are rejected so iteration order is a canonical function of
// the stored pattern.
class SparseMatrix {
public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, std::vector<Triplet> entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const int> row_cols(int r) const {
    return {cols_idx_.data() + row_ptr_[r], cols_idx_.data() + row_ptr_[r + 1]};
  }
  std::span<const double> row_values(int r) const {
    return {values_.data() + row_ptr_[r], values_.data() + row_ptr_[r + 1]};
  }

  // y = A x  (x, y length = cols/rows). Sequential fixed-order accumulation.
  void multiply(std::span<const double> x, std::span<double> y) const;

  // out = A * dense  (dense.rows() == cols()).
  Matrix multiply_dense(const Matrix& dense) const;

  Matrix to_dense() const;
  double frobenius_norm() const;
  bool is_symmetric(double tol = 0.0) const;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_;
  std::vector<int> cols_idx_;
  std::vector<double> values_;
};

}  // namespace gap
