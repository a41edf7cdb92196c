#include "gap/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gap/errors.hpp"

namespace gap {

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<Triplet> entries)
    : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw validation_error("sparse: dimensions must be nonnegative");
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_ptr_.assign(rows + 1, 0);
  cols_idx_.reserve(entries.size());
  values_.reserve(entries.size());
  int prev_row = -1, prev_col = -1;
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw validation_error("sparse: entry (" + std::to_string(t.row) + "," +
                             std::to_string(t.col) + ") out of range");
    if (t.row == prev_row && t.col == prev_col)
      throw validation_error("sparse: duplicate entry at (" + std::to_string(t.row) + "," +
                             std::to_string(t.col) + ")");
    if (!std::isfinite(t.value) || t.value == 0.0)
      throw validation_error("sparse: entries must be finite and nonzero");
    cols_idx_.push_back(t.col);
    values_.push_back(t.value);
    ++row_ptr_[t.row + 1];
    prev_row = t.row;
    prev_col = t.col;
  }
  for (int r = 0; r < rows; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) s += values_[p] * x[cols_idx_[p]];
    y[r] = s;
  }
}

Matrix SparseMatrix::multiply_dense(const Matrix& dense) const {
  if (dense.rows() != cols_)
    throw validation_error("sparse multiply: shape mismatch");
  Matrix out(rows_, dense.cols());
  for (int r = 0; r < rows_; ++r) {
    double* orow = out.row(r);
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      const double v = values_[p];
      const double* drow = dense.row(cols_idx_[p]);
      for (int j = 0; j < dense.cols(); ++j) orow[j] += v * drow[j];
    }
  }
  return out;
}

Matrix SparseMatrix::to_dense() const {
  Matrix out(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    auto cs = row_cols(r);
    auto vs = row_values(r);
    for (std::size_t p = 0; p < cs.size(); ++p) out(r, cs[p]) = vs[p];
  }
  return out;
}

double SparseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

bool SparseMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (int r = 0; r < rows_; ++r) {
    auto cs = row_cols(r);
    auto vs = row_values(r);
    for (std::size_t p = 0; p < cs.size(); ++p) {
      const int c = cs[p];
      auto ccols = row_cols(c);
      auto it = std::lower_bound(ccols.begin(), ccols.end(), r);
      if (it == ccols.end() || *it != r) return false;
      const double mirror = row_values(c)[it - ccols.begin()];
      if (std::abs(mirror - vs[p]) > tol) return false;
    }
  }
  return true;
}

}  // namespace gap
