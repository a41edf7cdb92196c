#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gap {

// Dense row-major matrix of doubles. The whole toolkit runs in 64-bit
// precision; volume divisions and the balance quadratic span large magnitude
// ranges at n = 10^4 and 32-bit floats lose the tail.
class Matrix {
public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row(int r) { return data_.data() + static_cast<std::size_t>(r) * cols_; }
  const double* row(int r) const { return data_.data() + static_cast<std::size_t>(r) * cols_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string shape_str() const;

  bool all_finite() const;
  void fill(double v);

  bool operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Plain (un-taped) kernels. The tape primitives call into these so that the
// recorded forward pass and any direct computation share one code path.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_bt(const Matrix& a, const Matrix& b);  // a * b^T
Matrix matmul_at(const Matrix& a, const Matrix& b);  // a^T * b
Matrix transpose(const Matrix& a);
double frobenius_norm(const Matrix& a);

}  // namespace gap
