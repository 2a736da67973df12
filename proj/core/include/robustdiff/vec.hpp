#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace robustdiff {

/// Dense double-precision vector. All public operations in this module check
/// shapes and reject non-finite results; there is no implicit broadcasting.
using Vector = std::vector<double>;

/// Dense row-major matrix with explicit dimensions.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  /// Builds a matrix from whole rows; every row must have the same length.
  static Matrix from_rows(const std::vector<Vector>& rows);

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  Vector row_vector(std::size_t i) const;
  void set_row(std::size_t i, std::span<const double> values);

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Matrix-vector product a*x. Throws on shape mismatch or non-finite result.
Vector gemv(const Matrix& a, const Vector& x);

/// y += alpha * x, in place. Throws on shape mismatch.
void axpy(double alpha, const Vector& x, Vector& y);

/// Element-wise combination of two equally-sized vectors.
Vector elementwise(const std::function<double(double, double)>& op, const Vector& a,
                   const Vector& b);

/// c = a * b. Shapes: (m x k) * (k x n) -> (m x n).
Matrix matmul(const Matrix& a, const Matrix& b);

/// c = a * b^T. Shapes: (m x k) * (n x k) -> (m x n). This is the layout used
/// by the dense layers, whose weights are stored as (out x in).
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// c = a^T * b. Shapes: (k x m) * (k x n) -> (m x n).
Matrix matmul_tn(const Matrix& a, const Matrix& b);

bool all_finite(std::span<const double> values);

/// Throws std::domain_error mentioning `what` if any entry is NaN/Inf.
void require_finite(std::span<const double> values, const std::string& what);

double dot(const Vector& a, const Vector& b);
double squared_norm(std::span<const double> values);

}  // namespace robustdiff
