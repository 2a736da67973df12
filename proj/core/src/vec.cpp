#include "robustdiff/vec.hpp"

#include <cmath>
#include <stdexcept>

namespace robustdiff {

namespace {

[[noreturn]] void shape_error(const std::string& what) {
  throw std::invalid_argument("shape mismatch: " + what);
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) shape_error("from_rows: ragged rows");
    m.set_row(i, rows[i]);
  }
  return m;
}

Vector Matrix::row_vector(std::size_t i) const {
  auto r = row(i);
  return Vector(r.begin(), r.end());
}

void Matrix::set_row(std::size_t i, std::span<const double> values) {
  if (values.size() != cols_) shape_error("set_row: length != cols");
  auto r = row(i);
  std::copy(values.begin(), values.end(), r.begin());
}

Vector gemv(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) shape_error("gemv: cols(a) != len(x)");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  require_finite(y, "gemv result");
  return y;
}

void axpy(double alpha, const Vector& x, Vector& y) {
  if (x.size() != y.size()) shape_error("axpy: len(x) != len(y)");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
  require_finite(y, "axpy result");
}

Vector elementwise(const std::function<double(double, double)>& op, const Vector& a,
                   const Vector& b) {
  if (a.size() != b.size()) shape_error("elementwise: len(a) != len(b)");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = op(a[i], b[i]);
  require_finite(out, "elementwise result");
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) shape_error("matmul: cols(a) != rows(b)");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const auto brow = b.row(k);
      auto crow = c.row(i);
      for (std::size_t j = 0; j < brow.size(); ++j) crow[j] += aik * brow[j];
    }
  }
  require_finite(c.data(), "matmul result");
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) shape_error("matmul_nt: cols(a) != cols(b)");
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto arow = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto brow = b.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < arow.size(); ++k) acc += arow[k] * brow[k];
      c(i, j) = acc;
    }
  }
  require_finite(c.data(), "matmul_nt result");
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) shape_error("matmul_tn: rows(a) != rows(b)");
  Matrix c(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const auto arow = a.row(k);
    const auto brow = b.row(k);
    for (std::size_t i = 0; i < arow.size(); ++i) {
      const double aki = arow[i];
      auto crow = c.row(i);
      for (std::size_t j = 0; j < brow.size(); ++j) crow[j] += aki * brow[j];
    }
  }
  require_finite(c.data(), "matmul_tn result");
  return c;
}

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_finite(std::span<const double> values, const std::string& what) {
  if (!all_finite(values)) throw std::domain_error("non-finite values in " + what);
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) shape_error("dot: len(a) != len(b)");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double squared_norm(std::span<const double> values) {
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return acc;
}

}  // namespace robustdiff
