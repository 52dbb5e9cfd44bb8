#include "pdip/dense.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace pdip {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    assert(r.size() == cols_);
    for (double v : r) data_.emplace_back(v);
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Real::exact(1.0);
  return m;
}

Matrix Matrix::diagonal(std::span<const Real> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Vector Matrix::row(std::size_t i) const {
  return Vector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vector make_vector(std::initializer_list<double> values) { return Vector(values.begin(), values.end()); }

std::vector<double> to_doubles(std::span<const Real> v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](Real r) { return r.value(); });
  return out;
}

Vector from_doubles(std::span<const double> v) { return Vector(v.begin(), v.end()); }

Vector multiply(const Matrix& a, std::span<const Real> x) {
  assert(a.cols() == x.size());
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Real acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

Vector multiply_transposed(const Matrix& a, std::span<const Real> x) {
  assert(a.rows() == x.size());
  Vector y(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    Real acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) acc += a(i, j) * x[i];
    y[j] = acc;
  }
  return y;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  assert(a.cols() == b.rows());
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Real acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  return c;
}

Real dot(std::span<const Real> a, std::span<const Real> b) {
  assert(a.size() == b.size());
  Real acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const Real> v) {
  double scale = 0.0;
  for (Real x : v) scale = std::max(scale, std::fabs(x.value()));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double ssq = 0.0;
  for (Real x : v) {
    const double r = x.value() / scale;
    ssq += r * r;
  }
  return scale * std::sqrt(ssq);
}

double norm_inf(std::span<const Real> v) {
  double m = 0.0;
  for (Real x : v) m = std::max(m, std::fabs(x.value()));
  return m;
}

double norm_inf(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += std::fabs(a(i, j).value());
    m = std::max(m, s);
  }
  return m;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j).value()));
  return m;
}

Matrix abs(const Matrix& a) {
  Matrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = precision::abs(a(i, j));
  return r;
}

bool is_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::fabs(a(i, j).value() - a(j, i).value()) > tol) return false;
  return true;
}

}  // namespace pdip
