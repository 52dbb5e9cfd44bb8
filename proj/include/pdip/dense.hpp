#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "pdip/precision.hpp"

namespace pdip {

using precision::Real;
using Vector = std::vector<Real>;

// Small row-major dense matrix. Kernels index it directly so that every
// floating-point operation happens in an order visible at the call site.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const Real> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Real& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  Real operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Vector column(std::size_t j) const;
  Vector row(std::size_t i) const;
  Matrix transpose() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

Vector make_vector(std::initializer_list<double> values);
std::vector<double> to_doubles(std::span<const Real> v);
Vector from_doubles(std::span<const double> v);

// Products and norms below accumulate in ascending index order under the
// active precision.
Vector multiply(const Matrix& a, std::span<const Real> x);
Vector multiply_transposed(const Matrix& a, std::span<const Real> x);  // a^T x
Matrix multiply(const Matrix& a, const Matrix& b);
Real dot(std::span<const Real> a, std::span<const Real> b);

// Norms are measurement helpers and are evaluated in native double.
double norm2(std::span<const Real> v);
double norm_inf(std::span<const Real> v);
double norm_inf(const Matrix& a);  // max row sum
double max_abs(const Matrix& a);

Matrix abs(const Matrix& a);
bool is_symmetric(const Matrix& a, double tol = 0.0);

}  // namespace pdip
