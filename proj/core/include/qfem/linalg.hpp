#pragma once

#include <cstddef>
#include <vector>

#include "qfem/errors.hpp"

namespace qfem {

using Vec = std::vector<double>;

// Dense row-major matrix. Everything in this project is small enough
// (a few thousand rows at most) that dense storage is the right call.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  const std::vector<double>& storage() const { return data_; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vec operator*(const Matrix& a, const Vec& x);
Matrix transpose(const Matrix& a);
Matrix outer(const Vec& a, const Vec& b);

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double frobenius_norm(const Matrix& a);
bool all_finite(const Vec& a);
bool all_finite(const Matrix& a);

// Eigenvalues descending; eigenvector columns orthonormal, each with its
// largest-magnitude component positive (ties broken by first index) so
// decompositions are unique and runs comparable.
struct EigenDecomposition {
  Vec eigenvalues;
  Matrix eigenvectors;
};

// Cyclic Jacobi for symmetric matrices. Sweeps until the off-diagonal
// Frobenius norm falls below 1e-12 relative to ||A||_F; throws
// NumericalError with the residual if the sweep cap is hit.
EigenDecomposition jacobi_eigen(const Matrix& symmetric, int max_sweeps = 100);

// Lower-triangular Cholesky factorization of an SPD matrix.
class Cholesky {
 public:
  explicit Cholesky(const Matrix& spd);
  Vec solve(const Vec& rhs) const;
  const Matrix& lower() const { return l_; }

 private:
  Matrix l_;
};

}  // namespace qfem
