#pragma once

#include <span>
#include <vector>

#include "wsunsal/errors.hpp"

namespace wsun {

// Dense row-major matrix of doubles. Row i occupies data()[i*cols .. i*cols+cols).
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {}

  double& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<const double> row(int r) const {
    return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Square matrix validated symmetric (within 1e-10 relative of the largest
// off-diagonal pair magnitude). Positive definiteness is not checked here;
// it is established by cholesky_factor succeeding.
class SpdMatrix {
 public:
  explicit SpdMatrix(Matrix m);

  int dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double trace() const;

 private:
  Matrix m_;
};

// Lower-triangular Cholesky factor L with L*L^T = H. Stored row-major with
// the strict upper triangle zero.
struct CholeskyFactor {
  int dim = 0;
  std::vector<double> lower;

  double at(int r, int c) const { return lower[static_cast<size_t>(r) * dim + c]; }
};

// Factors H + ridge*I. Throws NotPositiveDefinite when a pivot is <= 0,
// which signals a degenerate Hessian (e.g. mu = 0 with a rank-deficient
// Gram); callers may retry with a ridge.
CholeskyFactor cholesky_factor(const SpdMatrix& h, double ridge = 0.0);

// Solves L*L^T*x = f by forward/backward substitution.
std::vector<double> cholesky_solve(const CholeskyFactor& factor, std::span<const double> f);

// Allocation-free variant for hot loops; out may not alias f.
void cholesky_solve_into(const CholeskyFactor& factor, std::span<const double> f, std::span<double> out);

}  // namespace wsun
