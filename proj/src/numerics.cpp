#include "wsunsal/numerics.hpp"

#include <cmath>

namespace wsun {

SpdMatrix::SpdMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw Error(ErrorCode::dimension_mismatch, "SpdMatrix requires a square matrix with dim >= 1");
  }
  const int n = m_.rows();
  double scale = 0.0;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double a = m_(i, j);
      const double b = m_(j, i);
      scale = std::max(scale, std::max(std::abs(a), std::abs(b)));
      worst = std::max(worst, std::abs(a - b));
    }
  }
  if (worst > 1e-10 * std::max(scale, 1.0)) {
    throw Error(ErrorCode::invalid_argument, "SpdMatrix: matrix is not symmetric within 1e-10");
  }
}

double SpdMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < m_.rows(); ++i) t += m_(i, i);
  return t;
}

CholeskyFactor cholesky_factor(const SpdMatrix& h, double ridge) {
  const int n = h.dim();
  const Matrix& a = h.matrix();
  CholeskyFactor factor;
  factor.dim = n;
  factor.lower.assign(static_cast<size_t>(n) * n, 0.0);
  double* l = factor.lower.data();

  for (int j = 0; j < n; ++j) {
    const double* row_j = l + static_cast<size_t>(j) * n;
    double sum = 0.0;
    for (int k = 0; k < j; ++k) sum += row_j[k] * row_j[k];
    const double pivot = a(j, j) + ridge - sum;
    if (!(pivot > 0.0) || !std::isfinite(pivot)) {
      throw Error(ErrorCode::not_positive_definite,
                  "cholesky_factor: nonpositive pivot at index " + std::to_string(j));
    }
    const double diag = std::sqrt(pivot);
    l[static_cast<size_t>(j) * n + j] = diag;
    for (int i = j + 1; i < n; ++i) {
      double* row_i = l + static_cast<size_t>(i) * n;
      double s = 0.0;
      for (int k = 0; k < j; ++k) s += row_i[k] * row_j[k];
      row_i[j] = (a(i, j) - s) / diag;
    }
  }
  return factor;
}

void cholesky_solve_into(const CholeskyFactor& factor, std::span<const double> f, std::span<double> out) {
  const int n = factor.dim;
  if (static_cast<int>(f.size()) != n || static_cast<int>(out.size()) != n) {
    throw Error(ErrorCode::dimension_mismatch, "cholesky_solve: rhs length does not match factor dim");
  }
  const double* l = factor.lower.data();

  // forward substitution: L*z = f, z written into out
  for (int i = 0; i < n; ++i) {
    const double* row_i = l + static_cast<size_t>(i) * n;
    double s = f[i];
    for (int k = 0; k < i; ++k) s -= row_i[k] * out[k];
    out[i] = s / row_i[i];
  }
  // backward substitution: L^T*x = z
  for (int i = n - 1; i >= 0; --i) {
    double s = out[i];
    for (int k = i + 1; k < n; ++k) s -= l[static_cast<size_t>(k) * n + i] * out[k];
    out[i] = s / l[static_cast<size_t>(i) * n + i];
  }
}

std::vector<double> cholesky_solve(const CholeskyFactor& factor, std::span<const double> f) {
  std::vector<double> x(factor.dim, 0.0);
  cholesky_solve_into(factor, f, x);
  return x;
}

}  // namespace wsun
