#include "gptd/linalg.hpp"

#include <cmath>
#include <string>

#include "gptd/error.hpp"

namespace gptd {

long first_failing_minor(const Matrix& a) {
  const Index n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) return static_cast<long>(j);
    l(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < n; ++i)
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
  }
  return -1;
}

CholeskyResult cholesky_with_jitter(const Matrix& a, double jitter) {
  CholeskyResult out;
  out.factor.compute(a);
  if (out.factor.info() == Eigen::Success) return out;

  Matrix shifted = a;
  shifted.diagonal().array() += jitter;
  out.factor.compute(shifted);
  out.jitter_applied = jitter;
  if (out.factor.info() == Eigen::Success) return out;

  const long minor = first_failing_minor(shifted);
  throw NumericalFailure("matrix is not positive definite after jitter " + std::to_string(jitter) +
                             " (leading minor " + std::to_string(minor) + ")",
                         minor);
}

double log_determinant(const Cholesky& factor) {
  return 2.0 * factor.matrixLLT().diagonal().array().log().sum();
}

SymTridiagonal::SymTridiagonal(Vector diag, Vector off)
    : diag_(std::move(diag)), off_(std::move(off)) {
  const Index n = diag_.size();
  require(n >= 1, "tridiagonal matrix must be non-empty");
  require(off_.size() == n - 1, "off-diagonal must have length n-1");
  ldl_d_.resize(n);
  ldl_l_.resize(n - 1);
  ldl_d_[0] = diag_[0];
  for (Index i = 1; i < n; ++i) {
    if (!(ldl_d_[i - 1] > 0.0))
      throw NumericalFailure("tridiagonal matrix is not positive definite", static_cast<long>(i - 1));
    ldl_l_[i - 1] = off_[i - 1] / ldl_d_[i - 1];
    ldl_d_[i] = diag_[i] - ldl_l_[i - 1] * off_[i - 1];
  }
  if (!(ldl_d_[n - 1] > 0.0))
    throw NumericalFailure("tridiagonal matrix is not positive definite", static_cast<long>(n - 1));
}

Vector SymTridiagonal::multiply(const Vector& v) const {
  require(v.size() == size(), "tridiagonal multiply: size mismatch");
  Vector out = diag_.cwiseProduct(v);
  const Index n = size();
  for (Index i = 0; i + 1 < n; ++i) {
    out[i] += off_[i] * v[i + 1];
    out[i + 1] += off_[i] * v[i];
  }
  return out;
}

Vector SymTridiagonal::solve(const Vector& rhs) const {
  Matrix m = rhs;
  return solve(m).col(0);
}

Matrix SymTridiagonal::solve(const Matrix& rhs) const {
  require(rhs.rows() == size(), "tridiagonal solve: size mismatch");
  const Index n = size();
  Matrix x = rhs;
  for (Index c = 0; c < x.cols(); ++c) {
    auto col = x.col(c);
    for (Index i = 1; i < n; ++i) col[i] -= ldl_l_[i - 1] * col[i - 1];
    for (Index i = 0; i < n; ++i) col[i] /= ldl_d_[i];
    for (Index i = n - 1; i-- > 0;) col[i] -= ldl_l_[i] * col[i + 1];
  }
  return x;
}

Matrix SymTridiagonal::dense() const {
  const Index n = size();
  Matrix out = Matrix::Zero(n, n);
  out.diagonal() = diag_;
  for (Index i = 0; i + 1 < n; ++i) {
    out(i, i + 1) = off_[i];
    out(i + 1, i) = off_[i];
  }
  return out;
}

}  // namespace gptd
