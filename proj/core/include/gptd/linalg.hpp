#pragma once

#include <Eigen/Cholesky>

#include "gptd/types.hpp"

namespace gptd {

using Cholesky = Eigen::LLT<Matrix>;

struct CholeskyResult {
  Cholesky factor;
  double jitter_applied = 0.0;
};

// Factorizes a symmetric positive definite matrix. On breakdown, retries once
// with `jitter` added to the diagonal; if that fails too, throws
// NumericalFailure carrying the first failing leading minor (0-based).
CholeskyResult cholesky_with_jitter(const Matrix& a, double jitter);

// Index of the first non-positive pivot of an unblocked Cholesky, or -1.
long first_failing_minor(const Matrix& a);

double log_determinant(const Cholesky& factor);

// Symmetric tridiagonal matrix: diag has length n, off has length n-1
// (off[i] couples rows i and i+1). Solves use an LDL^T factorization.
class SymTridiagonal {
 public:
  SymTridiagonal(Vector diag, Vector off);

  Index size() const { return diag_.size(); }
  const Vector& diag() const { return diag_; }
  const Vector& off() const { return off_; }

  Vector multiply(const Vector& v) const;
  Vector solve(const Vector& rhs) const;
  Matrix solve(const Matrix& rhs) const;
  Matrix dense() const;

 private:
  Vector diag_;
  Vector off_;
  Vector ldl_d_;  // pivots of the LDL^T factorization
  Vector ldl_l_;  // sub-diagonal of L
};

}  // namespace gptd
