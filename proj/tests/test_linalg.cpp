#include <gtest/gtest.h>

#include "gptd/error.hpp"
#include "gptd/linalg.hpp"
#include "support.hpp"

namespace gptd {
namespace {

Matrix random_spd(testing::Rng& rng, Index n) {
  const Matrix a = testing::random_matrix(rng, n, n);
  return a * a.transpose() + 0.1 * Matrix::Identity(n, n);
}

TEST(Cholesky, FactorsSpdWithoutJitter) {
  testing::Rng rng(1);
  const Matrix a = random_spd(rng, 8);
  const CholeskyResult r = cholesky_with_jitter(a, 1e-10);
  EXPECT_EQ(r.jitter_applied, 0.0);
  const Matrix l = r.factor.matrixL();
  EXPECT_LT(testing::rel_frobenius(l * l.transpose(), a), 1e-12);
  EXPECT_NEAR(log_determinant(r.factor), std::log(a.determinant()), 1e-10);
}

TEST(Cholesky, RetriesWithJitterOnSemidefinite) {
  const Matrix ones = Matrix::Ones(4, 4);
  const CholeskyResult r = cholesky_with_jitter(ones, 1e-8);
  EXPECT_EQ(r.jitter_applied, 1e-8);
  const Matrix l = r.factor.matrixL();
  EXPECT_LT((l * l.transpose() - ones - 1e-8 * Matrix::Identity(4, 4)).norm(), 1e-12);
}

TEST(Cholesky, IndefiniteReportsLeadingMinor) {
  const Matrix a = Vector{{2.0, 1.0, -3.0, 1.0}}.asDiagonal();
  EXPECT_EQ(first_failing_minor(a), 2);
  EXPECT_EQ(first_failing_minor(Matrix::Identity(3, 3)), -1);
  try {
    cholesky_with_jitter(a, 1e-10);
    FAIL() << "expected NumericalFailure";
  } catch (const NumericalFailure& e) {
    ASSERT_TRUE(e.minor_index().has_value());
    EXPECT_EQ(*e.minor_index(), 2);
  }
}

TEST(SymTridiagonal, SolveAndMultiplyMatchDense) {
  testing::Rng rng(2);
  for (Index n : {1, 2, 5, 40}) {
    Vector diag = Vector::Constant(n, 2.5) + testing::random_vector(rng, n, 0.1);
    Vector off = testing::random_vector(rng, std::max<Index>(n - 1, 0), 0.5);
    const SymTridiagonal t(diag, off);
    const Matrix dense = t.dense();
    for (Index i = 0; i + 1 < n; ++i) {
      EXPECT_EQ(dense(i, i + 1), off[i]);
      EXPECT_EQ(dense(i + 1, i), off[i]);
    }
    const Vector v = testing::random_vector(rng, n);
    EXPECT_LT((t.multiply(v) - dense * v).norm(), 1e-12);
    EXPECT_LT((dense * t.solve(v) - v).norm(), 1e-11);
    const Matrix rhs = testing::random_matrix(rng, n, 3);
    EXPECT_LT((dense * t.solve(rhs) - rhs).norm(), 1e-11);
  }
}

TEST(SymTridiagonal, RejectsIndefinite) {
  EXPECT_THROW(SymTridiagonal(Vector{{1.0, 1.0}}, Vector{{2.0}}), NumericalFailure);
  EXPECT_THROW(SymTridiagonal(Vector{{1.0, 1.0}}, Vector{{0.1, 0.1}}), ContractViolation);
}

}  // namespace
}  // namespace gptd
