#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Cholesky>

#include "gptd/error.hpp"
#include "gptd/scg.hpp"

namespace gptd {
namespace {

ScgObjective quadratic(const Matrix& a, const Vector& b) {
  ScgObjective obj;
  obj.value = [=](const Vector& x) -> std::optional<double> { return 0.5 * x.dot(a * x) - b.dot(x); };
  obj.value_and_gradient = [=](const Vector& x) -> std::optional<ScgObjective::ValueAndGradient> {
    return ScgObjective::ValueAndGradient{0.5 * x.dot(a * x) - b.dot(x), a * x - b};
  };
  return obj;
}

TEST(Scg, SolvesQuadratic) {
  const Matrix a{{4.0, 1.0, 0.0}, {1.0, 3.0, 0.5}, {0.0, 0.5, 2.0}};
  const Vector b{{1.0, -2.0, 0.5}};
  ScgOptions o;
  o.grad_tol = 1e-7;
  o.rel_value_tol = 0.0;
  const ScgResult r = scg_minimize(quadratic(a, b), Vector::Zero(3), o);
  EXPECT_TRUE(r.converged);
  EXPECT_LT((r.x - a.ldlt().solve(b)).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_LT(r.gradient.cwiseAbs().maxCoeff(), 1e-7);
}

// A tolerance below the step resolution cannot be met and is not reported as met.
TEST(Scg, UnreachableToleranceIsNotConverged) {
  const Matrix a{{4.0, 1.0}, {1.0, 3.0}};
  const Vector b{{1.0, -2.0}};
  ScgOptions o;
  o.grad_tol = 1e-30;
  o.rel_value_tol = 0.0;
  o.max_iter = 500;
  const ScgResult r = scg_minimize(quadratic(a, b), Vector::Zero(2), o);
  EXPECT_FALSE(r.converged);
  EXPECT_LT((r.x - a.ldlt().solve(b)).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Scg, SolvesRosenbrock) {
  ScgObjective obj;
  auto f = [](const Vector& x) { return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2); };
  obj.value = [=](const Vector& x) -> std::optional<double> { return f(x); };
  obj.value_and_gradient = [=](const Vector& x) -> std::optional<ScgObjective::ValueAndGradient> {
    const Vector g{{-400.0 * x[0] * (x[1] - x[0] * x[0]) - 2.0 * (1.0 - x[0]), 200.0 * (x[1] - x[0] * x[0])}};
    return ScgObjective::ValueAndGradient{f(x), g};
  };
  ScgOptions o;
  o.max_iter = 5000;
  o.grad_tol = 1e-8;
  o.rel_value_tol = 0.0;
  const ScgResult r = scg_minimize(obj, Vector{{-1.2, 1.0}}, o);
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x[1], 1.0, 1e-5);
}

TEST(Scg, InfeasibleStartThrows) {
  ScgObjective obj;
  obj.value = [](const Vector&) -> std::optional<double> { return std::nullopt; };
  obj.value_and_gradient = [](const Vector&) -> std::optional<ScgObjective::ValueAndGradient> {
    return std::nullopt;
  };
  EXPECT_THROW(scg_minimize(obj, Vector::Zero(2), ScgOptions{}), NumericalFailure);
}

// Infeasible region x > 1 is never accepted; the minimizer lies on its edge.
TEST(Scg, InfeasibleTrialPointsAreRejected) {
  ScgObjective obj;
  obj.value = [](const Vector& x) -> std::optional<double> {
    if (x[0] > 1.0) return std::nullopt;
    return std::pow(x[0] - 2.0, 2);
  };
  obj.value_and_gradient = [&](const Vector& x) -> std::optional<ScgObjective::ValueAndGradient> {
    if (x[0] > 1.0) return std::nullopt;
    return ScgObjective::ValueAndGradient{std::pow(x[0] - 2.0, 2), Vector{{2.0 * (x[0] - 2.0)}}};
  };
  ScgOptions o;
  o.max_iter = 100;
  const ScgResult r = scg_minimize(obj, Vector{{-3.0}}, o);
  EXPECT_LE(r.x[0], 1.0);
  EXPECT_LT(r.value, 25.0);
}

TEST(Scg, AcceptCallbackStartsAtX0AndNeverIncreases) {
  const Matrix a{{10.0, 0.0}, {0.0, 1.0}};
  const Vector b{{1.0, 1.0}};
  std::vector<ScgStep> steps;
  const Vector x0{{3.0, -2.0}};
  const ScgResult r = scg_minimize(quadratic(a, b), x0, ScgOptions{},
                                   [&](const ScgStep& s) { steps.push_back(s); });
  ASSERT_GE(steps.size(), 2u);
  EXPECT_EQ(steps.front().x, x0);
  for (std::size_t i = 1; i < steps.size(); ++i) EXPECT_LE(steps[i].value, steps[i - 1].value);
  EXPECT_EQ(steps.back().value, r.value);
}

TEST(Scg, ProjectionKeepsIteratesInBox) {
  const Matrix a = Matrix::Identity(2, 2);
  const Vector b{{5.0, -5.0}};
  ScgOptions o;
  o.project = [](Vector& x) { x = x.cwiseMax(-1.0).cwiseMin(1.0); };
  std::vector<Vector> seen;
  const ScgResult r = scg_minimize(quadratic(a, b), Vector::Zero(2), o,
                                   [&](const ScgStep& s) { seen.push_back(s.x); });
  for (const auto& x : seen) EXPECT_LE(x.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_LE(r.x.cwiseAbs().maxCoeff(), 1.0);
}

}  // namespace
}  // namespace gptd
