#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gptd/envs/gridworld.hpp"
#include "gptd/error.hpp"
#include "gptd/model_selection.hpp"
#include "gptd/scg.hpp"
#include "support.hpp"

namespace gptd {
namespace {

using testing::dense_h;
using testing::oracle_gram;
using testing::random_theta;
using testing::random_trajectory;
using testing::Rng;

std::vector<CovarianceSpec> all_specs(int d) {
  return {CovarianceSpec::isotropic(d), CovarianceSpec::ard(d), CovarianceSpec::factor_analysis(d, 1)};
}

// Central differences of L in the packed coordinates.
Vector finite_difference_gradient(const Trajectory& t, const CovarianceSpec& spec,
                                  const HyperParams& th, double step) {
  const Vector p = params::pack(spec, th);
  Vector out(p.size());
  for (Index i = 0; i < p.size(); ++i) {
    Vector hi = p;
    Vector lo = p;
    hi[i] += step;
    lo[i] -= step;
    out[i] = (log_marginal_likelihood(t, spec, params::unpack(spec, hi)).total -
              log_marginal_likelihood(t, spec, params::unpack(spec, lo)).total) /
             (2.0 * step);
  }
  return out;
}

TEST(Likelihood, DecompositionSumsToTotal) {
  Rng rng(1);
  for (const auto& spec : all_specs(2)) {
    const Trajectory t = random_trajectory(rng, 20, 2);
    const LikelihoodReport r = log_marginal_likelihood(t, spec, random_theta(spec, rng));
    EXPECT_NEAR(r.total, r.complexity + r.data_fit + r.constant, 1e-10);
    EXPECT_NEAR(r.constant, -0.5 * 19 * std::log(2 * std::numbers::pi), 1e-12);
  }
}

TEST(Likelihood, MatchesDenseGaussianDensity) {
  Rng rng(2);
  for (const auto& spec : all_specs(3)) {
    const Trajectory t = random_trajectory(rng, 15, 3);
    const HyperParams th = random_theta(spec, rng);
    const Matrix hd = dense_h(t.discounts);
    const Matrix q = hd * oracle_gram(spec, th, t.states, t.states) * hd.transpose() +
                     th.noise() * hd * hd.transpose();
    const double m = static_cast<double>(t.num_transitions());
    const double expected = -0.5 * std::log(q.determinant()) -
                            0.5 * t.rewards.dot(q.fullPivLu().solve(t.rewards)) -
                            0.5 * m * std::log(2 * std::numbers::pi);
    EXPECT_NEAR(log_marginal_likelihood(t, spec, th).total, expected, 1e-9 * std::abs(expected));
  }
}

TEST(Likelihood, SingleTransitionClosedForm) {
  const auto spec = CovarianceSpec::isotropic(1);
  const HyperParams th = HyperParams::isotropic(1.2, 0.3, 0.4, 2.0);
  Trajectory t;
  t.states = Matrix{{0.0}, {0.5}};
  t.rewards = Vector{{-1.0}};
  t.discounts = Vector{{0.8}};
  const double k01 = 1.2 * std::exp(-0.5 * 2.0 * 0.25) + 0.3;
  const double k00 = 1.5;
  const double q = k00 - 2 * 0.8 * k01 + 0.64 * k00 + 0.4 * (1 + 0.64);
  const double expected = -0.5 * std::log(q) - 1.0 / (2 * q) - 0.5 * std::log(2 * std::numbers::pi);
  EXPECT_NEAR(log_marginal_likelihood(t, spec, th).total, expected, 1e-13);
}

TEST(Likelihood, ScalingRewardsOnlyMovesDataFit) {
  Rng rng(3);
  const auto spec = CovarianceSpec::ard(2);
  const HyperParams th = random_theta(spec, rng);
  Trajectory t = random_trajectory(rng, 20, 2);
  const LikelihoodReport full = log_marginal_likelihood(t, spec, th);
  t.rewards *= 1e-4;
  const LikelihoodReport small = log_marginal_likelihood(t, spec, th);
  EXPECT_NEAR(small.complexity, full.complexity, 1e-12 * std::abs(full.complexity));
  EXPECT_NEAR(small.data_fit, full.data_fit * 1e-8, 1e-14);
  t.rewards.setZero();
  EXPECT_EQ(log_marginal_likelihood(t, spec, th).data_fit, 0.0);
}

TEST(LikelihoodGradient, MatchesFiniteDifferences) {
  Rng rng(4);
  for (int d : {1, 2, 3}) {
    for (const auto& spec : d == 1 ? std::vector{CovarianceSpec::isotropic(1), CovarianceSpec::ard(1)}
                                   : all_specs(d)) {
      for (int rep = 0; rep < 3; ++rep) {
        const Trajectory t = random_trajectory(rng, 20, d);
        const HyperParams th = random_theta(spec, rng);
        const Vector g = likelihood_gradient(t, spec, th);
        const Vector fd = finite_difference_gradient(t, spec, th, 1e-5);
        const auto names = params::names(spec);
        for (Index i = 0; i < g.size(); ++i)
          EXPECT_LT(std::abs(g[i] - fd[i]) / std::max(std::abs(fd[i]), 1e-3), 1e-4)
              << spec.describe() << ' ' << names[static_cast<std::size_t>(i)];
      }
    }
  }
}

TEST(LikelihoodGradient, LogBWithZeroRewardsIsTraceTerm) {
  Rng rng(5);
  const auto spec = CovarianceSpec::ard(2);
  const HyperParams th = random_theta(spec, rng);
  Trajectory t = random_trajectory(rng, 12, 2);
  t.rewards.setZero();
  const Matrix hd = dense_h(t.discounts);
  const Matrix q = hd * oracle_gram(spec, th, t.states, t.states) * hd.transpose() +
                   th.noise() * hd * hd.transpose();
  const Matrix ones = Matrix::Ones(t.num_states(), t.num_states());
  const double expected = -0.5 * (q.fullPivLu().inverse() * th.b() * hd * ones * hd.transpose()).trace();
  EXPECT_NEAR(likelihood_gradient(t, spec, th)[params::kLogB], expected, 1e-10 * std::max(1.0, std::abs(expected)));
}

TEST(LikelihoodGradient, PermutingIdenticalArdDimensionsPermutesGradient) {
  Rng rng(6);
  const auto spec = CovarianceSpec::ard(3);
  Trajectory t = random_trajectory(rng, 15, 3);
  HyperParams th = random_theta(spec, rng);
  th.log_a[1] = th.log_a[2];
  const Vector g = likelihood_gradient(t, spec, th);
  Trajectory swapped = t;
  swapped.states.col(1).swap(swapped.states.col(2));
  const Vector gs = likelihood_gradient(swapped, spec, th);
  const Index a1 = params::kBlockStart + 1;
  const Index a2 = params::kBlockStart + 2;
  EXPECT_NEAR(g[a1], gs[a2], 1e-10 * std::max(1.0, std::abs(g[a1])));
  EXPECT_NEAR(g[a2], gs[a1], 1e-10 * std::max(1.0, std::abs(g[a2])));
  EXPECT_NEAR(g[params::kLogV0], gs[params::kLogV0], 1e-10 * std::max(1.0, std::abs(g[0])));
}

TEST(Likelihood, ReevaluationIsBitStable) {
  Rng rng(7);
  const auto spec = CovarianceSpec::factor_analysis(3, 2);
  const Trajectory t = random_trajectory(rng, 30, 3);
  const HyperParams th = random_theta(spec, rng);
  const LikelihoodAndGradient a = likelihood_with_gradient(t, spec, th);
  const LikelihoodAndGradient b = likelihood_with_gradient(t, spec, th);
  EXPECT_EQ(a.report.total, b.report.total);
  EXPECT_EQ(a.gradient, b.gradient);
  EXPECT_EQ(a.report.total, log_marginal_likelihood(t, spec, th).total);
}

TEST(Optimize, ImprovesOnStartAndBestDominatesIterates) {
  Rng rng(8);
  for (const auto& spec : all_specs(2)) {
    const Trajectory t = random_trajectory(rng, 40, 2);
    const HyperParams th0 = default_initial_params(spec, t, 3);
    OptimizerOptions o;
    o.restarts = 2;
    o.seed = 3;
    const OptimizationTrace trace = optimize(t, spec, th0, o);
    EXPECT_GE(trace.best.total, log_marginal_likelihood(t, spec, th0).total);
    ASSERT_FALSE(trace.iterates.empty());
    for (const auto& it : trace.iterates) EXPECT_GE(trace.best.total, it.log_likelihood - 1e-9);
    EXPECT_EQ(trace.restarts, 2);
  }
}

TEST(Optimize, StationaryStartReturnsImmediately) {
  Rng rng(9);
  const auto spec = CovarianceSpec::isotropic(2);
  const Trajectory t = random_trajectory(rng, 30, 2);
  OptimizerOptions o;
  o.restarts = 0;
  const OptimizationTrace first = optimize(t, spec, default_initial_params(spec, t), o);
  const double grad = likelihood_gradient(t, spec, first.best_theta).cwiseAbs().maxCoeff();
  o.grad_tol = 2.0 * grad + 1e-12;
  const OptimizationTrace again = optimize(t, spec, first.best_theta, o);
  EXPECT_TRUE(again.converged);
  ASSERT_EQ(again.iterates.size(), 1u);
  EXPECT_EQ(params::pack(spec, again.best_theta), params::pack(spec, first.best_theta));
}

// One free coordinate: SCG against a dense grid scan of L(log noise).
TEST(Optimize, OneDimensionalNoiseMatchesGridScan) {
  Rng rng(10);
  const auto spec = CovarianceSpec::isotropic(1);
  const Trajectory t = random_trajectory(rng, 40, 1);
  HyperParams base = HyperParams::isotropic(1.0, 0.1, 0.1, 1.0);
  auto at = [&](double log_noise) {
    HyperParams th = base;
    th.log_noise = log_noise;
    return th;
  };
  double best_x = 0.0;
  double best_l = -std::numeric_limits<double>::infinity();
  for (double x = -8.0; x <= 4.0; x += 1e-3) {
    const double l = log_marginal_likelihood(t, spec, at(x)).total;
    if (l > best_l) {
      best_l = l;
      best_x = x;
    }
  }
  ASSERT_GT(best_x, -7.9);
  ASSERT_LT(best_x, 3.9);

  ScgObjective obj;
  obj.value = [&](const Vector& v) -> std::optional<double> {
    return -log_marginal_likelihood(t, spec, at(v[0])).total;
  };
  obj.value_and_gradient = [&](const Vector& v) -> std::optional<ScgObjective::ValueAndGradient> {
    const auto lg = likelihood_with_gradient(t, spec, at(v[0]));
    return ScgObjective::ValueAndGradient{-lg.report.total, Vector{{-lg.gradient[params::kLogNoise]}}};
  };
  ScgOptions so;
  so.grad_tol = 1e-8;
  so.rel_value_tol = 0.0;
  const ScgResult r = scg_minimize(obj, Vector{{-2.0}}, so);
  EXPECT_NEAR(r.x[0], best_x, 1e-3);
}

TEST(SelectFactorRank, TwoDimensionsAdmitOnlyRankOne) {
  Rng rng(11);
  const Trajectory t = random_trajectory(rng, 30, 2);
  OptimizerOptions o;
  o.restarts = 0;
  const FactorRankSelection sel = select_factor_rank(t, {1}, o);
  EXPECT_EQ(sel.best_rank, 1);
  ASSERT_EQ(sel.table.size(), 1u);
  EXPECT_TRUE(sel.table[0].ok);
  EXPECT_THROW(select_factor_rank(t, {2}, o), ContractViolation);
}

// Value function varying only along a planted diagonal direction.
TEST(SelectFactorRank, RecoversPlantedDirection) {
  Rng rng(12);
  const int d = 3;
  const Index n = 150;
  const Vector u = Vector{{1.0, 1.0, 0.0}}.normalized();
  auto value = [&](const Vector& x) { return 3.0 * std::sin(1.5 * u.dot(x)); };
  const double gamma = 0.9;
  Trajectory t;
  t.states.resize(n, d);
  t.rewards.resize(n - 1);
  t.discounts.resize(n - 1);
  Vector x = testing::random_vector(rng, d);
  for (Index i = 0; i < n; ++i) {
    t.states.row(i) = x.transpose();
    if (i + 1 == n) break;
    if (i % 25 == 24) {
      t.discounts[i] = 0.0;
      t.rewards[i] = 0.0;
      x = testing::random_vector(rng, d);
      continue;
    }
    const Vector next = x + testing::random_vector(rng, d, 0.5);
    t.discounts[i] = gamma;
    t.rewards[i] = value(x) - gamma * value(next);
    x = next;
  }
  // Stitch rows carry reward 0, so V at the terminal state is fixed to 0
  // by the model; plant V only through the gamma > 0 rows.
  OptimizerOptions o;
  o.restarts = 2;
  o.seed = 5;
  const FactorRankSelection sel = select_factor_rank(t, {1, 2}, o);
  ASSERT_EQ(sel.table.size(), 2u);
  for (const auto& row : sel.table) {
    ASSERT_TRUE(row.ok);
    EXPECT_LE(row.report.total, log_marginal_likelihood(t, CovarianceSpec::factor_analysis(d, sel.best_rank),
                                                        sel.best_theta).total);
  }
  const FactorRankResult& rank1 = sel.table[0];
  const OmegaEigen e = omega_eigendecomposition(CovarianceSpec::factor_analysis(d, 1), rank1.theta);
  EXPECT_GT(std::abs(e.directions.col(0).dot(u)), 0.95);
}

// Dropping the collapsed y coordinate keeps the fit and lowers complexity.
TEST(Optimize, GridworldDroppingIrrelevantDimension) {
  const GridworldSpec gs;
  const Trajectory t = gridworld_rollout(gs, 500, 1);
  const auto spec = CovarianceSpec::ard(2);
  OptimizerOptions o;
  o.seed = 1;
  const OptimizationTrace trace = optimize(t, spec, default_initial_params(spec, t, 1), o);
  const Vector a = trace.best_theta.a();
  ASSERT_LT(a[1] / a[0], 1e-3);

  Trajectory reduced = t;
  reduced.states = t.states.leftCols(1);
  HyperParams th1 = trace.best_theta;
  th1.log_a = trace.best_theta.log_a.head(1);
  const LikelihoodReport r1 = log_marginal_likelihood(reduced, CovarianceSpec::ard(1), th1);
  EXPECT_NEAR(r1.data_fit, trace.best.data_fit, 1.0);
  EXPECT_GE(r1.total, trace.best.total);
}

}  // namespace
}  // namespace gptd
