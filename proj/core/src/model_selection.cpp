#include "gptd/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gptd/error.hpp"
#include "gptd/rng.hpp"
#include "gptd/scg.hpp"

namespace gptd {
namespace {

struct Factorized {
  BidiagonalH h;
  Cholesky chol;
  Vector weights;  // Q^{-1} r
  LikelihoodReport report;
};

Factorized factorize(const Trajectory& trajectory, const CovarianceSpec& spec,
                     const HyperParams& theta) {
  trajectory.validate_structure();
  require(trajectory.dim() == spec.input_dim(), "trajectory dimension does not match spec");
  const GramView k = gram(spec, theta, trajectory.states);
  const Matrix q = build_q(k.matrix, trajectory.discounts, theta.noise());
  CholeskyResult chol = factorize_q(q, trajectory.discounts, theta.v0());
  Vector weights = chol.factor.solve(trajectory.rewards);

  LikelihoodReport report;
  const double m = static_cast<double>(trajectory.num_transitions());
  report.complexity = -0.5 * log_determinant(chol.factor);
  report.data_fit = -0.5 * trajectory.rewards.dot(weights);
  report.constant = -0.5 * m * std::log(2.0 * std::numbers::pi);
  report.total = report.complexity + report.data_fit + report.constant;
  return {BidiagonalH(trajectory.discounts), std::move(chol.factor), std::move(weights), report};
}

}  // namespace

LikelihoodReport log_marginal_likelihood(const Trajectory& trajectory,
                                         const CovarianceSpec& spec, const HyperParams& theta) {
  return factorize(trajectory, spec, theta).report;
}

LikelihoodAndGradient likelihood_with_gradient(const Trajectory& trajectory,
                                               const CovarianceSpec& spec,
                                               const HyperParams& theta) {
  Factorized f = factorize(trajectory, spec, theta);
  const Index m = f.h.rows();

  // dL/dtheta = -1/2 sum_ij A_ij [dQ/dtheta]_ij with A = Q^{-1} - w w^T.
  Matrix a = f.chol.solve(Matrix::Identity(m, m));
  a.noalias() -= f.weights * f.weights.transpose();

  // Kernel parameters: dQ = H dK H^T, so sum_ij A_ij dQ_ij = sum_kl (H^T A H)_kl dK_kl.
  const Matrix b = f.h.sandwich_transpose(a);
  Vector gradient = -0.5 * contract_param_gradients(spec, theta, trajectory.states, b);

  // Noise: dQ/dlog(noise) = noise * H H^T, tridiagonal.
  const Vector& g = trajectory.discounts;
  double acc = 0.0;
  for (Index i = 0; i < m; ++i) {
    acc += a(i, i) * (1.0 + g[i] * g[i]);
    if (i + 1 < m) acc -= 2.0 * g[i] * a(i, i + 1);
  }
  gradient[params::kLogNoise] = -0.5 * theta.noise() * acc;
  return {f.report, std::move(gradient)};
}

Vector likelihood_gradient(const Trajectory& trajectory, const CovarianceSpec& spec,
                           const HyperParams& theta) {
  return likelihood_with_gradient(trajectory, spec, theta).gradient;
}

HyperParams default_initial_params(const CovarianceSpec& spec, const Trajectory& trajectory,
                                   std::uint64_t seed) {
  require(trajectory.dim() == spec.input_dim(), "trajectory dimension does not match spec");
  const Matrix& x = trajectory.states;
  const Index n = x.rows();
  const int dim = spec.input_dim();

  Vector median_sq(dim);
  std::vector<double> sq;
  sq.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (int d = 0; d < dim; ++d) {
    sq.clear();
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        const double diff = x(i, d) - x(j, d);
        sq.push_back(diff * diff);
      }
    double med = 0.0;
    if (!sq.empty()) {
      auto mid = sq.begin() + static_cast<std::ptrdiff_t>(sq.size() / 2);
      std::nth_element(sq.begin(), mid, sq.end());
      med = *mid;
    }
    median_sq[d] = med > 0.0 ? med : 1.0;
  }

  HyperParams theta;
  theta.log_v0 = 0.0;
  theta.log_b = -2.0;
  theta.log_noise = -2.0;
  switch (spec.variant()) {
    case Variant::Isotropic:
      theta.log_h = -std::log(median_sq.mean());
      break;
    case Variant::FactorAnalysis: {
      CounterRng rng = CounterRng(seed).split(0xfa);
      theta.factors.resize(dim, spec.factor_rank());
      for (int j = 0; j < spec.factor_rank(); ++j)
        for (int d = 0; d < dim; ++d)
          theta.factors(d, j) = 0.3 * rng.normal() / std::sqrt(median_sq[d]);
      [[fallthrough]];
    }
    case Variant::ArdDiagonal:
      theta.log_a = (-median_sq.array().log()).matrix();
      break;
  }
  return theta;
}

OptimizationTrace optimize(const Trajectory& trajectory, const CovarianceSpec& spec,
                           const HyperParams& theta0, const OptimizerOptions& options) {
  trajectory.validate_structure();
  const Vector start = params::pack(spec, theta0);
  const std::vector<bool> is_log = params::log_scaled(spec);

  auto clip = [&](Vector& v) {
    for (Index i = 0; i < v.size(); ++i)
      if (is_log[static_cast<std::size_t>(i)])
        v[i] = std::clamp(v[i], -options.log_bound, options.log_bound);
  };

  // Minimize -L.
  ScgObjective objective;
  objective.value = [&](const Vector& v) -> std::optional<double> {
    try {
      const double total = log_marginal_likelihood(trajectory, spec, params::unpack(spec, v)).total;
      if (!std::isfinite(total)) return std::nullopt;
      return -total;
    } catch (const NumericalFailure&) {
      return std::nullopt;
    }
  };
  objective.value_and_gradient = [&](const Vector& v) -> std::optional<ScgObjective::ValueAndGradient> {
    try {
      auto lg = likelihood_with_gradient(trajectory, spec, params::unpack(spec, v));
      if (!std::isfinite(lg.report.total) || !lg.gradient.allFinite()) return std::nullopt;
      return ScgObjective::ValueAndGradient{-lg.report.total, -lg.gradient};
    } catch (const NumericalFailure&) {
      return std::nullopt;
    }
  };

  ScgOptions scg_options;
  scg_options.max_iter = options.max_iter;
  scg_options.grad_tol = options.grad_tol;
  scg_options.rel_value_tol = options.rel_value_tol;
  scg_options.project = clip;

  OptimizationTrace trace;
  trace.restarts = options.restarts;
  const CounterRng root(options.seed);
  double best_value = std::numeric_limits<double>::infinity();
  Vector best_x;

  for (int run = 0; run <= options.restarts; ++run) {
    Vector x = start;
    if (run > 0) {
      CounterRng rng = root.split(static_cast<std::uint64_t>(run));
      for (Index i = 0; i < x.size(); ++i) {
        const double z = options.perturbation * rng.normal();
        x[i] = is_log[static_cast<std::size_t>(i)] ? x[i] + z : x[i] * std::exp(z);
      }
    }
    try {
      const ScgResult result = scg_minimize(objective, x, scg_options, [&](const ScgStep& step) {
        trace.iterates.push_back({step.x, -step.value, step.grad_inf_norm, run});
      });
      trace.evaluations += result.evaluations;
      if (result.value < best_value) {
        best_value = result.value;
        best_x = result.x;
        trace.converged = result.converged;
      }
    } catch (const NumericalFailure&) {
      ++trace.failed_restarts;
    }
  }

  if (best_x.size() == 0)
    throw OptimizationFailure("every optimization run failed to factorize Q", std::move(trace));
  trace.best_theta = params::unpack(spec, best_x);
  trace.best = log_marginal_likelihood(trajectory, spec, trace.best_theta);
  return trace;
}

FactorRankSelection select_factor_rank(const Trajectory& trajectory,
                                       const std::vector<int>& candidates,
                                       const OptimizerOptions& options) {
  require(!candidates.empty(), "select_factor_rank: no candidate ranks");
  const int dim = trajectory.dim();
  FactorRankSelection out;
  double best = -std::numeric_limits<double>::infinity();
  for (int k : candidates) {
    require(k > 0 && k < dim, "select_factor_rank: each k must satisfy 0 < k < D");
    const CovarianceSpec spec = CovarianceSpec::factor_analysis(dim, k);
    FactorRankResult row{k, false, {}, {}};
    try {
      const OptimizationTrace trace =
          optimize(trajectory, spec, default_initial_params(spec, trajectory, options.seed), options);
      row.ok = true;
      row.report = trace.best;
      row.theta = trace.best_theta;
      if (trace.best.total > best) {
        best = trace.best.total;
        out.best_rank = k;
        out.best_theta = trace.best_theta;
      }
    } catch (const OptimizationFailure&) {
    }
    out.table.push_back(std::move(row));
  }
  if (out.best_rank == 0) {
    OptimizationTrace empty;
    throw OptimizationFailure("select_factor_rank: optimization failed for every k", empty);
  }
  return out;
}

}  // namespace gptd
