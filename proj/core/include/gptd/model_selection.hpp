#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gptd/gptd.hpp"

namespace gptd {

// Log marginal likelihood of the rewards, split into its three terms.
struct LikelihoodReport {
  double total = 0.0;
  double complexity = 0.0;  // -1/2 log det Q
  double data_fit = 0.0;    // -1/2 r^T Q^{-1} r
  double constant = 0.0;    // -(n-1)/2 log 2 pi
};

struct LikelihoodAndGradient {
  LikelihoodReport report;
  Vector gradient;  // d L / d theta in the packed layout
};

LikelihoodReport log_marginal_likelihood(const Trajectory& trajectory,
                                         const CovarianceSpec& spec, const HyperParams& theta);

Vector likelihood_gradient(const Trajectory& trajectory, const CovarianceSpec& spec,
                           const HyperParams& theta);

// Shares one factorization of Q between the value and the gradient.
LikelihoodAndGradient likelihood_with_gradient(const Trajectory& trajectory,
                                               const CovarianceSpec& spec,
                                               const HyperParams& theta);

struct OptimizerOptions {
  int max_iter = 200;
  double grad_tol = 1e-4;
  double rel_value_tol = 1e-9;
  int restarts = 3;              // additional runs from perturbed starts
  double perturbation = 0.5;     // std-dev of the log-space perturbation
  std::uint64_t seed = 0;
  double log_bound = 20.0;       // log-space entries are clipped to [-bound, bound]
};

struct OptimizationIterate {
  Vector theta;  // packed
  double log_likelihood;
  double grad_norm;  // infinity norm
  int restart;       // 0 is the unperturbed start
};

struct OptimizationTrace {
  std::vector<OptimizationIterate> iterates;
  int restarts = 0;
  int failed_restarts = 0;
  bool converged = false;
  HyperParams best_theta;
  LikelihoodReport best;
  int evaluations = 0;
};

// Maximizes the log marginal likelihood with scaled conjugate gradients,
// first from theta0 and then from `restarts` perturbed copies of it.
// Throws OptimizationFailure if every run fails to factorize at its start.
OptimizationTrace optimize(const Trajectory& trajectory, const CovarianceSpec& spec,
                           const HyperParams& theta0, const OptimizerOptions& options);

class OptimizationFailure : public std::runtime_error {
 public:
  OptimizationFailure(const std::string& what, OptimizationTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const OptimizationTrace& trace() const { return trace_; }

 private:
  OptimizationTrace trace_;
};

// Data-driven starting point: log v0 = 0, log b = -2, log noise = -2 and
// inverse squared lengthscales from the median pairwise squared distance per
// dimension. FactorAnalysis factors start small and random (seeded) since
// M = 0 is a stationary point of the likelihood.
HyperParams default_initial_params(const CovarianceSpec& spec, const Trajectory& trajectory,
                                   std::uint64_t seed = 0);

struct FactorRankResult {
  int rank;
  bool ok;
  LikelihoodReport report;
  HyperParams theta;
};

struct FactorRankSelection {
  int best_rank = 0;
  HyperParams best_theta;
  std::vector<FactorRankResult> table;
};

// Optimizes the FactorAnalysis covariance independently for each candidate k
// and keeps the one with the highest likelihood.
FactorRankSelection select_factor_rank(const Trajectory& trajectory,
                                       const std::vector<int>& candidates,
                                       const OptimizerOptions& options);

}  // namespace gptd
