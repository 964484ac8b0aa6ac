#pragma once

#include "gptd/hyperparams.hpp"
#include "gptd/kernel.hpp"
#include "gptd/linalg.hpp"
#include "gptd/types.hpp"

namespace gptd {

// Observed states x_1..x_n (rows), rewards r_1..r_{n-1} and per-transition
// discounts gamma_1..gamma_{n-1}. gamma_i = 0 marks x_i as terminal; the
// transition out of a terminal state is an episode stitch with reward 0.
struct Trajectory {
  Matrix states;
  Vector rewards;
  Vector discounts;

  Index num_states() const { return states.rows(); }
  Index num_transitions() const { return rewards.size(); }
  int dim() const { return static_cast<int>(states.cols()); }

  // Shapes, finiteness and 0 <= gamma_i < 1. This is all the model needs;
  // with every gamma_i = 0 it is plain GP regression on the rewards.
  void validate_structure() const;
  // validate_structure() plus zero reward on every stitch. Throws
  // ContractViolation.
  void validate() const;
  Index count_stitches() const;
};

// The (n-1) x n bidiagonal operator with rows e_i - gamma_i e_{i+1}.
// Stored as its discount vector.
class BidiagonalH {
 public:
  explicit BidiagonalH(Vector discounts);

  Index rows() const { return discounts_.size(); }
  Index cols() const { return discounts_.size() + 1; }
  const Vector& discounts() const { return discounts_; }

  Vector apply(const ConstVectorRef& v) const;             // H v
  Vector apply_transpose(const ConstVectorRef& u) const;   // H^T u
  Matrix apply_rows(const ConstMatrixRef& m) const;        // H M
  Matrix sandwich(const ConstMatrixRef& a) const;          // H A H^T
  Matrix sandwich_transpose(const ConstMatrixRef& a) const;  // H^T A H
  SymTridiagonal gram() const;                             // H H^T
  Matrix dense() const;

 private:
  Vector discounts_;
};

BidiagonalH build_h(const Vector& discounts);

// Q = H K H^T + noise * H H^T.
Matrix build_q(const ConstMatrixRef& k, const Vector& discounts, double noise);

// Cholesky of Q with the documented jitter retry (kGramJitter * v0 on the
// diagonal of K, propagated through H).
CholeskyResult factorize_q(const Matrix& q, const Vector& discounts, double v0);

class ExactPosterior {
 public:
  static ExactPosterior fit(const Trajectory& trajectory, const CovarianceSpec& spec,
                            const HyperParams& theta);

  double predict_mean(const ConstVectorRef& query) const;
  double predict_variance(const ConstVectorRef& query) const;

  const CovarianceSpec& spec() const { return spec_; }
  const HyperParams& theta() const { return theta_; }
  const Matrix& states() const { return states_; }
  const BidiagonalH& h() const { return h_; }
  const Cholesky& chol_q() const { return chol_q_; }
  // Q^{-1} r
  const Vector& weights() const { return weights_; }
  // H^T Q^{-1} r, so that the mean is k(x*)^T mean_coefficients.
  const Vector& mean_coefficients() const { return mean_coefficients_; }
  double jitter_applied() const { return jitter_applied_; }

 private:
  ExactPosterior(CovarianceSpec spec, HyperParams theta, Matrix states, BidiagonalH h,
                 Cholesky chol_q, Vector weights, double jitter);

  CovarianceSpec spec_;
  HyperParams theta_;
  Matrix states_;
  BidiagonalH h_;
  Cholesky chol_q_;
  Vector weights_;
  Vector mean_coefficients_;
  double jitter_applied_;
};

ExactPosterior fit_exact(const Trajectory& trajectory, const CovarianceSpec& spec,
                         const HyperParams& theta);

// Relative clamp tolerance for slightly negative predictive variances.
inline constexpr double kVarianceClamp = 1e-8;

// Clamps small negatives to zero; throws NumericalFailure below -kVarianceClamp * v0.
double clamp_variance(double variance, double v0);

}  // namespace gptd
