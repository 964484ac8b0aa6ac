#pragma once

#include <vector>

#include "gptd/gptd.hpp"

namespace gptd {

enum class StopReason { Tolerance, MaxSize };

// Result of greedy pivoted incomplete Cholesky on the training Gram.
struct SubsetSelection {
  std::vector<Index> indices;         // pivots in selection order, distinct
  std::vector<double> residual_trace; // residual diagonal at each pivot
  StopReason stop_reason = StopReason::Tolerance;
  Matrix factor;                      // n x m, K_tilde = factor * factor^T
};

// Selects pivots column by column from the kernel (the full Gram is never
// formed). The first pivot is always taken; afterwards selection stops when
// the largest residual diagonal drops below `tol` or `max_m` pivots exist.
// Ties go to the lowest index.
SubsetSelection icd_select(const CovarianceSpec& spec, const HyperParams& theta,
                           const ConstMatrixRef& x, double tol, Index max_m);

// Subset-of-regressors posterior:
//   mean(x*) = k_m(x*)^T (G^T W G + noise K_mm)^{-1} G^T W r
// with G = H K_nm and W = (H H^T)^{-1} applied by tridiagonal solves.
// The inner matrix is factorized in the basis whitened by K_mm = L L^T, i.e.
// chol_inner factors L^{-1} (G^T W G + noise K_mm) L^{-T}.
class SparsePosterior {
 public:
  static SparsePosterior fit(const Trajectory& trajectory, const CovarianceSpec& spec,
                             const HyperParams& theta, const SubsetSelection& subset);

  double predict_mean(const ConstVectorRef& query) const;
  // Uncorrected: noise * k_m^T A^{-1} k_m. Corrected adds the projected-process
  // term k* - k_m^T K_mm^{-1} k_m.
  double predict_variance(const ConstVectorRef& query, bool corrected = true) const;
  // The projected-process term alone.
  double projection_residual(const ConstVectorRef& query) const;

  const CovarianceSpec& spec() const { return spec_; }
  const HyperParams& theta() const { return theta_; }
  const Matrix& subset_states() const { return subset_states_; }
  const Matrix& k_mm() const { return k_mm_; }
  const Cholesky& chol_inner() const { return chol_inner_; }
  const Vector& sr_weights() const { return sr_weights_; }
  double inner_jitter() const { return inner_jitter_; }

 private:
  SparsePosterior() = default;

  CovarianceSpec spec_ = CovarianceSpec::isotropic(1);
  HyperParams theta_;
  Matrix subset_states_;
  Matrix k_mm_;
  Cholesky chol_k_mm_;
  Cholesky chol_inner_;
  Vector sr_weights_;
  double inner_jitter_ = 0.0;
};

// Jitter retried on the inner matrix when its Cholesky fails: 1e-10 * trace / m.
inline constexpr double kInnerJitter = 1e-10;

SparsePosterior fit_sr(const Trajectory& trajectory, const CovarianceSpec& spec,
                       const HyperParams& theta, const SubsetSelection& subset);

double sr_predict_mean(const SparsePosterior& model, const ConstVectorRef& query);
double sr_predict_variance(const SparsePosterior& model, const ConstVectorRef& query,
                           bool corrected);

}  // namespace gptd
