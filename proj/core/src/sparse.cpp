#include "gptd/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "gptd/error.hpp"

namespace gptd {

SubsetSelection icd_select(const CovarianceSpec& spec, const HyperParams& theta,
                           const ConstMatrixRef& x, double tol, Index max_m) {
  const Index n = x.rows();
  require(n >= 1, "icd_select: empty input");
  require(x.cols() == spec.input_dim(), "icd_select: input dimension does not match spec");
  require(max_m >= 1, "icd_select: max_m must be positive");
  require(tol > 0.0 || max_m < n, "icd_select: need tol > 0 or max_m < n");

  const Index capacity = std::min(max_m, n);
  SubsetSelection out;
  out.factor = Matrix::Zero(n, capacity);
  std::vector<bool> selected(static_cast<std::size_t>(n), false);

  Vector residual(n);
  for (Index i = 0; i < n; ++i) residual[i] = eval_kernel(spec, theta, x.row(i), x.row(i));

  for (Index m = 0;; ++m) {
    if (m == max_m) {
      out.stop_reason = StopReason::MaxSize;
      break;
    }
    Index pivot = -1;
    double best = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (selected[static_cast<std::size_t>(i)]) continue;
      if (pivot < 0 || residual[i] > best) {
        pivot = i;
        best = residual[i];
      }
    }
    if (pivot < 0 || (m > 0 && best < tol) || !(best > 0.0)) {
      out.stop_reason = StopReason::Tolerance;
      break;
    }

    out.indices.push_back(pivot);
    out.residual_trace.push_back(best);
    selected[static_cast<std::size_t>(pivot)] = true;

    Vector column = cross_covariance(spec, theta, x, x.row(pivot));
    if (m > 0)
      column.noalias() -= out.factor.leftCols(m) * out.factor.row(pivot).head(m).transpose();
    const double root = std::sqrt(best);
    out.factor.col(m) = column / root;
    residual -= out.factor.col(m).cwiseAbs2();
    residual[pivot] = 0.0;
  }
  out.factor.conservativeResize(n, static_cast<Index>(out.indices.size()));
  return out;
}

SparsePosterior SparsePosterior::fit(const Trajectory& trajectory, const CovarianceSpec& spec,
                                     const HyperParams& theta, const SubsetSelection& subset) {
  trajectory.validate_structure();
  require(trajectory.dim() == spec.input_dim(), "trajectory dimension does not match spec");
  require(!subset.indices.empty(), "fit_sr: subset must be non-empty");
  const Index n = trajectory.num_states();
  const Index m = static_cast<Index>(subset.indices.size());

  SparsePosterior model;
  model.spec_ = spec;
  model.theta_ = theta;
  model.subset_states_.resize(m, spec.input_dim());
  for (Index j = 0; j < m; ++j) {
    const Index idx = subset.indices[static_cast<std::size_t>(j)];
    require(idx >= 0 && idx < n, "fit_sr: subset index out of range");
    model.subset_states_.row(j) = trajectory.states.row(idx);
  }

  model.k_mm_ = gram(spec, theta, model.subset_states_).matrix;
  model.chol_k_mm_ = cholesky_with_jitter(model.k_mm_, kGramJitter * theta.v0()).factor;
  const Matrix k_nm = gram(spec, theta, trajectory.states, model.subset_states_);
  const BidiagonalH h(trajectory.discounts);
  const SymTridiagonal hht = h.gram();

  // Whitened by K_mm = L L^T: with F = H K_nm L^{-T},
  //   G^T W G + noise K_mm = L (F^T W F + noise I) L^T.
  const Matrix f =
      model.chol_k_mm_.matrixL().solve(h.apply_rows(k_nm).transpose()).transpose();
  const Matrix wf = hht.solve(f);
  const Vector wr = hht.solve(Vector(trajectory.rewards));

  Matrix inner = f.transpose() * wf;
  inner.diagonal().array() += theta.noise();
  inner = 0.5 * (inner + inner.transpose()).eval();
  const CholeskyResult inner_chol = cholesky_with_jitter(inner, kInnerJitter * inner.trace() / static_cast<double>(m));
  model.inner_jitter_ = inner_chol.jitter_applied;
  model.chol_inner_ = inner_chol.factor;
  model.sr_weights_ = model.chol_k_mm_.matrixU().solve(model.chol_inner_.solve(f.transpose() * wr));
  return model;
}

double SparsePosterior::predict_mean(const ConstVectorRef& query) const {
  return cross_covariance(spec_, theta_, subset_states_, query).dot(sr_weights_);
}

double SparsePosterior::projection_residual(const ConstVectorRef& query) const {
  const Vector k_m = cross_covariance(spec_, theta_, subset_states_, query);
  const double prior = eval_kernel(spec_, theta_, query, query);
  const Vector s = chol_k_mm_.matrixL().solve(k_m);
  return clamp_variance(prior - s.squaredNorm(), theta_.v0());
}

double SparsePosterior::predict_variance(const ConstVectorRef& query, bool corrected) const {
  const Vector k_m = cross_covariance(spec_, theta_, subset_states_, query);
  const Vector s = chol_inner_.matrixL().solve(chol_k_mm_.matrixL().solve(k_m));
  double variance = theta_.noise() * s.squaredNorm();
  if (corrected) variance += projection_residual(query);
  return variance;
}

SparsePosterior fit_sr(const Trajectory& trajectory, const CovarianceSpec& spec,
                       const HyperParams& theta, const SubsetSelection& subset) {
  return SparsePosterior::fit(trajectory, spec, theta, subset);
}

double sr_predict_mean(const SparsePosterior& model, const ConstVectorRef& query) {
  return model.predict_mean(query);
}

double sr_predict_variance(const SparsePosterior& model, const ConstVectorRef& query,
                           bool corrected) {
  return model.predict_variance(query, corrected);
}

}  // namespace gptd
