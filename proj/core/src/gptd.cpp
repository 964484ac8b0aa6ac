#include "gptd/gptd.hpp"

#include <cmath>
#include <string>

#include "gptd/error.hpp"

namespace gptd {

void Trajectory::validate_structure() const {
  const Index n = states.rows();
  require(n >= 2, "trajectory needs at least two states");
  require(states.cols() >= 1, "trajectory states need at least one dimension");
  require(rewards.size() == n - 1, "rewards must have length n-1");
  require(discounts.size() == n - 1, "discounts must have length n-1");
  require(states.allFinite() && rewards.allFinite() && discounts.allFinite(),
          "trajectory entries must be finite");
  for (Index i = 0; i < n - 1; ++i) {
    const double g = discounts[i];
    require(g >= 0.0 && g < 1.0, "discount " + std::to_string(i) + " outside [0, 1)");
  }
}

void Trajectory::validate() const {
  validate_structure();
  for (Index i = 0; i < discounts.size(); ++i)
    if (discounts[i] == 0.0)
      require(rewards[i] == 0.0,
              "stitch transition " + std::to_string(i) + " must carry reward 0");
}

Index Trajectory::count_stitches() const { return (discounts.array() == 0.0).count(); }

BidiagonalH::BidiagonalH(Vector discounts) : discounts_(std::move(discounts)) {
  require(discounts_.size() >= 1, "H needs at least one transition");
}

BidiagonalH build_h(const Vector& discounts) { return BidiagonalH(discounts); }

Vector BidiagonalH::apply(const ConstVectorRef& v) const {
  require(v.size() == cols(), "H v: size mismatch");
  const Index m = rows();
  return v.head(m) - discounts_.cwiseProduct(v.tail(m));
}

Vector BidiagonalH::apply_transpose(const ConstVectorRef& u) const {
  require(u.size() == rows(), "H^T u: size mismatch");
  const Index m = rows();
  Vector out = Vector::Zero(m + 1);
  out.head(m) = u;
  out.tail(m) -= discounts_.cwiseProduct(u);
  return out;
}

Matrix BidiagonalH::apply_rows(const ConstMatrixRef& a) const {
  require(a.rows() == cols(), "H M: size mismatch");
  const Index m = rows();
  return a.topRows(m) - discounts_.asDiagonal() * a.bottomRows(m);
}

Matrix BidiagonalH::sandwich(const ConstMatrixRef& a) const {
  require(a.rows() == cols() && a.cols() == cols(), "H A H^T: size mismatch");
  const Index m = rows();
  // [H A H^T]_ij = a_ij - g_i a_{i+1,j} - g_j a_{i,j+1} + g_i g_j a_{i+1,j+1}
  Matrix out(m, m);
  for (Index j = 0; j < m; ++j) {
    const double gj = discounts_[j];
    for (Index i = 0; i < m; ++i) {
      const double gi = discounts_[i];
      out(i, j) = a(i, j) - gi * a(i + 1, j) - gj * a(i, j + 1) + gi * gj * a(i + 1, j + 1);
    }
  }
  return out;
}

Matrix BidiagonalH::sandwich_transpose(const ConstMatrixRef& a) const {
  require(a.rows() == rows() && a.cols() == rows(), "H^T A H: size mismatch");
  const Index m = rows();
  // C = A H: column l of C is a_l - g_{l-1} a_{l-1} (with out-of-range terms dropped).
  Matrix c(m, m + 1);
  c.col(0) = a.col(0);
  for (Index l = 1; l < m; ++l) c.col(l) = a.col(l) - discounts_[l - 1] * a.col(l - 1);
  c.col(m) = -discounts_[m - 1] * a.col(m - 1);
  Matrix out(m + 1, m + 1);
  out.row(0) = c.row(0);
  for (Index k = 1; k < m; ++k) out.row(k) = c.row(k) - discounts_[k - 1] * c.row(k - 1);
  out.row(m) = -discounts_[m - 1] * c.row(m - 1);
  return out;
}

SymTridiagonal BidiagonalH::gram() const {
  const Index m = rows();
  Vector diag = (1.0 + discounts_.array().square()).matrix();
  Vector off = -discounts_.head(m - 1);
  return SymTridiagonal(std::move(diag), std::move(off));
}

Matrix BidiagonalH::dense() const {
  const Index m = rows();
  Matrix out = Matrix::Zero(m, m + 1);
  for (Index i = 0; i < m; ++i) {
    out(i, i) = 1.0;
    out(i, i + 1) = -discounts_[i];
  }
  return out;
}

Matrix build_q(const ConstMatrixRef& k, const Vector& discounts, double noise) {
  require(k.rows() == k.cols(), "K must be square");
  require(k.rows() == discounts.size() + 1, "K must be n x n for n-1 discounts");
  require(noise >= 0.0, "noise must be non-negative");
  const BidiagonalH h(discounts);
  Matrix q = h.sandwich(k);
  const Index m = h.rows();
  for (Index i = 0; i < m; ++i) {
    q(i, i) += noise * (1.0 + discounts[i] * discounts[i]);
    if (i + 1 < m) {
      q(i, i + 1) -= noise * discounts[i];
      q(i + 1, i) -= noise * discounts[i];
    }
  }
  return q;
}

CholeskyResult factorize_q(const Matrix& q, const Vector& discounts, double v0) {
  CholeskyResult out;
  out.factor.compute(q);
  if (out.factor.info() == Eigen::Success) return out;

  // Jitter on the diagonal of K enters Q as jitter * H H^T.
  const double jitter = kGramJitter * v0;
  Matrix shifted = q;
  const Index m = q.rows();
  for (Index i = 0; i < m; ++i) {
    shifted(i, i) += jitter * (1.0 + discounts[i] * discounts[i]);
    if (i + 1 < m) {
      shifted(i, i + 1) -= jitter * discounts[i];
      shifted(i + 1, i) -= jitter * discounts[i];
    }
  }
  out.factor.compute(shifted);
  out.jitter_applied = jitter;
  if (out.factor.info() == Eigen::Success) return out;

  const long minor = first_failing_minor(shifted);
  throw NumericalFailure("Q is not positive definite after jitter (leading minor " +
                             std::to_string(minor) + ")",
                         minor);
}

double clamp_variance(double variance, double v0) {
  if (variance >= 0.0) return variance;
  if (variance >= -kVarianceClamp * v0) return 0.0;
  throw NumericalFailure("predictive variance is negative: " + std::to_string(variance));
}

ExactPosterior::ExactPosterior(CovarianceSpec spec, HyperParams theta, Matrix states,
                               BidiagonalH h, Cholesky chol_q, Vector weights, double jitter)
    : spec_(std::move(spec)),
      theta_(std::move(theta)),
      states_(std::move(states)),
      h_(std::move(h)),
      chol_q_(std::move(chol_q)),
      weights_(std::move(weights)),
      jitter_applied_(jitter) {
  mean_coefficients_ = h_.apply_transpose(weights_);
}

ExactPosterior ExactPosterior::fit(const Trajectory& trajectory, const CovarianceSpec& spec,
                                   const HyperParams& theta) {
  trajectory.validate_structure();
  require(trajectory.dim() == spec.input_dim(), "trajectory dimension does not match spec");
  params::validate(spec, theta);
  const GramView k = gram(spec, theta, trajectory.states);
  const Matrix q = build_q(k.matrix, trajectory.discounts, theta.noise());
  CholeskyResult chol = factorize_q(q, trajectory.discounts, theta.v0());
  Vector weights = chol.factor.solve(trajectory.rewards);
  return ExactPosterior(spec, theta, trajectory.states, BidiagonalH(trajectory.discounts),
                        std::move(chol.factor), std::move(weights), chol.jitter_applied);
}

double ExactPosterior::predict_mean(const ConstVectorRef& query) const {
  return cross_covariance(spec_, theta_, states_, query).dot(mean_coefficients_);
}

double ExactPosterior::predict_variance(const ConstVectorRef& query) const {
  const Vector k = cross_covariance(spec_, theta_, states_, query);
  const double prior = eval_kernel(spec_, theta_, query, query);
  const Vector s = chol_q_.matrixL().solve(h_.apply(k));
  return clamp_variance(prior - s.squaredNorm(), theta_.v0());
}

ExactPosterior fit_exact(const Trajectory& trajectory, const CovarianceSpec& spec,
                         const HyperParams& theta) {
  return ExactPosterior::fit(trajectory, spec, theta);
}

}  // namespace gptd
