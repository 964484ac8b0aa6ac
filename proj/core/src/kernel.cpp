#include "gptd/kernel.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "gptd/error.hpp"

namespace gptd {
namespace {

// Above this many terms the distance sums switch to Neumaier summation.
constexpr int kCompensatedThreshold = 32;

class Sum {
 public:
  explicit Sum(bool compensated) : compensated_(compensated) {}

  void add(double v) {
    if (!compensated_) {
      sum_ += v;
      return;
    }
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      carry_ += (sum_ - t) + v;
    else
      carry_ += (v - t) + sum_;
    sum_ = t;
  }

  double value() const { return sum_ + carry_; }

 private:
  bool compensated_;
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// Evaluates delta^T Omega delta for pairs of points stored as contiguous
// columns, keeping delta and M^T delta around for derivative code.
class Metric {
 public:
  Metric(const CovarianceSpec& spec, const HyperParams& theta)
      : variant_(spec.variant()),
        dim_(spec.input_dim()),
        rank_(spec.factor_rank()),
        compensated_(spec.input_dim() + spec.factor_rank() > kCompensatedThreshold),
        v0_(theta.v0()),
        b_(theta.b()),
        delta_(dim_),
        proj_(rank_) {
    params::validate(spec, theta);
    if (variant_ == Variant::Isotropic) {
      h_ = theta.h();
    } else {
      a_ = theta.a();
      if (variant_ == Variant::FactorAnalysis) factors_ = theta.factors;
    }
  }

  double quad(const double* xi, const double* xj) {
    for (int d = 0; d < dim_; ++d) delta_[d] = xi[d] - xj[d];
    Sum sum(compensated_);
    switch (variant_) {
      case Variant::Isotropic:
        for (int d = 0; d < dim_; ++d) sum.add(delta_[d] * delta_[d]);
        return h_ * sum.value();
      case Variant::FactorAnalysis:
        for (int j = 0; j < rank_; ++j) {
          Sum dot(compensated_);
          for (int d = 0; d < dim_; ++d) dot.add(factors_(d, j) * delta_[d]);
          proj_[j] = dot.value();
          sum.add(proj_[j] * proj_[j]);
        }
        [[fallthrough]];
      case Variant::ArdDiagonal:
        for (int d = 0; d < dim_; ++d) sum.add(a_[d] * delta_[d] * delta_[d]);
        return sum.value();
    }
    return 0.0;
  }

  double kernel(const double* xi, const double* xj) {
    return v0_ * std::exp(-0.5 * quad(xi, xj)) + b_;
  }

  // Accumulates scale * d k / d theta_i for the last evaluated pair into out,
  // where c = exp(-q/2). Indices follow the packed layout.
  void accumulate_gradient(double c, double scale, double* out) const {
    out[params::kLogV0] += scale * v0_ * c;
    out[params::kLogB] += scale * b_;
    const double vc = scale * v0_ * c;
    Index at = params::kBlockStart;
    switch (variant_) {
      case Variant::Isotropic: {
        double sq = 0.0;
        for (int d = 0; d < dim_; ++d) sq += delta_[d] * delta_[d];
        out[at] += -0.5 * h_ * vc * sq;
        break;
      }
      case Variant::FactorAnalysis:
        for (int j = 0; j < rank_; ++j)
          for (int d = 0; d < dim_; ++d) out[at++] += -vc * proj_[j] * delta_[d];
        [[fallthrough]];
      case Variant::ArdDiagonal:
        for (int d = 0; d < dim_; ++d) out[at + d] += -0.5 * a_[d] * vc * delta_[d] * delta_[d];
        break;
    }
  }

  double v0() const { return v0_; }
  double b() const { return b_; }

 private:
  Variant variant_;
  int dim_;
  int rank_;
  bool compensated_;
  double v0_;
  double b_;
  double h_ = 0.0;
  Vector a_;
  Matrix factors_;
  Vector delta_;
  Vector proj_;
};

Matrix as_columns(const ConstMatrixRef& x, int dim, const char* what) {
  require(x.cols() == dim, std::string(what) + ": input dimension does not match spec");
  return x.transpose();
}

}  // namespace

Matrix omega(const CovarianceSpec& spec, const HyperParams& theta) {
  params::validate(spec, theta);
  const int dim = spec.input_dim();
  switch (spec.variant()) {
    case Variant::Isotropic:
      return theta.h() * Matrix::Identity(dim, dim);
    case Variant::ArdDiagonal:
      return theta.a().asDiagonal();
    case Variant::FactorAnalysis: {
      Matrix out = theta.factors * theta.factors.transpose();
      out.diagonal() += theta.a();
      return out;
    }
  }
  return {};
}

double eval_kernel(const CovarianceSpec& spec, const HyperParams& theta,
                   const ConstVectorRef& x, const ConstVectorRef& x_prime) {
  require(x.size() == spec.input_dim() && x_prime.size() == spec.input_dim(),
          "eval_kernel: input dimension does not match spec");
  Metric metric(spec, theta);
  const Vector xi = x;
  const Vector xj = x_prime;
  return metric.kernel(xi.data(), xj.data());
}

Matrix gram(const CovarianceSpec& spec, const HyperParams& theta,
            const ConstMatrixRef& x, const ConstMatrixRef& x_prime) {
  const Matrix left = as_columns(x, spec.input_dim(), "gram");
  const Matrix right = as_columns(x_prime, spec.input_dim(), "gram");
  Metric metric(spec, theta);
  Matrix out(left.cols(), right.cols());
  for (Index j = 0; j < right.cols(); ++j)
    for (Index i = 0; i < left.cols(); ++i)
      out(i, j) = metric.kernel(left.col(i).data(), right.col(j).data());
  return out;
}

GramView gram(const CovarianceSpec& spec, const HyperParams& theta,
              const ConstMatrixRef& x, bool add_jitter) {
  const Matrix pts = as_columns(x, spec.input_dim(), "gram");
  Metric metric(spec, theta);
  const Index n = pts.cols();
  GramView view;
  view.matrix.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    view.matrix(j, j) = metric.v0() + metric.b();
    for (Index i = j + 1; i < n; ++i) {
      const double k = metric.kernel(pts.col(i).data(), pts.col(j).data());
      view.matrix(i, j) = k;
      view.matrix(j, i) = k;
    }
  }
  if (add_jitter) {
    view.jitter_applied = kGramJitter * metric.v0();
    view.matrix.diagonal().array() += view.jitter_applied;
  }
  return view;
}

Vector cross_covariance(const CovarianceSpec& spec, const HyperParams& theta,
                        const ConstMatrixRef& x, const ConstVectorRef& query) {
  require(query.size() == spec.input_dim(), "query dimension does not match spec");
  const Matrix pts = as_columns(x, spec.input_dim(), "cross_covariance");
  const Vector q = query;
  Metric metric(spec, theta);
  Vector out(pts.cols());
  for (Index i = 0; i < pts.cols(); ++i) out[i] = metric.kernel(q.data(), pts.col(i).data());
  return out;
}

std::vector<ParamGradient> kernel_param_gradients(const CovarianceSpec& spec,
                                                  const HyperParams& theta,
                                                  const ConstMatrixRef& x) {
  require(x.rows() > 0, "kernel_param_gradients: empty input");
  const Matrix pts = as_columns(x, spec.input_dim(), "kernel_param_gradients");
  Metric metric(spec, theta);
  const Index n = pts.cols();
  const Index count = spec.num_params();
  const auto names = params::names(spec);

  std::vector<Matrix> mats(static_cast<std::size_t>(count), Matrix::Zero(n, n));
  Vector buffer(count);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j; i < n; ++i) {
      const double c = std::exp(-0.5 * metric.quad(pts.col(i).data(), pts.col(j).data()));
      buffer.setZero();
      metric.accumulate_gradient(c, 1.0, buffer.data());
      for (Index p = 0; p < count; ++p) {
        mats[static_cast<std::size_t>(p)](i, j) = buffer[p];
        mats[static_cast<std::size_t>(p)](j, i) = buffer[p];
      }
    }
  }

  std::vector<ParamGradient> out;
  for (Index p = 0; p < count; ++p) {
    if (p == params::kLogNoise) continue;
    out.push_back({p, names[static_cast<std::size_t>(p)],
                   std::move(mats[static_cast<std::size_t>(p)])});
  }
  return out;
}

Vector contract_param_gradients(const CovarianceSpec& spec, const HyperParams& theta,
                                const ConstMatrixRef& x, const ConstMatrixRef& weights) {
  const Matrix pts = as_columns(x, spec.input_dim(), "contract_param_gradients");
  const Index n = pts.cols();
  require(weights.rows() == n && weights.cols() == n, "weights must be n x n");
  Metric metric(spec, theta);
  Vector out = Vector::Zero(spec.num_params());
  for (Index j = 0; j < n; ++j) {
    // Diagonal: delta = 0, so only v0 and b contribute.
    out[params::kLogV0] += weights(j, j) * metric.v0();
    out[params::kLogB] += weights(j, j) * metric.b();
    for (Index i = j + 1; i < n; ++i) {
      const double w = weights(i, j) + weights(j, i);
      const double c = std::exp(-0.5 * metric.quad(pts.col(i).data(), pts.col(j).data()));
      metric.accumulate_gradient(c, w, out.data());
    }
  }
  out[params::kLogNoise] = 0.0;
  return out;
}

OmegaEigen omega_eigendecomposition(const CovarianceSpec& spec, const HyperParams& theta) {
  const int dim = spec.input_dim();
  OmegaEigen out;
  if (spec.variant() == Variant::Isotropic) {
    out.directions = Matrix::Identity(dim, dim);
    out.scales = Vector::Constant(dim, theta.h());
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(omega(spec, theta));
  if (solver.info() != Eigen::Success) throw NumericalFailure("eigendecomposition of Omega failed");
  out.directions = solver.eigenvectors().rowwise().reverse();
  out.scales = solver.eigenvalues().reverse();
  // Sign convention: the largest-magnitude component of each direction is positive.
  for (int j = 0; j < dim; ++j) {
    Index arg = 0;
    out.directions.col(j).cwiseAbs().maxCoeff(&arg);
    if (out.directions(arg, j) < 0.0) out.directions.col(j) *= -1.0;
  }
  return out;
}

}  // namespace gptd
