#pragma once

#include <string>
#include <vector>

#include "gptd/hyperparams.hpp"
#include "gptd/types.hpp"

namespace gptd {

// Squared-exponential covariance with bias:
//   k(x, x') = v0 * exp(-1/2 (x - x')^T Omega (x - x')) + b
// Inputs are row-major: each row of X is one state.

// Diagonal jitter added by consumers before a Cholesky retry, relative to v0.
inline constexpr double kGramJitter = 1e-10;

struct GramView {
  Matrix matrix;
  double jitter_applied = 0.0;
};

struct ParamGradient {
  Index param_index;  // position in the packed HyperParams vector
  std::string name;
  Matrix matrix;      // dK/dtheta_i (log-space for positive parameters)
};

struct OmegaEigen {
  Matrix directions;  // columns are orthonormal eigenvectors of Omega
  Vector scales;      // matching eigenvalues, descending
};

Matrix omega(const CovarianceSpec& spec, const HyperParams& theta);

double eval_kernel(const CovarianceSpec& spec, const HyperParams& theta,
                   const ConstVectorRef& x, const ConstVectorRef& x_prime);

Matrix gram(const CovarianceSpec& spec, const HyperParams& theta,
            const ConstMatrixRef& x, const ConstMatrixRef& x_prime);

// Symmetric training Gram. Jitter of kGramJitter * v0 is added to the diagonal
// only when requested.
GramView gram(const CovarianceSpec& spec, const HyperParams& theta,
              const ConstMatrixRef& x, bool add_jitter = false);

// Covariances between one query and every row of x.
Vector cross_covariance(const CovarianceSpec& spec, const HyperParams& theta,
                        const ConstMatrixRef& x, const ConstVectorRef& query);

// One matrix per kernel hyperparameter (every packed entry except log_noise).
std::vector<ParamGradient> kernel_param_gradients(const CovarianceSpec& spec,
                                                  const HyperParams& theta,
                                                  const ConstMatrixRef& x);

// sum_kl weights(k,l) * dK(k,l)/dtheta_i for every kernel hyperparameter,
// without materializing the derivative matrices. `weights` must be symmetric.
// The result is indexed like the packed vector; the log_noise slot is zero.
Vector contract_param_gradients(const CovarianceSpec& spec, const HyperParams& theta,
                                const ConstMatrixRef& x, const ConstMatrixRef& weights);

OmegaEigen omega_eigendecomposition(const CovarianceSpec& spec, const HyperParams& theta);

}  // namespace gptd
