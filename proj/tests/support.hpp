#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "gptd/gptd.hpp"
#include "gptd/hyperparams.hpp"

namespace gptd::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline Matrix random_matrix(Rng& rng, Index rows, Index cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = scale * normal(rng);
  return m;
}

inline Vector random_vector(Rng& rng, Index n, double scale = 1.0) {
  return random_matrix(rng, n, 1, scale).col(0);
}

// Random walk states with occasional episode stitches (gamma = 0, reward 0).
inline Trajectory random_trajectory(Rng& rng, Index n, int dim, double gamma = 0.9,
                                    double stitch_prob = 0.1) {
  Trajectory t;
  t.states.resize(n, dim);
  t.rewards.resize(n - 1);
  t.discounts.resize(n - 1);
  Vector x = random_vector(rng, dim);
  for (Index i = 0; i < n; ++i) {
    t.states.row(i) = x.transpose();
    if (i + 1 == n) break;
    if (uniform(rng, 0.0, 1.0) < stitch_prob) {
      t.rewards[i] = 0.0;
      t.discounts[i] = 0.0;
      x = random_vector(rng, dim);
    } else {
      t.rewards[i] = normal(rng);
      t.discounts[i] = gamma;
      x += random_vector(rng, dim, 0.4);
    }
  }
  return t;
}

inline HyperParams random_theta(const CovarianceSpec& spec, Rng& rng) {
  HyperParams th;
  th.log_v0 = uniform(rng, -0.5, 0.5);
  th.log_b = uniform(rng, -3.0, -1.0);
  th.log_noise = uniform(rng, -2.0, -0.5);
  const int d = spec.input_dim();
  switch (spec.variant()) {
    case Variant::Isotropic:
      th.log_h = uniform(rng, -1.0, 0.5);
      break;
    case Variant::ArdDiagonal:
      th.log_a = Vector(d);
      for (int i = 0; i < d; ++i) th.log_a[i] = uniform(rng, -1.0, 0.5);
      break;
    case Variant::FactorAnalysis:
      th.log_a = Vector(d);
      for (int i = 0; i < d; ++i) th.log_a[i] = uniform(rng, -1.5, 0.0);
      th.factors = random_matrix(rng, d, spec.factor_rank(), 0.5);
      break;
  }
  return th;
}

// Independent reconstruction of Omega from the raw parameters.
inline Matrix oracle_omega(const CovarianceSpec& spec, const HyperParams& th) {
  const int d = spec.input_dim();
  switch (spec.variant()) {
    case Variant::Isotropic:
      return std::exp(th.log_h) * Matrix::Identity(d, d);
    case Variant::ArdDiagonal:
      return th.log_a.array().exp().matrix().asDiagonal();
    case Variant::FactorAnalysis: {
      Matrix o = th.factors * th.factors.transpose();
      for (int i = 0; i < d; ++i) o(i, i) += std::exp(th.log_a[i]);
      return o;
    }
  }
  return {};
}

inline double oracle_kernel(const Matrix& omega, double v0, double b, const Vector& x,
                            const Vector& y) {
  const Vector d = x - y;
  return v0 * std::exp(-0.5 * d.dot(omega * d)) + b;
}

inline Matrix oracle_gram(const CovarianceSpec& spec, const HyperParams& th, const Matrix& x,
                          const Matrix& y) {
  const Matrix om = oracle_omega(spec, th);
  Matrix k(x.rows(), y.rows());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < y.rows(); ++j)
      k(i, j) = oracle_kernel(om, std::exp(th.log_v0), std::exp(th.log_b), x.row(i).transpose(),
                              y.row(j).transpose());
  return k;
}

inline Matrix dense_h(const Vector& discounts) {
  const Index m = discounts.size();
  Matrix h = Matrix::Zero(m, m + 1);
  for (Index i = 0; i < m; ++i) {
    h(i, i) = 1.0;
    h(i, i + 1) = -discounts[i];
  }
  return h;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline double rel_frobenius(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace gptd::testing
