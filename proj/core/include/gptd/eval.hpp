#pragma once

#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include "gptd/model_selection.hpp"
#include "gptd/sparse.hpp"

namespace gptd {

template <typename Model>
concept MeanPredictor = requires(const Model& model, const Vector& x) {
  { model.predict_mean(x) } -> std::convertible_to<double>;
};

template <MeanPredictor Model>
Vector predict_means(const Model& model, const ConstMatrixRef& points) {
  Vector out(points.rows());
  for (Index i = 0; i < points.rows(); ++i) out[i] = model.predict_mean(Vector(points.row(i).transpose()));
  return out;
}

double mean_squared_error(const ConstVectorRef& predictions, const ConstVectorRef& truth);

template <MeanPredictor Model>
double mse_on_points(const Model& model, const ConstMatrixRef& points, const ConstVectorRef& truth) {
  return mean_squared_error(predict_means(model, points), truth);
}

// Eigenvalues of a symmetric matrix in descending order.
Vector eigenspectrum(const ConstMatrixRef& matrix);

struct IcdProfileEntry {
  double tol;
  Index m;
  double frob_error;  // ||K - K_tilde||_F against the exact Gram
};

// Largest input accepted by icd_profile (it forms the full Gram).
inline constexpr Index kProfileGuard = 2000;

std::vector<IcdProfileEntry> icd_profile(const CovarianceSpec& spec, const HyperParams& theta,
                                         const ConstMatrixRef& x, const std::vector<double>& tols);

// Everything reported for one covariance variant in a run.
struct VariantReport {
  CovarianceSpec spec = CovarianceSpec::isotropic(1);
  bool ok = false;
  std::string error;
  HyperParams theta;
  LikelihoodReport likelihood;
  bool converged = false;
  int evaluations = 0;
  double trajectory_mse = 0.0;
  double grid_mse = 0.0;
  Vector eigenspectrum;
  std::vector<IcdProfileEntry> icd;
  // Filled when sparse inference is enabled.
  Index sparse_subset_size = 0;
  double sparse_grid_mse = 0.0;
};

struct ComparisonReport {
  std::string experiment;
  std::uint64_t seed = 0;
  Index num_transitions = 0;
  std::vector<VariantReport> variants;

  const VariantReport* find(Variant variant) const;
};

// Clamps eigenvalues in [-1e-8 * trace, 0) to zero.
Vector clamp_spectrum(const Vector& spectrum);

}  // namespace gptd
