#include "gptd/eval.hpp"

#include <Eigen/Eigenvalues>

#include "gptd/error.hpp"

namespace gptd {

double mean_squared_error(const ConstVectorRef& predictions, const ConstVectorRef& truth) {
  require(predictions.size() == truth.size(), "mse: size mismatch");
  require(truth.size() > 0, "mse: empty input");
  require(truth.allFinite(), "mse: truth must be finite");
  return (predictions - truth).squaredNorm() / static_cast<double>(truth.size());
}

Vector eigenspectrum(const ConstMatrixRef& matrix) {
  require(matrix.rows() == matrix.cols(), "eigenspectrum: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalFailure("symmetric eigensolver failed");
  return solver.eigenvalues().reverse();
}

Vector clamp_spectrum(const Vector& spectrum) {
  const double floor = -1e-8 * spectrum.sum();
  Vector out = spectrum;
  for (Index i = 0; i < out.size(); ++i)
    if (out[i] < 0.0 && out[i] >= floor) out[i] = 0.0;
  return out;
}

std::vector<IcdProfileEntry> icd_profile(const CovarianceSpec& spec, const HyperParams& theta,
                                         const ConstMatrixRef& x, const std::vector<double>& tols) {
  require(x.rows() <= kProfileGuard, "icd_profile: input exceeds the exact-Gram size guard");
  for (std::size_t i = 0; i < tols.size(); ++i) {
    require(tols[i] > 0.0, "icd_profile: tolerances must be positive");
    if (i > 0) require(tols[i] < tols[i - 1], "icd_profile: tolerances must be descending");
  }
  const Matrix k = gram(spec, theta, x).matrix;
  std::vector<IcdProfileEntry> out;
  out.reserve(tols.size());
  for (double tol : tols) {
    const SubsetSelection sel = icd_select(spec, theta, x, tol, x.rows());
    Matrix residual = k;
    residual.noalias() -= sel.factor * sel.factor.transpose();
    out.push_back({tol, static_cast<Index>(sel.indices.size()), residual.norm()});
  }
  return out;
}

const VariantReport* ComparisonReport::find(Variant variant) const {
  for (const auto& v : variants)
    if (v.spec.variant() == variant) return &v;
  return nullptr;
}

}  // namespace gptd
