#include "gptd/report.hpp"

#include <cmath>

#include "gptd/error.hpp"
#include "gptd/kernel.hpp"

namespace gptd {
namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

nlohmann::json vector_json(const Vector& v) {
  auto out = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

Vector vector_from_json(const nlohmann::json& j) {
  require(j.is_array(), "expected a JSON array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j[i].get<double>();
  return v;
}

}  // namespace

nlohmann::json to_json(const CovarianceSpec& spec) {
  nlohmann::json j;
  j["variant"] = std::string(short_name(spec.variant()));
  j["input_dim"] = spec.input_dim();
  if (spec.variant() == Variant::FactorAnalysis) j["factor_rank"] = spec.factor_rank();
  return j;
}

CovarianceSpec spec_from_json(const nlohmann::json& j) {
  const Variant v = parse_variant(j.at("variant").get<std::string>());
  const int dim = j.at("input_dim").get<int>();
  switch (v) {
    case Variant::Isotropic:
      return CovarianceSpec::isotropic(dim);
    case Variant::ArdDiagonal:
      return CovarianceSpec::ard(dim);
    case Variant::FactorAnalysis:
      return CovarianceSpec::factor_analysis(dim, j.at("factor_rank").get<int>());
  }
  throw ContractViolation("unknown variant");
}

nlohmann::json to_json(const CovarianceSpec& spec, const HyperParams& theta) {
  const Vector packed = params::pack(spec, theta);
  const auto names = params::names(spec);
  nlohmann::json j;
  j["packed"] = vector_json(packed);
  nlohmann::json named = nlohmann::json::object();
  for (std::size_t i = 0; i < names.size(); ++i) named[names[i]] = number(packed[static_cast<Index>(i)]);
  j["named"] = std::move(named);
  j["v0"] = number(theta.v0());
  j["b"] = number(theta.b());
  j["noise"] = number(theta.noise());
  if (spec.variant() != Variant::Isotropic) {
    const OmegaEigen eig = omega_eigendecomposition(spec, theta);
    nlohmann::json omega;
    omega["scales"] = vector_json(eig.scales);
    auto dirs = nlohmann::json::array();
    for (Index c = 0; c < eig.directions.cols(); ++c) dirs.push_back(vector_json(eig.directions.col(c)));
    omega["directions"] = std::move(dirs);
    j["omega"] = std::move(omega);
  }
  return j;
}

HyperParams theta_from_json(const CovarianceSpec& spec, const nlohmann::json& j) {
  const Vector packed = vector_from_json(j.at("packed"));
  require(packed.size() == spec.num_params(), "parameter vector length does not match the covariance");
  return params::unpack(spec, packed);
}

nlohmann::json to_json(const LikelihoodReport& report) {
  return {{"total", number(report.total)},
          {"complexity", number(report.complexity)},
          {"data_fit", number(report.data_fit)},
          {"constant", number(report.constant)}};
}

nlohmann::json to_json(const VariantReport& report) {
  nlohmann::json j;
  j["covariance"] = to_json(report.spec);
  j["ok"] = report.ok;
  if (!report.ok) {
    j["error"] = report.error;
    return j;
  }
  j["theta"] = to_json(report.spec, report.theta);
  j["log_likelihood"] = to_json(report.likelihood);
  j["converged"] = report.converged;
  j["evaluations"] = report.evaluations;
  j["trajectory_mse"] = number(report.trajectory_mse);
  j["grid_mse"] = number(report.grid_mse);
  if (report.sparse_subset_size > 0) {
    j["sparse_subset_size"] = report.sparse_subset_size;
    j["sparse_grid_mse"] = number(report.sparse_grid_mse);
  }
  return j;
}

nlohmann::json to_json(const ComparisonReport& report) {
  nlohmann::json j;
  j["experiment"] = report.experiment;
  j["seed"] = report.seed;
  j["num_transitions"] = report.num_transitions;
  auto variants = nlohmann::json::array();
  for (const auto& v : report.variants) variants.push_back(to_json(v));
  j["variants"] = std::move(variants);
  return j;
}

std::string dump_report(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace gptd
