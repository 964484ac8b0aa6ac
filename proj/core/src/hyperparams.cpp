#include "gptd/hyperparams.hpp"

#include <cmath>

#include "gptd/error.hpp"

namespace gptd {

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::Isotropic: return "Isotropic";
    case Variant::ArdDiagonal: return "ArdDiagonal";
    case Variant::FactorAnalysis: return "FactorAnalysis";
  }
  return "unknown";
}

std::string_view short_name(Variant variant) {
  switch (variant) {
    case Variant::Isotropic: return "iso";
    case Variant::ArdDiagonal: return "ard";
    case Variant::FactorAnalysis: return "fa";
  }
  return "unknown";
}

Variant parse_variant(std::string_view text) {
  if (text == "iso" || text == "Isotropic" || text == "I") return Variant::Isotropic;
  if (text == "ard" || text == "ArdDiagonal" || text == "II") return Variant::ArdDiagonal;
  if (text == "fa" || text == "FactorAnalysis" || text == "III") return Variant::FactorAnalysis;
  throw ContractViolation("unknown covariance variant '" + std::string(text) + "'");
}

CovarianceSpec::CovarianceSpec(Variant variant, int input_dim, int factor_rank)
    : variant_(variant), input_dim_(input_dim), factor_rank_(factor_rank) {
  require(input_dim >= 1, "input_dim must be >= 1");
  if (variant == Variant::FactorAnalysis) {
    require(factor_rank > 0 && factor_rank < input_dim,
            "factor_rank must satisfy 0 < k < D");
  } else {
    require(factor_rank == 0, "factor_rank only applies to FactorAnalysis");
  }
}

CovarianceSpec CovarianceSpec::isotropic(int input_dim) {
  return {Variant::Isotropic, input_dim, 0};
}

CovarianceSpec CovarianceSpec::ard(int input_dim) {
  return {Variant::ArdDiagonal, input_dim, 0};
}

CovarianceSpec CovarianceSpec::factor_analysis(int input_dim, int factor_rank) {
  return {Variant::FactorAnalysis, input_dim, factor_rank};
}

Index CovarianceSpec::num_params() const {
  switch (variant_) {
    case Variant::Isotropic: return params::kBlockStart + 1;
    case Variant::ArdDiagonal: return params::kBlockStart + input_dim_;
    case Variant::FactorAnalysis:
      return params::kBlockStart + input_dim_ * factor_rank_ + input_dim_;
  }
  return 0;
}

std::string CovarianceSpec::describe() const {
  std::string out(to_string(variant_));
  out += "(D=" + std::to_string(input_dim_);
  if (variant_ == Variant::FactorAnalysis) out += ", k=" + std::to_string(factor_rank_);
  return out + ")";
}

double HyperParams::v0() const { return std::exp(log_v0); }
double HyperParams::b() const { return std::exp(log_b); }
double HyperParams::noise() const { return std::exp(log_noise); }
double HyperParams::h() const { return std::exp(log_h); }
Vector HyperParams::a() const { return log_a.array().exp().matrix(); }

HyperParams HyperParams::isotropic(double v0, double b, double noise, double h) {
  require(v0 > 0.0 && b > 0.0 && noise > 0.0 && h > 0.0, "hyperparameters must be positive");
  HyperParams p;
  p.log_v0 = std::log(v0);
  p.log_b = std::log(b);
  p.log_noise = std::log(noise);
  p.log_h = std::log(h);
  return p;
}

HyperParams HyperParams::ard(double v0, double b, double noise, const Vector& a) {
  require(v0 > 0.0 && b > 0.0 && noise > 0.0 && (a.array() > 0.0).all(),
          "hyperparameters must be positive");
  HyperParams p;
  p.log_v0 = std::log(v0);
  p.log_b = std::log(b);
  p.log_noise = std::log(noise);
  p.log_a = a.array().log().matrix();
  return p;
}

HyperParams HyperParams::factor_analysis(double v0, double b, double noise,
                                         const Matrix& factors, const Vector& a) {
  HyperParams p = ard(v0, b, noise, a);
  p.factors = factors;
  return p;
}

namespace params {

void validate(const CovarianceSpec& spec, const HyperParams& theta) {
  auto finite = [](double v) { return std::isfinite(v); };
  require(finite(theta.log_v0) && finite(theta.log_b) && finite(theta.log_noise),
          "hyperparameters must be finite");
  const int dim = spec.input_dim();
  switch (spec.variant()) {
    case Variant::Isotropic:
      require(finite(theta.log_h), "log_h must be finite");
      break;
    case Variant::FactorAnalysis:
      require(theta.factors.rows() == dim && theta.factors.cols() == spec.factor_rank(),
              "factor matrix must be D x k");
      require(theta.factors.allFinite(), "factor entries must be finite");
      [[fallthrough]];
    case Variant::ArdDiagonal:
      require(theta.log_a.size() == dim, "log_a must have length D");
      require(theta.log_a.allFinite(), "log_a must be finite");
      break;
  }
}

Vector pack(const CovarianceSpec& spec, const HyperParams& theta) {
  validate(spec, theta);
  Vector out(spec.num_params());
  out[kLogV0] = theta.log_v0;
  out[kLogB] = theta.log_b;
  out[kLogNoise] = theta.log_noise;
  Index at = kBlockStart;
  switch (spec.variant()) {
    case Variant::Isotropic:
      out[at] = theta.log_h;
      break;
    case Variant::FactorAnalysis:
      for (Index j = 0; j < theta.factors.cols(); ++j)
        for (Index d = 0; d < theta.factors.rows(); ++d) out[at++] = theta.factors(d, j);
      [[fallthrough]];
    case Variant::ArdDiagonal:
      out.segment(at, spec.input_dim()) = theta.log_a;
      break;
  }
  return out;
}

HyperParams unpack(const CovarianceSpec& spec, const Vector& packed) {
  require(packed.size() == spec.num_params(), "packed parameter vector has wrong length");
  HyperParams theta;
  theta.log_v0 = packed[kLogV0];
  theta.log_b = packed[kLogB];
  theta.log_noise = packed[kLogNoise];
  Index at = kBlockStart;
  const int dim = spec.input_dim();
  switch (spec.variant()) {
    case Variant::Isotropic:
      theta.log_h = packed[at];
      break;
    case Variant::FactorAnalysis:
      theta.factors.resize(dim, spec.factor_rank());
      for (Index j = 0; j < spec.factor_rank(); ++j)
        for (Index d = 0; d < dim; ++d) theta.factors(d, j) = packed[at++];
      [[fallthrough]];
    case Variant::ArdDiagonal:
      theta.log_a = packed.segment(at, dim);
      break;
  }
  validate(spec, theta);
  return theta;
}

std::vector<std::string> names(const CovarianceSpec& spec) {
  std::vector<std::string> out{"log_v0", "log_b", "log_noise"};
  const int dim = spec.input_dim();
  switch (spec.variant()) {
    case Variant::Isotropic:
      out.emplace_back("log_h");
      break;
    case Variant::FactorAnalysis:
      for (int j = 0; j < spec.factor_rank(); ++j)
        for (int d = 0; d < dim; ++d)
          out.push_back("m_" + std::to_string(d + 1) + "_" + std::to_string(j + 1));
      [[fallthrough]];
    case Variant::ArdDiagonal:
      for (int d = 0; d < dim; ++d) out.push_back("log_a_" + std::to_string(d + 1));
      break;
  }
  return out;
}

std::vector<bool> log_scaled(const CovarianceSpec& spec) {
  std::vector<bool> out(static_cast<std::size_t>(spec.num_params()), true);
  if (spec.variant() == Variant::FactorAnalysis) {
    const Index count = static_cast<Index>(spec.input_dim()) * spec.factor_rank();
    for (Index i = 0; i < count; ++i) out[static_cast<std::size_t>(kBlockStart + i)] = false;
  }
  return out;
}

}  // namespace params

}  // namespace gptd
