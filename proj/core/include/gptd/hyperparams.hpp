#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gptd/types.hpp"

namespace gptd {

// Structure of Omega in k(x,x') = v0 exp(-1/2 (x-x')^T Omega (x-x')) + b.
enum class Variant {
  Isotropic,       // Omega = h I
  ArdDiagonal,     // Omega = diag(a)
  FactorAnalysis,  // Omega = M M^T + diag(a), M is D x k
};

std::string_view to_string(Variant variant);
// Accepts "iso", "ard", "fa" and the long enum names.
Variant parse_variant(std::string_view text);
// Short tag used in file names and on the command line.
std::string_view short_name(Variant variant);

class CovarianceSpec {
 public:
  static CovarianceSpec isotropic(int input_dim);
  static CovarianceSpec ard(int input_dim);
  static CovarianceSpec factor_analysis(int input_dim, int factor_rank);

  Variant variant() const { return variant_; }
  int input_dim() const { return input_dim_; }
  // Zero unless the variant is FactorAnalysis.
  int factor_rank() const { return factor_rank_; }

  // Length of the packed parameter vector, noise included.
  Index num_params() const;
  std::string describe() const;

  bool operator==(const CovarianceSpec&) const = default;

 private:
  CovarianceSpec(Variant variant, int input_dim, int factor_rank);

  Variant variant_;
  int input_dim_;
  int factor_rank_;
};

// Hyperparameters in log space. Only the block matching the paired spec is
// used: log_h for Isotropic, log_a for ArdDiagonal, factors + log_a for
// FactorAnalysis. Factor entries are unconstrained.
//
// Packed layout: [log_v0, log_b, log_noise, block...] where the
// FactorAnalysis block is factors (column-major, D*k) followed by log_a.
struct HyperParams {
  double log_v0 = 0.0;
  double log_b = -2.0;
  double log_noise = -2.0;
  double log_h = 0.0;
  Vector log_a;
  Matrix factors;

  double v0() const;
  double b() const;
  double noise() const;
  double h() const;
  Vector a() const;

  static HyperParams isotropic(double v0, double b, double noise, double h);
  static HyperParams ard(double v0, double b, double noise, const Vector& a);
  static HyperParams factor_analysis(double v0, double b, double noise,
                                     const Matrix& factors, const Vector& a);
};

namespace params {

inline constexpr Index kLogV0 = 0;
inline constexpr Index kLogB = 1;
inline constexpr Index kLogNoise = 2;
inline constexpr Index kBlockStart = 3;

// Throws ContractViolation when shapes disagree or entries are not finite.
void validate(const CovarianceSpec& spec, const HyperParams& theta);

Vector pack(const CovarianceSpec& spec, const HyperParams& theta);
HyperParams unpack(const CovarianceSpec& spec, const Vector& packed);

std::vector<std::string> names(const CovarianceSpec& spec);
// True for entries stored as logarithms of positive quantities.
std::vector<bool> log_scaled(const CovarianceSpec& spec);

}  // namespace params

}  // namespace gptd
