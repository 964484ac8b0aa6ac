#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gptd/error.hpp"
#include "gptd/hyperparams.hpp"
#include "support.hpp"

namespace gptd {
namespace {

TEST(CovarianceSpec, ParameterCounts) {
  EXPECT_EQ(CovarianceSpec::isotropic(4).num_params(), 4);
  EXPECT_EQ(CovarianceSpec::ard(4).num_params(), 7);
  EXPECT_EQ(CovarianceSpec::factor_analysis(4, 2).num_params(), 3 + 8 + 4);
  EXPECT_EQ(CovarianceSpec::ard(3).factor_rank(), 0);
}

TEST(CovarianceSpec, RejectsInvalidShapes) {
  EXPECT_THROW(CovarianceSpec::isotropic(0), ContractViolation);
  EXPECT_THROW(CovarianceSpec::factor_analysis(2, 0), ContractViolation);
  EXPECT_THROW(CovarianceSpec::factor_analysis(2, 2), ContractViolation);
  EXPECT_THROW(CovarianceSpec::factor_analysis(1, 1), ContractViolation);
}

TEST(Variant, ParsesShortAndLongNames) {
  EXPECT_EQ(parse_variant("iso"), Variant::Isotropic);
  EXPECT_EQ(parse_variant("ard"), Variant::ArdDiagonal);
  EXPECT_EQ(parse_variant("fa"), Variant::FactorAnalysis);
  EXPECT_EQ(parse_variant("FactorAnalysis"), Variant::FactorAnalysis);
  EXPECT_EQ(parse_variant("II"), Variant::ArdDiagonal);
  EXPECT_THROW(parse_variant("rbf"), ContractViolation);
  for (Variant v : {Variant::Isotropic, Variant::ArdDiagonal, Variant::FactorAnalysis})
    EXPECT_EQ(parse_variant(short_name(v)), v);
}

TEST(Params, PackUnpackRoundTrip) {
  testing::Rng rng(1);
  for (const auto& spec : {CovarianceSpec::isotropic(3), CovarianceSpec::ard(3),
                           CovarianceSpec::factor_analysis(3, 2)}) {
    const HyperParams th = testing::random_theta(spec, rng);
    const Vector p = params::pack(spec, th);
    ASSERT_EQ(p.size(), spec.num_params());
    EXPECT_EQ(params::pack(spec, params::unpack(spec, p)), p);
    EXPECT_EQ(static_cast<Index>(params::names(spec).size()), spec.num_params());
    EXPECT_EQ(static_cast<Index>(params::log_scaled(spec).size()), spec.num_params());
    EXPECT_EQ(p[params::kLogNoise], th.log_noise);
  }
}

TEST(Params, FactorBlockIsColumnMajorThenLogA) {
  const auto spec = CovarianceSpec::factor_analysis(3, 2);
  Matrix m{{1, 4}, {2, 5}, {3, 6}};
  const HyperParams th = HyperParams::factor_analysis(1.0, 1.0, 1.0, m, Vector::Constant(3, std::exp(7.0)));
  const Vector p = params::pack(spec, th);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(p[params::kBlockStart + i], i + 1.0);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(p[params::kBlockStart + 6 + i], 7.0, 1e-14);
  const auto names = params::names(spec);
  EXPECT_EQ(names[params::kBlockStart], "m_1_1");
  EXPECT_EQ(names[params::kBlockStart + 1], "m_2_1");
  const auto logs = params::log_scaled(spec);
  EXPECT_FALSE(logs[params::kBlockStart]);
  EXPECT_TRUE(logs[params::kBlockStart + 6]);
}

TEST(Params, ValidateRejectsMismatchAndNonFinite) {
  const auto spec = CovarianceSpec::ard(2);
  HyperParams th = HyperParams::ard(1.0, 0.1, 0.1, Vector::Ones(3));
  EXPECT_THROW(params::validate(spec, th), ContractViolation);
  th = HyperParams::ard(1.0, 0.1, 0.1, Vector::Ones(2));
  EXPECT_NO_THROW(params::validate(spec, th));
  th.log_noise = std::numeric_limits<double>::infinity();
  EXPECT_THROW(params::validate(spec, th), ContractViolation);
  EXPECT_THROW(params::unpack(spec, Vector::Zero(4)), ContractViolation);
}

TEST(HyperParams, AccessorsExponentiate) {
  const HyperParams th = HyperParams::isotropic(2.0, 0.5, 0.25, 4.0);
  EXPECT_NEAR(th.v0(), 2.0, 1e-15);
  EXPECT_NEAR(th.b(), 0.5, 1e-15);
  EXPECT_NEAR(th.noise(), 0.25, 1e-15);
  EXPECT_NEAR(th.h(), 4.0, 1e-15);
  EXPECT_THROW(HyperParams::isotropic(-1.0, 0.5, 0.25, 4.0), ContractViolation);
}

}  // namespace
}  // namespace gptd
