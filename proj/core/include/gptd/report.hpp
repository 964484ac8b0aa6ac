#pragma once

#include <nlohmann/json.hpp>

#include "gptd/eval.hpp"

namespace gptd {

nlohmann::json to_json(const CovarianceSpec& spec);
CovarianceSpec spec_from_json(const nlohmann::json& j);

// Includes the packed vector, named entries and, for non-isotropic variants,
// the eigendecomposition of Omega.
nlohmann::json to_json(const CovarianceSpec& spec, const HyperParams& theta);
HyperParams theta_from_json(const CovarianceSpec& spec, const nlohmann::json& j);

nlohmann::json to_json(const LikelihoodReport& report);
nlohmann::json to_json(const VariantReport& report);
nlohmann::json to_json(const ComparisonReport& report);

// Pretty-printed with a trailing newline.
std::string dump_report(const nlohmann::json& j);

}  // namespace gptd
