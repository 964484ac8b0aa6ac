#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "gptd/eval.hpp"
#include "gptd_app/config.hpp"

namespace gptd::app {

struct Simulation {
  Trajectory trajectory;
  Index episodes = 0;
  Index capped_episodes = 0;
  nlohmann::json manifest;
};

// Rolls out the configured environment. Custom experiments cannot be simulated.
Simulation simulate(const RunConfig& config);

// Reference values for an environment.
struct GroundTruth {
  ValueGrid grid;  // on the evaluation grid
  std::function<double(const ConstVectorRef&)> value;

  Vector at(const ConstMatrixRef& states) const;
};

// nullopt for custom experiments.
std::optional<GroundTruth> ground_truth(const RunConfig& config);

// Uses the configured trajectory file when present, otherwise simulates.
Trajectory load_or_simulate(const RunConfig& config);

struct VariantFit {
  VariantReport report;
  std::optional<ExactPosterior> posterior;
  std::optional<SparsePosterior> sparse;
};

struct FitOptions {
  bool optimize = true;  // false: take theta from `initial` as is
  bool profile = false;  // eigenspectrum and ICD profile at the final theta
  std::vector<std::optional<HyperParams>> initial;  // per variant, optional
};

// Optimizes, fits and evaluates every configured variant. Failures are
// recorded in the variant's report and do not stop the run.
std::vector<VariantFit> fit_variants(const RunConfig& config, const Trajectory& trajectory,
                                     const GroundTruth* truth, const FitOptions& options);

ComparisonReport comparison_report(const RunConfig& config, const Trajectory& trajectory,
                                   const std::vector<VariantFit>& fits);

// Mean predictions on the evaluation grid of `truth`.
template <MeanPredictor Model>
ValueGrid predict_grid(const Model& model, const ValueGrid& like) {
  ValueGrid out = like;
  const Matrix nodes = like.nodes();
  const Vector mean = predict_means(model, nodes);
  out.values = Eigen::Map<const Matrix>(mean.data(), like.first.resolution, like.second.resolution);
  return out;
}

}  // namespace gptd::app
