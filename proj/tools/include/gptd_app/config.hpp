#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gptd/envs/gridworld.hpp"
#include "gptd/envs/pendulum.hpp"
#include "gptd/model_selection.hpp"

namespace gptd::app {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { Gridworld, Pendulum, Custom };

std::string_view to_string(Experiment experiment);
Experiment parse_experiment(std::string_view text);

struct SparseConfig {
  bool enabled = false;
  double tol = 1e-1;
  Index max_subset = 1000;
};

struct PendulumConfig {
  PendulumSpec spec;
  FittedValueIterationOptions vi;
  PendulumRolloutOptions rollout;
  Index eval_resolution = 50;
};

// Everything a run needs. Loaded from JSON (see configs/ and the README for
// the schema); command line flags override individual fields afterwards.
struct RunConfig {
  Experiment experiment = Experiment::Gridworld;
  std::uint64_t seed = 1;
  Index num_transitions = 500;
  std::vector<Variant> variants{Variant::Isotropic, Variant::ArdDiagonal};
  int factor_rank = 1;
  std::optional<std::filesystem::path> trajectory;
  std::optional<std::filesystem::path> report;
  OptimizerOptions optimizer;
  SparseConfig sparse;
  std::vector<double> profile_tols{1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 1e-3, 1e-4};
  GridworldSpec gridworld;
  PendulumConfig pendulum;
  std::filesystem::path output_dir = "out";

  // Throws ConfigError.
  void validate() const;
};

// Defaults for an experiment before any file or flag is applied.
RunConfig default_config(Experiment experiment);

// Unknown keys and ill-typed values raise ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

CovarianceSpec make_spec(Variant variant, int input_dim, int factor_rank);

}  // namespace gptd::app
