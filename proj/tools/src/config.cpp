#include "gptd_app/config.hpp"

#include <fstream>
#include <set>

#include "gptd/error.hpp"

namespace gptd::app {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void read_index(const json& j, const char* key, Index& out, const std::string& where) {
  long long v = out;
  read(j, key, v, where);
  out = static_cast<Index>(v);
}

void read_optimizer(const json& j, OptimizerOptions& o) {
  check_keys(j, "optimizer",
             {"max_iter", "grad_tol", "rel_value_tol", "restarts", "perturbation", "log_bound"});
  read(j, "max_iter", o.max_iter, "optimizer");
  read(j, "grad_tol", o.grad_tol, "optimizer");
  read(j, "rel_value_tol", o.rel_value_tol, "optimizer");
  read(j, "restarts", o.restarts, "optimizer");
  read(j, "perturbation", o.perturbation, "optimizer");
  read(j, "log_bound", o.log_bound, "optimizer");
}

void read_sparse(const json& j, SparseConfig& s) {
  check_keys(j, "sparse", {"enabled", "tol", "max_subset"});
  read(j, "enabled", s.enabled, "sparse");
  read(j, "tol", s.tol, "sparse");
  read_index(j, "max_subset", s.max_subset, "sparse");
}

void read_gridworld(const json& j, GridworldSpec& g) {
  check_keys(j, "gridworld",
             {"width", "height", "teleport_column", "step_reward", "discount", "vertical_noise"});
  read(j, "width", g.width, "gridworld");
  read(j, "height", g.height, "gridworld");
  read(j, "teleport_column", g.teleport_column, "gridworld");
  read(j, "step_reward", g.step_reward, "gridworld");
  read(j, "discount", g.discount, "gridworld");
  read(j, "vertical_noise", g.vertical_noise, "gridworld");
}

void read_pendulum(const json& j, PendulumConfig& p) {
  check_keys(j, "pendulum",
             {"mass", "length", "gravity", "max_torque", "dt", "substeps", "discount", "goal_angle",
              "goal_velocity", "velocity_limit", "vi_resolution", "vi_actions", "vi_tol",
              "vi_max_iter", "eval_resolution", "max_episode_steps", "start_angle_spread",
              "start_velocity_spread"});
  const std::string w = "pendulum";
  read(j, "mass", p.spec.mass, w);
  read(j, "length", p.spec.length, w);
  read(j, "gravity", p.spec.gravity, w);
  read(j, "max_torque", p.spec.max_torque, w);
  read(j, "dt", p.spec.dt, w);
  read(j, "substeps", p.spec.substeps, w);
  read(j, "discount", p.spec.discount, w);
  read(j, "goal_angle", p.spec.goal_angle, w);
  read(j, "goal_velocity", p.spec.goal_velocity, w);
  read(j, "velocity_limit", p.spec.velocity_limit, w);
  Index res = p.vi.angle_resolution;
  read_index(j, "vi_resolution", res, w);
  p.vi.angle_resolution = p.vi.velocity_resolution = res;
  read(j, "vi_actions", p.vi.actions, w);
  read(j, "vi_tol", p.vi.tol, w);
  read(j, "vi_max_iter", p.vi.max_iter, w);
  read_index(j, "eval_resolution", p.eval_resolution, w);
  read(j, "max_episode_steps", p.rollout.max_episode_steps, w);
  read(j, "start_angle_spread", p.rollout.start_angle_spread, w);
  read(j, "start_velocity_spread", p.rollout.start_velocity_spread, w);
}

}  // namespace

std::string_view to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::Gridworld: return "gridworld";
    case Experiment::Pendulum: return "pendulum";
    case Experiment::Custom: return "custom";
  }
  return "unknown";
}

Experiment parse_experiment(std::string_view text) {
  if (text == "gridworld") return Experiment::Gridworld;
  if (text == "pendulum") return Experiment::Pendulum;
  if (text == "custom") return Experiment::Custom;
  throw ConfigError("unknown experiment '" + std::string(text) + "'");
}

RunConfig default_config(Experiment experiment) {
  RunConfig c;
  c.experiment = experiment;
  switch (experiment) {
    case Experiment::Gridworld:
      c.num_transitions = 500;
      c.variants = {Variant::Isotropic, Variant::ArdDiagonal};
      break;
    case Experiment::Pendulum:
      c.num_transitions = 1000;
      c.variants = {Variant::Isotropic, Variant::ArdDiagonal, Variant::FactorAnalysis};
      break;
    case Experiment::Custom:
      c.num_transitions = 0;
      c.variants = {Variant::Isotropic, Variant::ArdDiagonal};
      break;
  }
  return c;
}

void RunConfig::validate() const {
  if (variants.empty()) throw ConfigError("at least one covariance variant is required");
  if (factor_rank < 1) throw ConfigError("factor_rank must be positive");
  if (experiment != Experiment::Custom && num_transitions < 1)
    throw ConfigError("num_transitions must be positive");
  if (experiment == Experiment::Custom && !trajectory)
    throw ConfigError("custom experiments need a trajectory file");
  if (optimizer.max_iter < 1 || optimizer.restarts < 0 || optimizer.grad_tol <= 0.0 ||
      optimizer.rel_value_tol < 0.0 || optimizer.perturbation < 0.0 || optimizer.log_bound <= 0.0)
    throw ConfigError("optimizer options out of range");
  if (sparse.tol <= 0.0 || sparse.max_subset < 1) throw ConfigError("sparse options out of range");
  if (profile_tols.empty()) throw ConfigError("profile_tols must not be empty");
  for (std::size_t i = 0; i < profile_tols.size(); ++i) {
    if (profile_tols[i] <= 0.0) throw ConfigError("profile_tols must be positive");
    if (i > 0 && profile_tols[i] >= profile_tols[i - 1])
      throw ConfigError("profile_tols must be strictly descending");
  }
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  try {
    gridworld.validate();
    pendulum.spec.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  if (pendulum.vi.angle_resolution < 2 || pendulum.eval_resolution < 2)
    throw ConfigError("pendulum grid resolutions must be at least 2");
}

RunConfig config_from_json(const json& j) {
  check_keys(j, "config",
             {"experiment", "seed", "num_transitions", "variants", "factor_rank", "trajectory",
              "report", "optimizer", "sparse", "profile_tols", "gridworld", "pendulum",
              "output_dir"});
  Experiment experiment = Experiment::Gridworld;
  if (j.contains("experiment")) {
    if (!j["experiment"].is_string()) throw ConfigError("config.experiment must be a string");
    experiment = parse_experiment(j["experiment"].get<std::string>());
  }
  RunConfig c = default_config(experiment);
  read(j, "seed", c.seed, "config");
  read_index(j, "num_transitions", c.num_transitions, "config");
  if (j.contains("variants")) {
    std::vector<std::string> names;
    read(j, "variants", names, "config");
    c.variants.clear();
    for (const auto& n : names) {
      try {
        c.variants.push_back(parse_variant(n));
      } catch (const std::exception& e) {
        throw ConfigError(std::string("config.variants: ") + e.what());
      }
    }
  }
  read(j, "factor_rank", c.factor_rank, "config");
  if (j.contains("trajectory")) {
    std::string p;
    read(j, "trajectory", p, "config");
    c.trajectory = p;
  }
  if (j.contains("report")) {
    std::string p;
    read(j, "report", p, "config");
    c.report = p;
  }
  if (j.contains("optimizer")) read_optimizer(j["optimizer"], c.optimizer);
  if (j.contains("sparse")) read_sparse(j["sparse"], c.sparse);
  read(j, "profile_tols", c.profile_tols, "config");
  if (j.contains("gridworld")) read_gridworld(j["gridworld"], c.gridworld);
  if (j.contains("pendulum")) read_pendulum(j["pendulum"], c.pendulum);
  if (j.contains("output_dir")) {
    std::string p;
    read(j, "output_dir", p, "config");
    c.output_dir = p;
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["experiment"] = std::string(to_string(c.experiment));
  j["seed"] = c.seed;
  j["num_transitions"] = c.num_transitions;
  auto variants = json::array();
  for (Variant v : c.variants) variants.push_back(std::string(short_name(v)));
  j["variants"] = variants;
  j["factor_rank"] = c.factor_rank;
  if (c.trajectory) j["trajectory"] = c.trajectory->string();
  if (c.report) j["report"] = c.report->string();
  j["optimizer"] = {{"max_iter", c.optimizer.max_iter},
                    {"grad_tol", c.optimizer.grad_tol},
                    {"rel_value_tol", c.optimizer.rel_value_tol},
                    {"restarts", c.optimizer.restarts},
                    {"perturbation", c.optimizer.perturbation},
                    {"log_bound", c.optimizer.log_bound}};
  j["sparse"] = {{"enabled", c.sparse.enabled}, {"tol", c.sparse.tol}, {"max_subset", c.sparse.max_subset}};
  j["profile_tols"] = c.profile_tols;
  const auto& g = c.gridworld;
  j["gridworld"] = {{"width", g.width},
                    {"height", g.height},
                    {"teleport_column", g.teleport_column},
                    {"step_reward", g.step_reward},
                    {"discount", g.discount},
                    {"vertical_noise", g.vertical_noise}};
  const auto& p = c.pendulum;
  j["pendulum"] = {{"mass", p.spec.mass},
                   {"length", p.spec.length},
                   {"gravity", p.spec.gravity},
                   {"max_torque", p.spec.max_torque},
                   {"dt", p.spec.dt},
                   {"substeps", p.spec.substeps},
                   {"discount", p.spec.discount},
                   {"goal_angle", p.spec.goal_angle},
                   {"goal_velocity", p.spec.goal_velocity},
                   {"velocity_limit", p.spec.velocity_limit},
                   {"vi_resolution", p.vi.angle_resolution},
                   {"vi_actions", p.vi.actions},
                   {"vi_tol", p.vi.tol},
                   {"vi_max_iter", p.vi.max_iter},
                   {"eval_resolution", p.eval_resolution},
                   {"max_episode_steps", p.rollout.max_episode_steps},
                   {"start_angle_spread", p.rollout.start_angle_spread},
                   {"start_velocity_spread", p.rollout.start_velocity_spread}};
  j["output_dir"] = c.output_dir.string();
  return j;
}

CovarianceSpec make_spec(Variant variant, int input_dim, int factor_rank) {
  switch (variant) {
    case Variant::Isotropic: return CovarianceSpec::isotropic(input_dim);
    case Variant::ArdDiagonal: return CovarianceSpec::ard(input_dim);
    case Variant::FactorAnalysis: return CovarianceSpec::factor_analysis(input_dim, factor_rank);
  }
  throw ContractViolation("unknown variant");
}

}  // namespace gptd::app
