#include "gptd_app/experiment.hpp"

#include <algorithm>
#include <limits>

#include "gptd/envs/gridworld.hpp"
#include "gptd/envs/pendulum.hpp"
#include "gptd/error.hpp"
#include "gptd/io.hpp"
#include "gptd/kernel.hpp"

namespace gptd::app {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double grid_mse(const ExactPosterior& model, const GroundTruth& truth) {
  return mse_on_points(model, truth.grid.nodes(), truth.grid.flat_values());
}

}  // namespace

Vector GroundTruth::at(const ConstMatrixRef& states) const {
  Vector out(states.rows());
  for (Index i = 0; i < states.rows(); ++i) out[i] = value(states.row(i).transpose());
  return out;
}

Simulation simulate(const RunConfig& config) {
  Simulation sim;
  nlohmann::json& m = sim.manifest;
  m["experiment"] = std::string(to_string(config.experiment));
  m["seed"] = config.seed;
  m["num_transitions"] = config.num_transitions;
  switch (config.experiment) {
    case Experiment::Gridworld: {
      sim.trajectory = gridworld_rollout(config.gridworld, config.num_transitions, config.seed);
      sim.episodes = sim.trajectory.count_stitches();
      m["gamma"] = config.gridworld.discount;
      break;
    }
    case Experiment::Pendulum: {
      const auto& p = config.pendulum;
      const FittedValueIteration fvi = fitted_value_iteration(p.spec, p.vi);
      PendulumRollout ro =
          pendulum_rollout(p.spec, fvi.policy(p.spec), config.num_transitions, config.seed, p.rollout);
      sim.trajectory = std::move(ro.trajectory);
      sim.episodes = ro.episodes;
      sim.capped_episodes = ro.capped_episodes;
      m["gamma"] = p.spec.discount;
      m["value_iteration"] = {{"iterations", fvi.iterations}, {"final_change", fvi.final_change}};
      break;
    }
    case Experiment::Custom:
      throw ConfigError("custom experiments cannot be simulated");
  }
  m["episodes"] = sim.episodes;
  m["capped_episodes"] = sim.capped_episodes;
  m["config"] = to_json(config);
  return sim;
}

std::optional<GroundTruth> ground_truth(const RunConfig& config) {
  switch (config.experiment) {
    case Experiment::Gridworld: {
      GroundTruth t;
      t.grid = gridworld_true_values(config.gridworld);
      t.value = [grid = t.grid](const ConstVectorRef& s) { return grid.interpolate(s[0], s[1]); };
      return t;
    }
    case Experiment::Pendulum: {
      const auto& p = config.pendulum;
      const FittedValueIteration fvi = fitted_value_iteration(p.spec, p.vi);
      GroundTruth t;
      t.value = [spec = p.spec, grid = fvi.values](const ConstVectorRef& s) {
        const PendulumState state{s[0], s[1]};
        return in_goal(spec, state) ? 0.0 : grid.interpolate(s[0], s[1]);
      };
      t.grid = pendulum_grid(p.spec, p.eval_resolution, p.eval_resolution);
      for (Index j = 0; j < t.grid.second.resolution; ++j)
        for (Index i = 0; i < t.grid.first.resolution; ++i)
          t.grid.values(i, j) = t.value(Vector{{t.grid.first.node(i), t.grid.second.node(j)}});
      return t;
    }
    case Experiment::Custom:
      return std::nullopt;
  }
  return std::nullopt;
}

Trajectory load_or_simulate(const RunConfig& config) {
  if (config.trajectory) {
    Trajectory t = read_trajectory_csv(*config.trajectory);
    try {
      t.validate();
    } catch (const ContractViolation& e) {
      throw IoError("trajectory '" + config.trajectory->string() + "': " + e.what());
    }
    return t;
  }
  return simulate(config).trajectory;
}

std::vector<VariantFit> fit_variants(const RunConfig& config, const Trajectory& trajectory,
                                     const GroundTruth* truth, const FitOptions& options) {
  trajectory.validate();
  std::vector<VariantFit> fits;
  for (std::size_t vi = 0; vi < config.variants.size(); ++vi) {
    VariantFit fit;
    VariantReport& rep = fit.report;
    rep.trajectory_mse = rep.grid_mse = rep.sparse_grid_mse = kNaN;
    try {
      rep.spec = make_spec(config.variants[vi], trajectory.dim(), config.factor_rank);
    } catch (const ContractViolation& e) {
      throw ConfigError(std::string(short_name(config.variants[vi])) + ": " + e.what());
    }
    try {
      const std::optional<HyperParams>* given =
          vi < options.initial.size() ? &options.initial[vi] : nullptr;
      const HyperParams theta0 = given && given->has_value()
                                     ? **given
                                     : default_initial_params(rep.spec, trajectory, config.seed);
      if (options.optimize) {
        OptimizerOptions o = config.optimizer;
        o.seed = config.seed;
        const OptimizationTrace trace = optimize(trajectory, rep.spec, theta0, o);
        rep.theta = trace.best_theta;
        rep.likelihood = trace.best;
        rep.converged = trace.converged;
        rep.evaluations = trace.evaluations;
      } else {
        rep.theta = theta0;
        rep.likelihood = log_marginal_likelihood(trajectory, rep.spec, theta0);
        rep.converged = true;
      }
      fit.posterior = fit_exact(trajectory, rep.spec, rep.theta);
      if (truth) {
        rep.trajectory_mse = mse_on_points(*fit.posterior, trajectory.states, truth->at(trajectory.states));
        rep.grid_mse = grid_mse(*fit.posterior, *truth);
      }
      if (config.sparse.enabled) {
        const Index max_m = std::min(config.sparse.max_subset, trajectory.num_states());
        const SubsetSelection sel =
            icd_select(rep.spec, rep.theta, trajectory.states, config.sparse.tol, max_m);
        fit.sparse = SparsePosterior::fit(trajectory, rep.spec, rep.theta, sel);
        rep.sparse_subset_size = static_cast<Index>(sel.indices.size());
        if (truth)
          rep.sparse_grid_mse = mse_on_points(*fit.sparse, truth->grid.nodes(), truth->grid.flat_values());
      }
      if (options.profile) {
        rep.eigenspectrum = clamp_spectrum(eigenspectrum(gram(rep.spec, rep.theta, trajectory.states).matrix));
        rep.icd = icd_profile(rep.spec, rep.theta, trajectory.states, config.profile_tols);
      }
      rep.ok = true;
    } catch (const OptimizationFailure& e) {
      rep.error = e.what();
    } catch (const NumericalFailure& e) {
      rep.error = e.what();
    } catch (const ContractViolation& e) {
      rep.error = e.what();
    }
    if (!rep.ok) {
      fit.posterior.reset();
      fit.sparse.reset();
    }
    fits.push_back(std::move(fit));
  }
  return fits;
}

ComparisonReport comparison_report(const RunConfig& config, const Trajectory& trajectory,
                                   const std::vector<VariantFit>& fits) {
  ComparisonReport r;
  r.experiment = std::string(to_string(config.experiment));
  r.seed = config.seed;
  r.num_transitions = trajectory.num_transitions();
  for (const auto& f : fits) r.variants.push_back(f.report);
  return r;
}

}  // namespace gptd::app
