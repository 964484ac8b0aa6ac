#pragma once

#include <cstdint>
#include <vector>

#include "gptd/envs/value_grid.hpp"
#include "gptd/gptd.hpp"

namespace gptd {

// Underpowered pendulum; angle 0 is upright, dynamics
//   angle'' = (g / l) sin(angle) + u / (m l^2),
// integrated with RK4 over `dt` in `substeps` steps. Every step costs -1 and
// the episode ends on entering the goal box around the upright position.
struct PendulumSpec {
  double mass = 1.0;
  double length = 1.0;
  double gravity = 9.81;
  double max_torque = 5.0;
  double dt = 0.1;
  int substeps = 10;
  double discount = 0.98;
  double goal_angle = 0.1;     // |angle| < goal_angle
  double goal_velocity = 0.5;  // and |velocity| < goal_velocity
  double velocity_limit = 10.0;  // velocity axis of the state grid

  void validate() const;
};

struct PendulumState {
  double angle;
  double velocity;
};

// Wraps into [-pi, pi).
double wrap_angle(double angle);

PendulumState pendulum_step(const PendulumSpec& spec, PendulumState state, double torque);
double pendulum_energy(const PendulumSpec& spec, PendulumState state);
bool in_goal(const PendulumSpec& spec, PendulumState state);

// Angle axis is periodic over [-pi, pi); velocity spans +-velocity_limit.
ValueGrid pendulum_grid(const PendulumSpec& spec, Index angle_resolution,
                        Index velocity_resolution);

struct FittedValueIterationOptions {
  Index angle_resolution = 400;
  Index velocity_resolution = 400;
  std::vector<double> actions{-5.0, 0.0, 5.0};
  double tol = 1e-6;
  int max_iter = 20000;
};

// Greedy one-step lookahead on a tabulated value function.
class GreedyPolicy {
 public:
  GreedyPolicy(PendulumSpec spec, ValueGrid values, std::vector<double> actions);

  double torque(PendulumState state) const;
  // max_a [-1 + gamma * V(next)], with V = 0 at goal successors.
  double backup(PendulumState state) const;

  const ValueGrid& values() const { return values_; }
  const std::vector<double>& actions() const { return actions_; }
  const PendulumSpec& spec() const { return spec_; }

 private:
  PendulumSpec spec_;
  ValueGrid values_;
  std::vector<double> actions_;
};

struct FittedValueIteration {
  ValueGrid values;
  std::vector<double> actions;
  int iterations = 0;
  double final_change = 0.0;

  GreedyPolicy policy(const PendulumSpec& spec) const { return {spec, values, actions}; }
};

// Value iteration over the grid nodes with bilinear interpolation of
// successor values. Throws NumericalFailure if max_iter is reached first.
FittedValueIteration fitted_value_iteration(const PendulumSpec& spec,
                                            const FittedValueIterationOptions& options = {});

// sup-norm of (T V - V) over the grid nodes.
double bellman_residual(const PendulumSpec& spec, const FittedValueIteration& fvi);

struct PendulumRolloutOptions {
  int max_episode_steps = 200;
  // Starts are drawn around the hanging position.
  double start_angle_spread = 0.5;     // uniform half-width around pi
  double start_velocity_spread = 0.5;  // uniform half-width around 0
};

struct PendulumRollout {
  Trajectory trajectory;
  Index episodes = 0;         // completed episodes (goal or cap)
  Index capped_episodes = 0;  // those ended by the step cap
};

PendulumRollout pendulum_rollout(const PendulumSpec& spec, const GreedyPolicy& policy,
                                 Index n_transitions, std::uint64_t seed,
                                 const PendulumRolloutOptions& options = {});

}  // namespace gptd
