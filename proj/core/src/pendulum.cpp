#include "gptd/envs/pendulum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "gptd/error.hpp"
#include "gptd/rng.hpp"

namespace gptd {

void PendulumSpec::validate() const {
  require(mass > 0.0 && length > 0.0 && gravity > 0.0 && max_torque > 0.0,
          "pendulum constants must be positive");
  require(dt > 0.0 && substeps >= 1, "pendulum integration step must be positive");
  require(discount >= 0.0 && discount < 1.0, "pendulum discount must lie in [0, 1)");
  require(goal_angle > 0.0 && goal_velocity > 0.0 && velocity_limit > 0.0,
          "pendulum goal and grid limits must be positive");
}

double wrap_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double w = std::fmod(angle + std::numbers::pi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  double out = w - std::numbers::pi;
  if (out >= std::numbers::pi) out -= kTwoPi;
  return out;
}

PendulumState pendulum_step(const PendulumSpec& spec, PendulumState state, double torque) {
  require(std::abs(torque) <= spec.max_torque * (1.0 + 1e-12), "torque exceeds max_torque");
  const double g_over_l = spec.gravity / spec.length;
  const double drive = torque / (spec.mass * spec.length * spec.length);
  auto accel = [&](double angle) { return g_over_l * std::sin(angle) + drive; };

  const double h = spec.dt / spec.substeps;
  double q = state.angle;
  double p = state.velocity;
  for (int s = 0; s < spec.substeps; ++s) {
    const double k1q = p;
    const double k1p = accel(q);
    const double k2q = p + 0.5 * h * k1p;
    const double k2p = accel(q + 0.5 * h * k1q);
    const double k3q = p + 0.5 * h * k2p;
    const double k3p = accel(q + 0.5 * h * k2q);
    const double k4q = p + h * k3p;
    const double k4p = accel(q + h * k3q);
    q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  }
  return {wrap_angle(q), p};
}

double pendulum_energy(const PendulumSpec& spec, PendulumState state) {
  const double ml2 = spec.mass * spec.length * spec.length;
  return 0.5 * ml2 * state.velocity * state.velocity +
         spec.mass * spec.gravity * spec.length * std::cos(state.angle);
}

bool in_goal(const PendulumSpec& spec, PendulumState state) {
  return std::abs(wrap_angle(state.angle)) < spec.goal_angle &&
         std::abs(state.velocity) < spec.goal_velocity;
}

ValueGrid pendulum_grid(const PendulumSpec& spec, Index angle_resolution,
                        Index velocity_resolution) {
  ValueGrid grid;
  grid.first = {"angle", -std::numbers::pi, std::numbers::pi, angle_resolution, true};
  grid.second = {"velocity", -spec.velocity_limit, spec.velocity_limit, velocity_resolution, false};
  grid.values = Matrix::Zero(angle_resolution, velocity_resolution);
  return grid;
}

GreedyPolicy::GreedyPolicy(PendulumSpec spec, ValueGrid values, std::vector<double> actions)
    : spec_(spec), values_(std::move(values)), actions_(std::move(actions)) {
  require(!actions_.empty(), "policy needs at least one action");
}

double GreedyPolicy::backup(PendulumState state) const {
  double best = -std::numeric_limits<double>::infinity();
  for (double u : actions_) {
    const PendulumState next = pendulum_step(spec_, state, u);
    const double v = in_goal(spec_, next) ? 0.0 : values_.interpolate(next.angle, next.velocity);
    best = std::max(best, -1.0 + spec_.discount * v);
  }
  return best;
}

double GreedyPolicy::torque(PendulumState state) const {
  double best = -std::numeric_limits<double>::infinity();
  double best_u = actions_.front();
  for (double u : actions_) {
    const PendulumState next = pendulum_step(spec_, state, u);
    const double v = in_goal(spec_, next) ? 0.0 : values_.interpolate(next.angle, next.velocity);
    const double q = -1.0 + spec_.discount * v;
    if (q > best) {
      best = q;
      best_u = u;
    }
  }
  return best_u;
}

namespace {

// Successor of one (node, action) pair as bilinear stencil weights.
struct Stencil {
  std::array<std::int32_t, 4> index;
  std::array<double, 4> weight;
  bool terminal;
};

Stencil make_stencil(const ValueGrid& grid, PendulumState next, bool terminal) {
  Stencil s{};
  s.terminal = terminal;
  if (terminal) return s;
  const GridAxis& ax = grid.first;
  const GridAxis& ay = grid.second;
  const double span = ax.hi - ax.lo;
  double w = std::fmod(next.angle - ax.lo, span);
  if (w < 0.0) w += span;
  const double sx = w / ax.spacing();
  Index i0 = std::min(static_cast<Index>(std::floor(sx)), ax.resolution - 1);
  const double tx = std::clamp(sx - static_cast<double>(i0), 0.0, 1.0);
  const Index i1 = (i0 + 1) % ax.resolution;

  const double sy = std::clamp((next.velocity - ay.lo) / ay.spacing(), 0.0,
                               static_cast<double>(ay.resolution - 1));
  Index j0 = std::min(static_cast<Index>(std::floor(sy)), ay.resolution - 2);
  const double ty = sy - static_cast<double>(j0);
  const Index j1 = j0 + 1;

  const Index rows = ax.resolution;
  s.index = {static_cast<std::int32_t>(i0 + j0 * rows), static_cast<std::int32_t>(i1 + j0 * rows),
             static_cast<std::int32_t>(i0 + j1 * rows), static_cast<std::int32_t>(i1 + j1 * rows)};
  s.weight = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
  return s;
}

}  // namespace

FittedValueIteration fitted_value_iteration(const PendulumSpec& spec,
                                            const FittedValueIterationOptions& options) {
  spec.validate();
  require(options.tol > 0.0, "fitted_value_iteration: tol must be positive");
  require(!options.actions.empty(), "fitted_value_iteration: no actions");
  for (double u : options.actions)
    require(std::abs(u) <= spec.max_torque, "fitted_value_iteration: action exceeds max_torque");

  ValueGrid grid = pendulum_grid(spec, options.angle_resolution, options.velocity_resolution);
  grid.validate();
  const Index rows = grid.first.resolution;
  const Index nodes = rows * grid.second.resolution;
  const auto n_actions = static_cast<Index>(options.actions.size());

  std::vector<bool> goal(static_cast<std::size_t>(nodes));
  std::vector<Stencil> stencils(static_cast<std::size_t>(nodes * n_actions));
  for (Index j = 0; j < grid.second.resolution; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const Index node = i + j * rows;
      const PendulumState s{grid.first.node(i), grid.second.node(j)};
      goal[static_cast<std::size_t>(node)] = in_goal(spec, s);
      for (Index a = 0; a < n_actions; ++a) {
        const PendulumState next = pendulum_step(spec, s, options.actions[static_cast<std::size_t>(a)]);
        stencils[static_cast<std::size_t>(node * n_actions + a)] =
            make_stencil(grid, next, in_goal(spec, next));
      }
    }
  }

  Vector v = Vector::Zero(nodes);
  Vector next(nodes);
  FittedValueIteration out;
  out.actions = options.actions;
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    double change = 0.0;
    for (Index node = 0; node < nodes; ++node) {
      double best = 0.0;
      if (!goal[static_cast<std::size_t>(node)]) {
        best = -std::numeric_limits<double>::infinity();
        for (Index a = 0; a < n_actions; ++a) {
          const Stencil& st = stencils[static_cast<std::size_t>(node * n_actions + a)];
          double succ = 0.0;
          if (!st.terminal)
            for (int k = 0; k < 4; ++k) succ += st.weight[static_cast<std::size_t>(k)] * v[st.index[static_cast<std::size_t>(k)]];
          best = std::max(best, -1.0 + spec.discount * succ);
        }
      }
      next[node] = best;
      change = std::max(change, std::abs(best - v[node]));
    }
    v.swap(next);
    out.iterations = iter;
    out.final_change = change;
    if (change < options.tol) {
      grid.values = Eigen::Map<const Matrix>(v.data(), rows, grid.second.resolution);
      out.values = std::move(grid);
      return out;
    }
  }
  throw NumericalFailure("fitted value iteration did not converge within max_iter");
}

double bellman_residual(const PendulumSpec& spec, const FittedValueIteration& fvi) {
  const GreedyPolicy policy = fvi.policy(spec);
  const ValueGrid& grid = fvi.values;
  double residual = 0.0;
  for (Index j = 0; j < grid.second.resolution; ++j)
    for (Index i = 0; i < grid.first.resolution; ++i) {
      const PendulumState s{grid.first.node(i), grid.second.node(j)};
      const double target = in_goal(spec, s) ? 0.0 : policy.backup(s);
      residual = std::max(residual, std::abs(target - grid.values(i, j)));
    }
  return residual;
}

PendulumRollout pendulum_rollout(const PendulumSpec& spec, const GreedyPolicy& policy,
                                 Index n_transitions, std::uint64_t seed,
                                 const PendulumRolloutOptions& options) {
  spec.validate();
  require(n_transitions >= 1, "pendulum_rollout: need at least one transition");
  CounterRng rng = CounterRng(seed).split(0x70656e64);  // "pend"
  auto draw_start = [&]() {
    PendulumState s{};
    do {
      s.angle = wrap_angle(std::numbers::pi + rng.uniform(-1.0, 1.0) * options.start_angle_spread);
      s.velocity = rng.uniform(-1.0, 1.0) * options.start_velocity_spread;
    } while (in_goal(spec, s));
    return s;
  };

  PendulumRollout out;
  Trajectory& traj = out.trajectory;
  traj.states.resize(n_transitions + 1, 2);
  traj.rewards.resize(n_transitions);
  traj.discounts.resize(n_transitions);

  PendulumState state = draw_start();
  int steps = 0;
  for (Index i = 0; i < n_transitions; ++i) {
    traj.states(i, 0) = state.angle;
    traj.states(i, 1) = state.velocity;
    const bool capped = steps >= options.max_episode_steps;
    if (in_goal(spec, state) || capped) {
      traj.rewards[i] = 0.0;
      traj.discounts[i] = 0.0;
      ++out.episodes;
      if (capped) ++out.capped_episodes;
      state = draw_start();
      steps = 0;
    } else {
      traj.rewards[i] = -1.0;
      traj.discounts[i] = spec.discount;
      state = pendulum_step(spec, state, policy.torque(state));
      ++steps;
    }
  }
  traj.states(n_transitions, 0) = state.angle;
  traj.states(n_transitions, 1) = state.velocity;
  return out;
}

}  // namespace gptd
