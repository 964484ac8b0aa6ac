#include "gptd/envs/gridworld.hpp"

#include <algorithm>

#include <Eigen/LU>

#include "gptd/error.hpp"

namespace gptd {

void GridworldSpec::validate() const {
  require(width >= 2 && height >= 2, "gridworld must be at least 2 x 2");
  require(teleport_column >= 1 && teleport_column <= width, "teleport column outside grid");
  require(discount > 0.0 && discount < 1.0, "gridworld discount must lie in (0, 1)");
  require(vertical_noise >= 0.0 && vertical_noise <= 1.0, "vertical_noise must be a probability");
}

namespace {

int horizontal_move(const GridworldSpec& spec, int x) {
  if (x > spec.teleport_column) return x - 1;
  if (x < spec.teleport_column) return x + 1;
  return x;
}

int clamp_row(const GridworldSpec& spec, int y) { return std::clamp(y, 1, spec.height); }

GridCell random_cell(const GridworldSpec& spec, CounterRng& rng) {
  const auto cells = static_cast<std::uint64_t>(spec.width) * static_cast<std::uint64_t>(spec.height);
  const auto k = static_cast<int>(rng.uniform_index(cells));
  return {k % spec.width + 1, k / spec.width + 1};
}

}  // namespace

GridCell gridworld_step(const GridworldSpec& spec, GridCell cell, CounterRng& rng) {
  const int dy = rng.bernoulli(spec.vertical_noise) ? 1 : -1;
  return {horizontal_move(spec, cell.x), clamp_row(spec, cell.y + dy)};
}

Trajectory gridworld_rollout(const GridworldSpec& spec, Index n_transitions, std::uint64_t seed) {
  spec.validate();
  require(n_transitions >= 1, "gridworld_rollout: need at least one transition");
  CounterRng rng = CounterRng(seed).split(0x67726964);  // "grid"

  Trajectory traj;
  traj.states.resize(n_transitions + 1, 2);
  traj.rewards.resize(n_transitions);
  traj.discounts.resize(n_transitions);

  GridCell cell = random_cell(spec, rng);
  for (Index i = 0; i < n_transitions; ++i) {
    traj.states(i, 0) = cell.x;
    traj.states(i, 1) = cell.y;
    if (cell.x == spec.teleport_column) {
      traj.rewards[i] = 0.0;
      traj.discounts[i] = 0.0;
      cell = random_cell(spec, rng);
    } else {
      traj.rewards[i] = spec.step_reward;
      traj.discounts[i] = spec.discount;
      cell = gridworld_step(spec, cell, rng);
    }
  }
  traj.states(n_transitions, 0) = cell.x;
  traj.states(n_transitions, 1) = cell.y;
  return traj;
}

ValueGrid gridworld_true_values(const GridworldSpec& spec) {
  spec.validate();
  const int w = spec.width;
  const int hgt = spec.height;
  const Index count = static_cast<Index>(w) * hgt;
  auto index = [w](int x, int y) { return static_cast<Index>(y - 1) * w + (x - 1); };

  // (I - gamma P) V = R over all cells; teleport cells are terminal with V = 0.
  Matrix system = Matrix::Identity(count, count);
  Vector rhs = Vector::Zero(count);
  for (int y = 1; y <= hgt; ++y) {
    for (int x = 1; x <= w; ++x) {
      if (x == spec.teleport_column) continue;
      const Index s = index(x, y);
      rhs[s] = spec.step_reward;
      const int nx = horizontal_move(spec, x);
      system(s, index(nx, clamp_row(spec, y + 1))) -= spec.discount * spec.vertical_noise;
      system(s, index(nx, clamp_row(spec, y - 1))) -= spec.discount * (1.0 - spec.vertical_noise);
    }
  }
  const Vector v = system.partialPivLu().solve(rhs);

  ValueGrid grid;
  grid.first = {"x", 1.0, static_cast<double>(w), w, false};
  grid.second = {"y", 1.0, static_cast<double>(hgt), hgt, false};
  grid.values.resize(w, hgt);
  for (int y = 1; y <= hgt; ++y)
    for (int x = 1; x <= w; ++x) grid.values(x - 1, y - 1) = v[index(x, y)];
  return grid;
}

}  // namespace gptd
