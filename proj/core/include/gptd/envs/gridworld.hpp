#pragma once

#include <cstdint>

#include "gptd/envs/value_grid.hpp"
#include "gptd/gptd.hpp"
#include "gptd/rng.hpp"

namespace gptd {

// 11 x 11 grid, cells numbered 1..width and 1..height. The fixed policy walks
// horizontally toward the teleport column and moves up or down at random on
// every step (blocked moves at the border leave y unchanged). Each step costs
// step_reward; reaching the teleport column ends the episode and the next
// transition is a zero-reward stitch to a uniformly random cell.
struct GridworldSpec {
  int width = 11;
  int height = 11;
  int teleport_column = 6;
  double step_reward = -1.0;
  double discount = 0.9;
  double vertical_noise = 0.5;  // probability of moving up (else down)

  void validate() const;
};

struct GridCell {
  int x;
  int y;
  bool operator==(const GridCell&) const = default;
};

// Successor under the fixed policy from a non-teleport cell.
GridCell gridworld_step(const GridworldSpec& spec, GridCell cell, CounterRng& rng);

// n_transitions transitions (n_transitions + 1 states); deterministic in seed.
Trajectory gridworld_rollout(const GridworldSpec& spec, Index n_transitions, std::uint64_t seed);

// Exact tabular policy evaluation; values(x-1, y-1) = V(x, y).
ValueGrid gridworld_true_values(const GridworldSpec& spec);

}  // namespace gptd
