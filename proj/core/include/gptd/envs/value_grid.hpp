#pragma once

#include <string>

#include "gptd/types.hpp"

namespace gptd {

// Regularly spaced axis. A periodic axis covers [lo, hi) with `resolution`
// nodes; otherwise nodes span [lo, hi] inclusive.
struct GridAxis {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  Index resolution = 2;
  bool periodic = false;

  double spacing() const;
  double node(Index i) const;
  bool operator==(const GridAxis&) const = default;
};

// Tabulated value function on a 2-D grid; values(i, j) belongs to
// (first.node(i), second.node(j)).
struct ValueGrid {
  GridAxis first;
  GridAxis second;
  Matrix values;

  void validate() const;
  // Bilinear interpolation; periodic axes wrap, others clamp to the range.
  double interpolate(double u, double v) const;
  // All nodes as rows of an (R1*R2) x 2 matrix, first axis fastest.
  Matrix nodes() const;
  // Values in the same order as nodes().
  Vector flat_values() const;
};

// Same axis ranges at a new resolution, values interpolated from `source`.
ValueGrid resample(const ValueGrid& source, Index first_resolution, Index second_resolution);

}  // namespace gptd
