#include "gptd/envs/value_grid.hpp"

#include <algorithm>
#include <cmath>

#include "gptd/error.hpp"

namespace gptd {

double GridAxis::spacing() const {
  return periodic ? (hi - lo) / static_cast<double>(resolution)
                  : (hi - lo) / static_cast<double>(resolution - 1);
}

double GridAxis::node(Index i) const { return lo + static_cast<double>(i) * spacing(); }

void ValueGrid::validate() const {
  require(first.resolution >= 2 && second.resolution >= 2, "grid resolution must be >= 2");
  require(first.hi > first.lo && second.hi > second.lo, "grid axis ranges must be increasing");
  require(values.rows() == first.resolution && values.cols() == second.resolution,
          "grid values do not match axis resolutions");
  require(values.allFinite(), "grid values must be finite");
}

namespace {

// Cell index and fractional offset along one axis.
struct Locate {
  Index i0;
  Index i1;
  double t;
};

Locate locate(const GridAxis& axis, double u) {
  const double h = axis.spacing();
  if (axis.periodic) {
    const double span = axis.hi - axis.lo;
    double w = std::fmod(u - axis.lo, span);
    if (w < 0.0) w += span;
    double s = w / h;
    Index i0 = static_cast<Index>(std::floor(s));
    if (i0 >= axis.resolution) i0 = axis.resolution - 1;
    const double t = std::clamp(s - static_cast<double>(i0), 0.0, 1.0);
    return {i0, (i0 + 1) % axis.resolution, t};
  }
  const double s = std::clamp((u - axis.lo) / h, 0.0, static_cast<double>(axis.resolution - 1));
  Index i0 = static_cast<Index>(std::floor(s));
  if (i0 >= axis.resolution - 1) i0 = axis.resolution - 2;
  return {i0, i0 + 1, s - static_cast<double>(i0)};
}

}  // namespace

double ValueGrid::interpolate(double u, double v) const {
  const Locate a = locate(first, u);
  const Locate b = locate(second, v);
  return (1.0 - a.t) * (1.0 - b.t) * values(a.i0, b.i0) + a.t * (1.0 - b.t) * values(a.i1, b.i0) +
         (1.0 - a.t) * b.t * values(a.i0, b.i1) + a.t * b.t * values(a.i1, b.i1);
}

Matrix ValueGrid::nodes() const {
  Matrix out(first.resolution * second.resolution, 2);
  Index row = 0;
  for (Index j = 0; j < second.resolution; ++j)
    for (Index i = 0; i < first.resolution; ++i, ++row) {
      out(row, 0) = first.node(i);
      out(row, 1) = second.node(j);
    }
  return out;
}

Vector ValueGrid::flat_values() const {
  return Eigen::Map<const Vector>(values.data(), values.size());
}

ValueGrid resample(const ValueGrid& source, Index first_resolution, Index second_resolution) {
  ValueGrid out;
  out.first = source.first;
  out.second = source.second;
  out.first.resolution = first_resolution;
  out.second.resolution = second_resolution;
  out.values.resize(first_resolution, second_resolution);
  for (Index i = 0; i < first_resolution; ++i)
    for (Index j = 0; j < second_resolution; ++j)
      out.values(i, j) = source.interpolate(out.first.node(i), out.second.node(j));
  out.validate();
  return out;
}

}  // namespace gptd
