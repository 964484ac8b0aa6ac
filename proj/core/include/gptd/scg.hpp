#pragma once

#include <functional>
#include <optional>

#include "gptd/types.hpp"

namespace gptd {

// Objective for minimization. Either call may return nullopt to signal that
// the point is infeasible (e.g. a failed factorization); the optimizer then
// treats it as an unsuccessful step.
struct ScgObjective {
  struct ValueAndGradient {
    double value;
    Vector gradient;
  };
  std::function<std::optional<double>(const Vector&)> value;
  std::function<std::optional<ValueAndGradient>(const Vector&)> value_and_gradient;
};

struct ScgOptions {
  int max_iter = 200;
  double grad_tol = 1e-4;      // on ||g||_inf
  double rel_value_tol = 1e-9; // on |f_new - f_old| / max(1, |f_old|)
  // Applied to every trial point; used for box clipping.
  std::function<void(Vector&)> project;
};

struct ScgStep {
  Vector x;
  double value;
  double grad_inf_norm;
};

struct ScgResult {
  Vector x;
  double value;
  Vector gradient;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

// Scaled conjugate gradients (Moller 1993) in the formulation popularized by
// Netlab: a Levenberg-Marquardt style scale replaces the line search.
// `on_accept` is called with every accepted iterate, including the start.
// Throws NumericalFailure if the starting point is infeasible.
ScgResult scg_minimize(const ScgObjective& objective, Vector x0, const ScgOptions& options,
                       const std::function<void(const ScgStep&)>& on_accept = {});

}  // namespace gptd
