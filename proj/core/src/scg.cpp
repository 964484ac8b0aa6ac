#include "gptd/scg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gptd/error.hpp"

namespace gptd {
namespace {

constexpr double kSigma0 = 1e-4;
constexpr double kBetaMin = 1e-15;
constexpr double kBetaMax = 1e100;

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

ScgResult scg_minimize(const ScgObjective& objective, Vector x0, const ScgOptions& options,
                       const std::function<void(const ScgStep&)>& on_accept) {
  require(static_cast<bool>(objective.value) && static_cast<bool>(objective.value_and_gradient),
          "scg_minimize: objective callbacks must be set");
  auto project = [&](Vector& v) {
    if (options.project) options.project(v);
  };

  ScgResult result;
  Vector x = std::move(x0);
  project(x);
  auto start = objective.value_and_gradient(x);
  ++result.evaluations;
  if (!start) throw NumericalFailure("scg_minimize: objective undefined at the starting point");

  double f_now = start->value;
  Vector grad_new = std::move(start->gradient);
  Vector grad_old = grad_new;
  if (on_accept) on_accept({x, f_now, inf_norm(grad_new)});

  auto finish = [&](bool converged) {
    result.x = x;
    result.value = f_now;
    result.gradient = grad_new;
    result.converged = converged;
    return result;
  };
  if (inf_norm(grad_new) < options.grad_tol) return finish(true);

  const Index n = x.size();
  Vector d = -grad_new;
  bool success = true;
  Index successes = 0;
  double beta = 1.0;
  double mu = 0.0;
  double kappa = 0.0;
  double theta = 0.0;

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    result.iterations = iter;
    if (success) {
      mu = d.dot(grad_new);
      if (mu >= 0.0) {
        d = -grad_new;
        mu = d.dot(grad_new);
      }
      kappa = d.squaredNorm();
      // Step direction below resolution: stop, converged only if the gradient agrees.
      if (kappa < std::numeric_limits<double>::epsilon())
        return finish(inf_norm(grad_new) < options.grad_tol);
      const double sigma = kSigma0 / std::sqrt(kappa);
      const Vector x_plus = x + sigma * d;
      auto plus = objective.value_and_gradient(x_plus);
      ++result.evaluations;
      // Curvature along d from a finite difference of gradients.
      theta = plus ? d.dot(plus->gradient - grad_new) / sigma : 0.0;
    }

    double delta = theta + beta * kappa;
    if (delta <= 0.0) {
      delta = beta * kappa;
      beta -= theta / kappa;
    }
    const double alpha = -mu / delta;

    Vector x_new = x + alpha * d;
    project(x_new);
    const auto f_trial = objective.value(x_new);
    ++result.evaluations;
    const double f_new = f_trial ? *f_trial : std::numeric_limits<double>::infinity();

    // Ratio of actual to predicted decrease.
    const double comparison = 2.0 * (f_new - f_now) / (alpha * mu);
    success = std::isfinite(f_new) && comparison >= 0.0;

    if (success) {
      auto accepted = objective.value_and_gradient(x_new);
      ++result.evaluations;
      if (!accepted) {
        success = false;
      } else {
        const double f_old = f_now;
        x = std::move(x_new);
        f_now = accepted->value;
        grad_old = grad_new;
        grad_new = std::move(accepted->gradient);
        ++successes;
        if (on_accept) on_accept({x, f_now, inf_norm(grad_new)});
        const double rel_change = std::abs(f_now - f_old) / std::max(1.0, std::abs(f_old));
        if (inf_norm(grad_new) < options.grad_tol || rel_change < options.rel_value_tol)
          return finish(true);
      }
    }

    if (!success || comparison < 0.25)
      beta = std::min(4.0 * beta, kBetaMax);
    else if (comparison > 0.75)
      beta = std::max(0.5 * beta, kBetaMin);

    if (successes == n) {
      d = -grad_new;
      successes = 0;
    } else if (success) {
      const double gamma = (grad_old - grad_new).dot(grad_new) / mu;
      d = gamma * d - grad_new;
    }
  }
  return finish(false);
}

}  // namespace gptd
