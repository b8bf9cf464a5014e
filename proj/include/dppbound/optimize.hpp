#pragma once

#include <functional>
#include <limits>

#include "dppbound/random.hpp"
#include "dppbound/types.hpp"

namespace dppbound {

/// Objective to maximize. Non-finite values and thrown InputError or
/// NumericError mark infeasible points.
using Objective = std::function<double(const Vector&)>;
/// Objective returning its gradient through the second argument.
using ObjectiveWithGradient = std::function<double(const Vector&, Vector&)>;

struct OptimizeResult {
  Vector x;
  double value = -std::numeric_limits<double>::infinity();
  Index evaluations = 0;
  Index iterations = 0;
  bool converged = false;
};

struct LbfgsOptions {
  Index max_iters = 100;
  Index max_evals = 500;
  Index memory = 8;
  double grad_tol = 1e-10;
  double rel_tol = 1e-12;      ///< stop when successive improvements fall below rel_tol * max(1, |f|)
  double max_step = std::numeric_limits<double>::infinity();  ///< cap on the step's max-norm
};

/// Limited-memory BFGS ascent with backtracking (Armijo) line search.
/// Only improving steps are taken, so the returned value is never below
/// the starting value.
OptimizeResult lbfgs_maximize(const ObjectiveWithGradient& f, const Vector& x0, const LbfgsOptions& options = {});

struct EsOptions {
  Index max_generations = 100;
  Index max_evals = 2000;
  Index population = 0;        ///< 0 selects 4 + floor(3 ln p)
  double initial_sigma = 0.3;
  double rel_tol = 1e-12;
};

/// Separable CMA-ES (diagonal covariance) maximizer. Tracks the best point
/// seen, so the result is never worse than x0.
OptimizeResult es_maximize(const Objective& f, const Vector& x0, Rng& rng, const EsOptions& options = {});

/// Central differences with step rel_step * max(1, |x_i|).
Vector finite_difference_gradient(const Objective& f, const Vector& x, double rel_step = 1e-5);

/// Evaluates f, mapping exceptions and NaN to -infinity.
double safe_evaluate(const Objective& f, const Vector& x);

}  // namespace dppbound
