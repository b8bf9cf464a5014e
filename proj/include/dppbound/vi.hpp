#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dppbound/kernel.hpp"
#include "dppbound/likelihood.hpp"
#include "dppbound/lowrank.hpp"

namespace dppbound {

enum class InitStrategy { QuantileGrid, KMeansPlusPlus, RandomSubset };
enum class VIOptimizer { EvolutionStrategy, FiniteDiffGradient, AnalyticGradient };

InitStrategy parse_init_strategy(const std::string& s);
VIOptimizer parse_vi_optimizer(const std::string& s);
const char* to_string(InitStrategy s);
const char* to_string(VIOptimizer o);

/// One objective evaluation seen by the optimizer.
struct VIEvaluation {
  const KernelParams& params;
  const GaussianBaseMeasure* base;  ///< null in the finite case
  const Matrix& z;
  double value;
};

struct VIConfig {
  Index m = 20;
  InitStrategy init = InitStrategy::QuantileGrid;
  /// AnalyticGradient applies to continuous data; finite data falls back to
  /// finite differences.
  VIOptimizer optimizer = VIOptimizer::AnalyticGradient;
  Index max_iters = 1000;        ///< sweeps
  double tolerance = 1e-6;       ///< relative change of F per sweep
  Index stall_sweeps = 3;
  Index theta_evals = 40;        ///< objective budget of the theta block per sweep
  Index z_evals = 40;            ///< objective budget of the Z block per sweep
  bool joint = false;            ///< ES only: optimize theta and Z together
  bool fit_amplitude = true;     ///< finite case only; the continuous amplitude is fixed
  bool fit_base = true;          ///< continuous case: fit kappa and the scales rho_d
  std::uint64_t seed = 1;
  std::function<void(const VIEvaluation&)> on_evaluate;

  void validate() const;
};

struct VIResult {
  KernelParams params;
  GaussianBaseMeasure base;      ///< meaningful for continuous fits
  InducingSet z;
  std::vector<double> trace;     ///< F after each sweep (index 0: initial state)
  BoundPair bounds;              ///< log-likelihood interval at the optimum
  Vector gamma;                  ///< sigma_d / rho_d (continuous fits)
  Index iterations = 0;
  Index evaluations = 0;
  double seconds = 0.0;
  bool converged = false;
};

/// The optimizer produced no finite objective; carries the last valid state.
class VIDivergence : public NumericError {
 public:
  VIDivergence(const std::string& what, KernelParams params, GaussianBaseMeasure base, Matrix z)
      : NumericError(what), params(std::move(params)), base(std::move(base)), z(std::move(z)) {}
  KernelParams params;
  GaussianBaseMeasure base;
  Matrix z;
};

/// m distinct points chosen from candidate locations. QuantileGrid places
/// points on a grid of per-dimension empirical quantiles; KMeansPlusPlus
/// runs seeding plus Lloyd iterations; RandomSubset draws without
/// replacement. With snap = true every point is a distinct candidate.
InducingSet init_inducing(const PointSet& candidates, Index m, InitStrategy strategy, std::uint64_t seed,
                          bool snap = false);
InducingSet init_inducing(const FiniteDataset& data, Index m, InitStrategy strategy, std::uint64_t seed);
InducingSet init_inducing(const ContinuousDataset& data, Index m, InitStrategy strategy, std::uint64_t seed);

/// Variational lower bound F(theta, Z) on the log-likelihood.
double vi_objective(const KernelParams& params, const InducingSet& z, const FiniteDataset& data);
double vi_objective(const KernelParams& params, const GaussianBaseMeasure& base, const InducingSet& z,
                    const ContinuousDataset& data);

/// Alternating maximization of F over theta and Z.
VIResult fit_vi(const FiniteDataset& data, const KernelParams& init, const VIConfig& config,
                const std::optional<InducingSet>& z0 = std::nullopt);
/// Continuous fit. The base-measure means stay at their initial values.
VIResult fit_vi(const ContinuousDataset& data, const KernelParams& init, const GaussianBaseMeasure& base_init,
                const VIConfig& config, const std::optional<InducingSet>& z0 = std::nullopt);

/// gamma_d = sigma_d / rho_d.
Vector overdispersion(const KernelParams& params, const GaussianBaseMeasure& base);

/// Gradient of the continuous F with respect to (log sigma, log rho,
/// log kappa) and Z. Exposed for gradient checks.
struct ContinuousObjectiveGradient {
  double value = 0.0;
  Vector log_lengthscales;
  Vector log_scales;
  double log_intensity = 0.0;
  Matrix z;
};

ContinuousObjectiveGradient vi_objective_gradient(const KernelParams& params, const GaussianBaseMeasure& base,
                                                  const InducingSet& z, const ContinuousDataset& data);

/// Minimizes the bound gap over Z at fixed parameters (L-BFGS, analytic
/// gradient). Returns the improved set; never worse than z0.
InducingSet optimize_inducing_gap(const KernelParams& params, const GaussianBaseMeasure& base,
                                  const InducingSet& z0, Index max_evals, double max_step = 0.0);

/// One row of a bound-versus-m sweep at fixed parameters.
struct SweepRow {
  Index m = 0;           ///< inducing points actually used
  double lower = 0.0;    ///< certified log-likelihood bounds
  double upper = 0.0;
  double seconds = 0.0;
  double gap() const { return upper - lower; }
};

struct SweepResult {
  std::vector<SweepRow> rows;
  Matrix z;              ///< inducing set of the last row
};

/// Continuous sweep. Each m extends the previous inducing set greedily, so
/// the sets are nested, then spends up to opt_evals gradient evaluations on
/// the gap; the optimized set is kept only if its certified interval is
/// narrower. Ascending ms are required.
SweepResult continuous_bounds_sweep(const KernelParams& params, const GaussianBaseMeasure& base,
                                    const ContinuousDataset& data, const std::vector<Index>& ms,
                                    Index opt_evals = 30, Index candidates_per_axis = 0);

/// Finite sweep over pivoted item subsets (nested by construction).
SweepResult finite_bounds_sweep(const KernelParams& params, const FiniteDataset& data, const std::vector<Index>& ms);

}  // namespace dppbound
