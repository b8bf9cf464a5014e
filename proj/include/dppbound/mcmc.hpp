#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dppbound/kernel.hpp"
#include "dppbound/likelihood.hpp"
#include "dppbound/lowrank.hpp"
#include "dppbound/random.hpp"

namespace dppbound {

/// Whether a prior interval applies to the parameter itself or to its log.
enum class PriorScale { Natural, Log };

struct PriorInterval {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  PriorScale scale = PriorScale::Log;
};

/// Independent uniform priors. The chain always moves on u = log(parameter);
/// a Natural interval puts a uniform density on exp(u), so the density in u
/// carries the Jacobian exp(u).
struct PriorBox {
  std::vector<PriorInterval> intervals;

  /// kappa ~ U[200, 2000], log alpha ~ U[-10, 10], log eps ~ U[-10, 10].
  static PriorBox gaussian_gaussian_default();

  Index dim() const { return static_cast<Index>(intervals.size()); }
  bool contains(const Vector& u) const;
  /// Log density in u; kLogZero outside the box.
  double log_density(const Vector& u) const;
  void validate() const;
};

enum class MHMode { Retrospective, Ideal };

struct MCMCConfig {
  Index n_iters = 10000;
  Index m0 = 20;
  Index m_step = 10;
  Index m_max = 200;
  Index z_budget = 20;               ///< objective evaluations per inducing-set optimization
  double target_acceptance = 0.25;
  Index adapt_start = 200;           ///< iterations before the empirical covariance is used
  double adapt_gain = 1.0;           ///< Robbins-Monro step is adapt_gain / (k + 1)
  double eps_reg = 1e-6;
  Vector initial_u;                  ///< log parameters of the first state
  Vector initial_proposal_sd;        ///< per-coordinate, in u
  MHMode mode = MHMode::Retrospective;
  bool instrument = false;           ///< also compute the exact decision when the target allows it
  std::uint64_t seed = 1;

  void validate(Index dim) const;
};

/// Posterior target on u = log(theta).
class MHTarget {
 public:
  virtual ~MHTarget() = default;
  virtual Index dim() const = 0;
  virtual std::vector<std::string> names() const = 0;
  virtual Vector theta(const Vector& u) const { return u.array().exp(); }

  virtual bool has_exact() const = 0;
  virtual double exact_loglik(const Vector& u) const = 0;

  /// Inducing set of size m for state u, warm-started from `warm` when given.
  virtual Matrix prepare_z(const Vector& u, Index m, const Matrix* warm, Index budget) const = 0;
  /// Adds `add` points to z (nested) and re-optimizes; the gap never grows.
  virtual Matrix refine_z(const Vector& u, const Matrix& z, Index add, Index budget) const = 0;
  virtual BoundPair loglik_bounds(const Vector& u, const Matrix& z) const = 0;
};

/// 1D Gaussian-Gaussian model in (log kappa, log alpha, log eps).
class GaussianGaussianTarget final : public MHTarget {
 public:
  explicit GaussianGaussianTarget(ContinuousDataset data);
  Index dim() const override { return 3; }
  std::vector<std::string> names() const override { return {"kappa", "alpha", "eps"}; }
  bool has_exact() const override { return true; }
  double exact_loglik(const Vector& u) const override;
  Matrix prepare_z(const Vector& u, Index m, const Matrix* warm, Index budget) const override;
  Matrix refine_z(const Vector& u, const Matrix& z, Index add, Index budget) const override;
  BoundPair loglik_bounds(const Vector& u, const Matrix& z) const override;

  static KernelParams params(const Vector& u);
  static GaussianBaseMeasure base(const Vector& u);

 private:
  ContinuousDataset data_;
};

/// Finite DPP in (log amplitude, log sigma_1..d). Inducing points are ground
/// items chosen by greedy pivoting on the residual diagonal of L - Q.
class FiniteTarget final : public MHTarget {
 public:
  explicit FiniteTarget(FiniteDataset data);
  Index dim() const override { return 1 + data_.ground.dim(); }
  std::vector<std::string> names() const override;
  bool has_exact() const override { return true; }
  double exact_loglik(const Vector& u) const override;
  Matrix prepare_z(const Vector& u, Index m, const Matrix* warm, Index budget) const override;
  Matrix refine_z(const Vector& u, const Matrix& z, Index add, Index budget) const override;
  BoundPair loglik_bounds(const Vector& u, const Matrix& z) const override;

  static KernelParams params(const Vector& u);

 private:
  FiniteDataset data_;
};

/// Likelihood identically zero; the chain samples the prior.
class FlatTarget final : public MHTarget {
 public:
  explicit FlatTarget(std::vector<std::string> names) : names_(std::move(names)) {}
  Index dim() const override { return static_cast<Index>(names_.size()); }
  std::vector<std::string> names() const override { return names_; }
  bool has_exact() const override { return true; }
  double exact_loglik(const Vector&) const override { return 0.0; }
  Matrix prepare_z(const Vector&, Index m, const Matrix*, Index) const override { return Matrix::Zero(m, 1); }
  Matrix refine_z(const Vector&, const Matrix& z, Index add, Index) const override {
    return Matrix::Zero(z.rows() + add, 1);
  }
  BoundPair loglik_bounds(const Vector&, const Matrix&) const override {
    return BoundPair{0.0, 0.0, BoundSubject::LogLikelihood};
  }

 private:
  std::vector<std::string> names_;
};

/// Likelihood bounds shifted by the log prior; a kLogZero pair outside the box.
BoundPair log_posterior_bounds(const MHTarget& target, const Vector& u, const Matrix& z, const PriorBox& prior);

struct MHState {
  Vector u;
  Matrix z;
  BoundPair log_post;   ///< at the base inducing set z
};

struct AcceptDecision {
  bool accepted = false;
  double lo = kLogZero;   ///< final interval on log alpha
  double hi = kLogZero;
  Index m_cur = 0;
  Index m_prop = 0;
  Index refinements = 0;
  bool fallback = false;
  std::vector<double> widths;   ///< interval width after each refinement (first entry: initial)
};

/// Decides log_u < log alpha from bounds alone, refining both inducing sets
/// by m_step until the interval excludes log_u or m_max would be exceeded.
AcceptDecision retrospective_accept(const MHTarget& target, const PriorBox& prior, const MHState& current,
                                    const MHState& proposed, double log_u, const MCMCConfig& config);

/// s * (empirical covariance of history rows + eps_reg I).
Matrix adapt_proposal(const Matrix& history, double log_scale, double eps_reg);

/// Robbins-Monro step on the log global scale.
double adapt_log_scale(double log_scale, bool accepted, Index k, double target, double gain);

/// Gaussian random-walk proposal with diminishing adaptation.
class AdaptiveProposal {
 public:
  AdaptiveProposal(const Vector& initial_sd, const MCMCConfig& config);
  Vector propose(const Vector& u, Rng& rng) const;
  void update(const Vector& u, bool accepted);
  Matrix covariance() const;
  double log_scale() const { return log_scale_; }

 private:
  Vector initial_var_;
  double target_;
  double gain_;
  double eps_reg_;
  Index start_;
  Index k_ = 0;
  double log_scale_ = 0.0;
  Vector mean_;
  Matrix m2_;
};

struct ChainRecord {
  Index iter = 0;
  Vector theta;           ///< natural-scale parameters after the step
  Vector proposal;        ///< natural-scale proposed parameters
  bool accepted = false;
  double u = 0.0;
  double logalpha_lo = kLogZero;
  double logalpha_hi = kLogZero;
  Index m_cur = 0;
  Index m_prop = 0;
  Index refinements = 0;
  bool fallback = false;
  int exact_decision = -1;   ///< 1 accept, 0 reject, -1 not instrumented
  bool widths_monotone = true;
};

struct ChainTrace {
  std::vector<std::string> names;
  std::vector<ChainRecord> records;
  double acceptance_rate = 0.0;
  Index max_m = 0;
  Index fallbacks = 0;
  Index mismatches = 0;       ///< non-fallback decisions differing from the exact decision
  Index uniform_draws = 0;    ///< exactly one per iteration
  std::map<Index, Index> m_histogram;   ///< largest m used in an iteration -> count
  double seconds = 0.0;
};

ChainTrace run_mh(const MHTarget& target, const PriorBox& prior, const MCMCConfig& config);

}  // namespace dppbound
