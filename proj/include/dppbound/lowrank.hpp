#pragma once

#include "dppbound/kernel.hpp"
#include "dppbound/types.hpp"

namespace dppbound {

inline constexpr double kDefaultRelativeJitter = 1e-10;
inline constexpr double kMaxRelativeJitter = 1e-4;
inline constexpr Index kMaxInducing = 5000;

/// Pseudo-inputs Z. Points must be pairwise distinct; duplicates are
/// rejected rather than merged.
class InducingSet {
 public:
  explicit InducingSet(PointSet points, double jitter = kDefaultRelativeJitter);

  const PointSet& points() const { return points_; }
  Index size() const { return points_.size(); }
  Index dim() const { return points_.dim(); }
  /// Starting diagonal regularizer, relative to the mean diagonal of L_Z.
  double jitter() const { return jitter_; }

  InducingSet with_points(PointSet points) const { return InducingSet(std::move(points), jitter_); }

 private:
  PointSet points_;
  double jitter_;
};

/// Smallest pairwise distance in a point set (infinity for fewer than two points).
double min_pairwise_distance(const PointSet& z);

enum class BoundSubject { NegLogDetFinite, NegLogDetContinuous, LogLikelihood, LogAcceptanceRatio };

const char* to_string(BoundSubject s);

/// Certified interval on a log-scale quantity.
struct BoundPair {
  double lower = 0.0;
  double upper = 0.0;
  BoundSubject subject = BoundSubject::NegLogDetFinite;

  static BoundPair make(double lower, double upper, BoundSubject subject);

  double gap() const { return upper - lower; }
  double midpoint() const { return 0.5 * (lower + upper); }
  bool contains(double v, double slack = 0.0) const {
    return lower - slack <= v && v <= upper + slack;
  }
};

/// Cholesky factor of A + jitter * I. The jitter starts at
/// relative_start * mean(diag A) and grows by x10 up to
/// kMaxRelativeJitter * mean(diag A).
struct JitteredCholesky {
  Eigen::LLT<Matrix> llt;
  double jitter = 0.0;           ///< absolute value added to the diagonal
  double relative_jitter = 0.0;  ///< jitter / mean(diag A)

  Matrix lower() const { return llt.matrixL(); }
  double logdet() const;
};

JitteredCholesky jittered_cholesky(const Matrix& a, double relative_start = kDefaultRelativeJitter);

/// Log-determinant of a symmetric positive definite matrix via Cholesky.
/// Returns kLogZero when the factorization fails.
double logdet_spd_or_zero(const Matrix& a);

/// Low-rank surrogate Q = L_XZ (A^-1 + j A^-2) L_ZX with A = L_Z + jI, the
/// jittered Nystrom approximation after one refinement step. Kept in factored
/// form Q = V^T V with V = [R^-1 L_ZX; sqrt(j) A^-1 L_ZX] (R R^T = A), a
/// 2m x n matrix. The n x n matrix Q is never formed.
class NystromFactor {
 public:
  NystromFactor(JitteredCholesky lz, Matrix v, double trace_l);

  const Matrix& whitened_cross() const { return v_; }
  Index size() const { return v_.cols(); }
  double trace_l() const { return trace_l_; }
  double trace_q() const { return trace_q_; }
  double logdet_lz() const { return logdet_lz_; }
  double jitter() const { return lz_.jitter; }
  /// log det(I_n + Q) = log det(I + V V^T).
  double logdet_i_plus_q() const { return logdet_i_plus_q_; }
  /// Materializes Q; for tests and small problems only.
  Matrix q_dense() const { return v_.transpose() * v_; }

 private:
  JitteredCholesky lz_;
  Matrix v_;
  double trace_l_;
  double trace_q_;
  double logdet_lz_;
  double logdet_i_plus_q_;
};

NystromFactor factorize(const KernelParams& params, const PointSet& x, const InducingSet& z);

/// Bounds on -log det(L + I) from the low-rank surrogate:
///   -logdet(Q + I) - tr(L - Q) <= -logdet(L + I) <= -logdet(Q + I).
BoundPair neg_logdet_bounds_finite(const NystromFactor& factor);

double bound_gap(const NystromFactor& factor);

/// Finite-rank operator Q_Z with kernel L(x, Z) (L_Z + jitter)^-1 L(Z, x),
/// in whitened form Phi = R^-1 Psi R^-T.
struct ContinuousFactor {
  JitteredCholesky lz;
  Matrix l_z;        ///< L_Z without jitter
  Matrix psi;
  Matrix phi;
  Eigen::LLT<Matrix> i_plus_phi;
  double trace_operator = 0.0;
  double trace_q = 0.0;            ///< tr(L_Z^-1 Psi) = tr(Phi)
  double logdet_i_plus_q = 0.0;    ///< log det(L_Z + Psi) - log det L_Z
};

ContinuousFactor factorize_continuous(const KernelParams& params, const GaussianBaseMeasure& base,
                                      const InducingSet& z);

/// Bounds on -log det(I + L) for the integral operator:
///   upper = log det L_Z - log det(L_Z + Psi)
///   lower = upper - tr(L) + tr(L_Z^-1 Psi)
BoundPair neg_logdet_bounds_continuous(const ContinuousFactor& factor);
BoundPair neg_logdet_bounds_continuous(const KernelParams& params, const GaussianBaseMeasure& base,
                                       const InducingSet& z);

/// First-order bounds on the rounding error of tr(Phi) and log det(I + Phi)
/// as computed by factorize_continuous. Near-singular L_Z amplifies the
/// error in Psi; optimizers subtract these terms so they cannot climb on
/// round-off.
struct RoundingBound {
  double trace = 0.0;
  double logdet = 0.0;
};
RoundingBound continuous_rounding_bound(const ContinuousFactor& factor);

/// Continuous bounds that hold despite floating-point error. The factor is
/// recomputed in extended precision, the relative jitter is raised while that
/// narrows the interval, and both ends are widened by a first-order bound on
/// the rounding error of Psi propagated through the inverse of L_Z.
struct CertifiedContinuousBounds {
  BoundPair bounds;
  double gap = 0.0;               ///< tr(L) - tr(Q_Z) at the chosen jitter
  double rounding = 0.0;          ///< total widening added to the interval
  double relative_jitter = 0.0;
};

CertifiedContinuousBounds certified_neg_logdet_bounds_continuous(const KernelParams& params,
                                                                 const GaussianBaseMeasure& base,
                                                                 const InducingSet& z);

double bound_gap(const ContinuousFactor& factor);
double bound_gap(const KernelParams& params, const GaussianBaseMeasure& base, const InducingSet& z);

/// Greedy pivoted partial Cholesky over finite items: the k items that most
/// reduce tr(L - Q), in selection order. Stops early once L is exhausted.
Matrix pivot_inducing_items(const KernelParams& params, const PointSet& items, Index k);

/// Tensor grid over mean +- half_width * scale, per_axis nodes per axis.
Matrix base_candidate_grid(const GaussianBaseMeasure& base, Index per_axis, double half_width = 6.0);

/// Appends up to `add` rows to `existing`, each the candidate maximizing
/// (base density) x (residual variance a - Q(x, x)), i.e. a pivoted Cholesky
/// over the candidates. Nested by construction and well conditioned; stops
/// early once every weighted residual is below tau * a.
Matrix extend_inducing_greedy(const KernelParams& params, const GaussianBaseMeasure& base, const Matrix& existing,
                              Index add, const Matrix& candidates, double tau = 1e-9);

/// Gradient of one side of the continuous bound. Parameter derivatives are
/// taken with respect to logarithms of the positive parameters.
struct ContinuousBoundGradient {
  Matrix z;                  ///< m x dim
  Vector log_lengthscales;   ///< dim
  Vector log_scales;         ///< dim (base measure standard deviations)
  double log_intensity = 0.0;
  double log_amplitude = 0.0;
};

enum class ContinuousObjective {
  LowerBound,  ///< maximize the lower bound on -log det(I + L)
  NegativeGap  ///< maximize tr(Q_Z) - tr(L), i.e. shrink the interval
};

ContinuousBoundGradient continuous_bound_gradient(const KernelParams& params,
                                                  const GaussianBaseMeasure& base,
                                                  const InducingSet& z,
                                                  const ContinuousFactor& factor,
                                                  ContinuousObjective objective);

/// Value matching continuous_bound_gradient's objective.
double continuous_objective_value(const ContinuousFactor& factor, ContinuousObjective objective);

}  // namespace dppbound
