#pragma once

#include <vector>

#include "dppbound/kernel.hpp"
#include "dppbound/lowrank.hpp"
#include "dppbound/types.hpp"

namespace dppbound {

/// Largest ground set accepted by the dense exact likelihood.
inline constexpr Index kMaxDenseGroundSet = 2000;

/// Finite ground set of n >= 1 distinct items.
class GroundSet {
 public:
  explicit GroundSet(PointSet items);
  const PointSet& items() const { return items_; }
  Index size() const { return items_.size(); }
  Index dim() const { return items_.dim(); }

 private:
  PointSet items_;
};

/// A realization Y_t as strictly increasing 0-based item indices.
class FinitePattern {
 public:
  FinitePattern() = default;
  /// Indices are sorted; duplicates are rejected.
  explicit FinitePattern(std::vector<Index> indices);

  const std::vector<Index>& indices() const { return indices_; }
  Index size() const { return static_cast<Index>(indices_.size()); }
  bool empty() const { return indices_.empty(); }
  friend bool operator==(const FinitePattern&, const FinitePattern&) = default;

 private:
  std::vector<Index> indices_;
};

struct FiniteDataset {
  GroundSet ground;
  std::vector<FinitePattern> patterns;

  FiniteDataset(GroundSet ground_, std::vector<FinitePattern> patterns_);
  Index num_patterns() const { return static_cast<Index>(patterns.size()); }
};

/// T realizations of a point process on R^dim. Patterns may be empty.
struct ContinuousDataset {
  Index dim = 1;
  std::vector<PointSet> patterns;

  ContinuousDataset(Index dim_, std::vector<PointSet> patterns_);
  Index num_patterns() const { return static_cast<Index>(patterns.size()); }
  Index total_points() const;
  PointSet pooled() const;
};

/// sum_t log det L_{Y_t}; kLogZero when some pattern Gram is singular.
double finite_data_term(const KernelParams& params, const FiniteDataset& data);

/// Exact log-likelihood sum_t log det L_{Y_t} - T log det(L + I) by dense Cholesky.
double finite_loglik_exact(const KernelParams& params, const FiniteDataset& data);

/// Interval on the finite log-likelihood from the low-rank bounds on
/// -log det(L + I); the lower end is the variational objective.
BoundPair finite_loglik_bounds(const KernelParams& params, const FiniteDataset& data,
                               const InducingSet& z);
BoundPair finite_loglik_bounds(const FiniteDataset& data, double data_term,
                               const NystromFactor& factor);

/// log det((L(x_i, x_j))) + sum_i log mu'(x_i) for one pattern; kLogZero
/// when the pattern Gram is singular.
double log_janossy_numerator(const KernelParams& params, const GaussianBaseMeasure& base,
                             const PointSet& pattern);

double continuous_data_term(const KernelParams& params, const GaussianBaseMeasure& base,
                            const ContinuousDataset& data);

BoundPair continuous_loglik_bounds(const KernelParams& params, const GaussianBaseMeasure& base,
                                   const ContinuousDataset& data, const InducingSet& z);
BoundPair continuous_loglik_bounds(const ContinuousDataset& data, double data_term,
                                   const ContinuousFactor& factor);
/// Same bounds from the certified extended-precision evaluation.
BoundPair certified_continuous_loglik_bounds(const KernelParams& params, const GaussianBaseMeasure& base,
                                             const ContinuousDataset& data, const InducingSet& z);

/// tr(L (I + L)^-1), the expected number of selected items.
double expected_cardinality_finite(const KernelParams& params, const GroundSet& ground);

/// Same quantity for an explicit matrix L.
double expected_cardinality_finite(const Matrix& l);

}  // namespace dppbound
