#include "dppbound/likelihood.hpp"

#include <algorithm>
#include <cmath>

namespace dppbound {

namespace {

double sat_add(double a, double b) { return std::max(a + b, kLogZero); }

}  // namespace

GroundSet::GroundSet(PointSet items) : items_(std::move(items)) {
  if (items_.size() < 1) throw InputError("GroundSet: need at least one item");
  if (!items_.coords().allFinite()) throw InputError("GroundSet: non-finite coordinate");
}

FinitePattern::FinitePattern(std::vector<Index> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
    throw InputError("FinitePattern: duplicate item index");
  if (!indices_.empty() && indices_.front() < 0) throw InputError("FinitePattern: negative index");
}

FiniteDataset::FiniteDataset(GroundSet ground_, std::vector<FinitePattern> patterns_)
    : ground(std::move(ground_)), patterns(std::move(patterns_)) {
  if (patterns.empty()) throw InputError("FiniteDataset: need at least one pattern");
  for (const auto& p : patterns)
    if (!p.empty() && p.indices().back() >= ground.size())
      throw InputError("FiniteDataset: pattern index outside the ground set");
}

ContinuousDataset::ContinuousDataset(Index dim_, std::vector<PointSet> patterns_)
    : dim(dim_), patterns(std::move(patterns_)) {
  if (dim < 1) throw InputError("ContinuousDataset: dim must be >= 1");
  if (patterns.empty()) throw InputError("ContinuousDataset: need at least one pattern");
  for (const auto& p : patterns) {
    if (p.dim() != dim) throw InputError("ContinuousDataset: pattern dimension mismatch");
    if (!p.coords().allFinite()) throw InputError("ContinuousDataset: non-finite coordinate");
  }
}

Index ContinuousDataset::total_points() const {
  Index n = 0;
  for (const auto& p : patterns) n += p.size();
  return n;
}

PointSet ContinuousDataset::pooled() const {
  Matrix m(total_points(), dim);
  Index row = 0;
  for (const auto& p : patterns) {
    m.middleRows(row, p.size()) = p.coords();
    row += p.size();
  }
  return PointSet(std::move(m));
}

double finite_data_term(const KernelParams& params, const FiniteDataset& data) {
  double out = 0.0;
  for (const auto& p : data.patterns) {
    if (p.empty()) continue;
    const Matrix g = gram(params, data.ground.items().subset(p.indices()));
    out = sat_add(out, logdet_spd_or_zero(g));
  }
  return out;
}

double finite_loglik_exact(const KernelParams& params, const FiniteDataset& data) {
  const Index n = data.ground.size();
  if (n > kMaxDenseGroundSet)
    throw InputError("finite_loglik_exact: ground set too large for dense evaluation");
  Matrix l_plus_i = gram(params, data.ground.items());
  l_plus_i.diagonal().array() += 1.0;
  const double normalizer = logdet_spd_or_zero(l_plus_i);
  if (is_log_zero(normalizer)) throw NumericError("finite_loglik_exact: L + I not positive definite");
  return sat_add(finite_data_term(params, data), -static_cast<double>(data.num_patterns()) * normalizer);
}

BoundPair finite_loglik_bounds(const FiniteDataset& data, double data_term, const NystromFactor& factor) {
  const BoundPair nld = neg_logdet_bounds_finite(factor);
  const double t = static_cast<double>(data.num_patterns());
  return BoundPair::make(sat_add(data_term, t * nld.lower), sat_add(data_term, t * nld.upper),
                         BoundSubject::LogLikelihood);
}

BoundPair finite_loglik_bounds(const KernelParams& params, const FiniteDataset& data,
                               const InducingSet& z) {
  const NystromFactor factor = factorize(params, data.ground.items(), z);
  return finite_loglik_bounds(data, finite_data_term(params, data), factor);
}

double log_janossy_numerator(const KernelParams& params, const GaussianBaseMeasure& base,
                             const PointSet& pattern) {
  if (pattern.empty()) return 0.0;
  return sat_add(logdet_spd_or_zero(gram(params, pattern)), base_log_density_sum(base, pattern));
}

double continuous_data_term(const KernelParams& params, const GaussianBaseMeasure& base,
                            const ContinuousDataset& data) {
  double out = 0.0;
  for (const auto& p : data.patterns) out = sat_add(out, log_janossy_numerator(params, base, p));
  return out;
}

BoundPair continuous_loglik_bounds(const ContinuousDataset& data, double data_term,
                                   const ContinuousFactor& factor) {
  const BoundPair nld = neg_logdet_bounds_continuous(factor);
  const double t = static_cast<double>(data.num_patterns());
  return BoundPair::make(sat_add(data_term, t * nld.lower), sat_add(data_term, t * nld.upper),
                         BoundSubject::LogLikelihood);
}

BoundPair continuous_loglik_bounds(const KernelParams& params, const GaussianBaseMeasure& base,
                                   const ContinuousDataset& data, const InducingSet& z) {
  if (data.dim != params.dim()) throw InputError("continuous_loglik_bounds: dimension mismatch");
  const ContinuousFactor factor = factorize_continuous(params, base, z);
  return continuous_loglik_bounds(data, continuous_data_term(params, base, data), factor);
}

BoundPair certified_continuous_loglik_bounds(const KernelParams& params, const GaussianBaseMeasure& base,
                                             const ContinuousDataset& data, const InducingSet& z) {
  if (data.dim != params.dim()) throw InputError("certified_continuous_loglik_bounds: dimension mismatch");
  const BoundPair nld = certified_neg_logdet_bounds_continuous(params, base, z).bounds;
  const double data_term = continuous_data_term(params, base, data);
  const double t = static_cast<double>(data.num_patterns());
  return BoundPair::make(sat_add(data_term, t * nld.lower), sat_add(data_term, t * nld.upper),
                         BoundSubject::LogLikelihood);
}

double expected_cardinality_finite(const Matrix& l) {
  const Index n = l.rows();
  Matrix l_plus_i = l;
  l_plus_i.diagonal().array() += 1.0;
  Eigen::LLT<Matrix> llt(l_plus_i);
  if (llt.info() != Eigen::Success) throw NumericError("expected_cardinality_finite: L + I not SPD");
  // tr(L (I + L)^-1) = n - tr((I + L)^-1)
  return static_cast<double>(n) - llt.solve(Matrix::Identity(n, n)).trace();
}

double expected_cardinality_finite(const KernelParams& params, const GroundSet& ground) {
  if (ground.size() > kMaxDenseGroundSet)
    throw InputError("expected_cardinality_finite: ground set too large for dense evaluation");
  return expected_cardinality_finite(gram(params, ground.items()));
}

}  // namespace dppbound
