#include "dppbound/vi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include "dppbound/optimize.hpp"
#include "dppbound/random.hpp"

namespace dppbound {

InitStrategy parse_init_strategy(const std::string& s) {
  if (s == "quantile_grid") return InitStrategy::QuantileGrid;
  if (s == "kmeans++") return InitStrategy::KMeansPlusPlus;
  if (s == "random_subset") return InitStrategy::RandomSubset;
  throw InputError("unknown init strategy '" + s + "' (expected quantile_grid, kmeans++ or random_subset)");
}

VIOptimizer parse_vi_optimizer(const std::string& s) {
  if (s == "es") return VIOptimizer::EvolutionStrategy;
  if (s == "fd_gradient") return VIOptimizer::FiniteDiffGradient;
  if (s == "gradient") return VIOptimizer::AnalyticGradient;
  throw InputError("unknown optimizer '" + s + "' (expected es, fd_gradient or gradient)");
}

const char* to_string(InitStrategy s) {
  switch (s) {
    case InitStrategy::QuantileGrid: return "quantile_grid";
    case InitStrategy::KMeansPlusPlus: return "kmeans++";
    case InitStrategy::RandomSubset: return "random_subset";
  }
  return "unknown";
}

const char* to_string(VIOptimizer o) {
  switch (o) {
    case VIOptimizer::EvolutionStrategy: return "es";
    case VIOptimizer::FiniteDiffGradient: return "fd_gradient";
    case VIOptimizer::AnalyticGradient: return "gradient";
  }
  return "unknown";
}

void VIConfig::validate() const {
  if (m < 1) throw InputError("VIConfig: m must be >= 1");
  if (m > kMaxInducing) throw InputError("VIConfig: m exceeds the inducing-point cap");
  if (max_iters < 1) throw InputError("VIConfig: max_iters must be >= 1");
  if (!(tolerance > 0.0)) throw InputError("VIConfig: tolerance must be positive");
  if (stall_sweeps < 1) throw InputError("VIConfig: stall_sweeps must be >= 1");
  if (theta_evals < 1 || z_evals < 1) throw InputError("VIConfig: block budgets must be >= 1");
}

// ---------------------------------------------------------------------------
// Inducing-point initialization

namespace {

std::vector<Vector> distinct_rows(const PointSet& p) {
  std::vector<Vector> rows;
  for (Index i = 0; i < p.size(); ++i) rows.push_back(p.point(i));
  auto less = [](const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  };
  std::sort(rows.begin(), rows.end(), less);
  rows.erase(std::unique(rows.begin(), rows.end(), [](const Vector& a, const Vector& b) { return a == b; }),
             rows.end());
  return rows;
}

double empirical_quantile(std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

Matrix quantile_grid(const std::vector<Vector>& cand, Index m, Index dim) {
  const auto k = static_cast<Index>(std::ceil(std::pow(static_cast<double>(m), 1.0 / static_cast<double>(dim)) - 1e-9));
  std::vector<Vector> axis(static_cast<std::size_t>(dim));
  for (Index d = 0; d < dim; ++d) {
    std::vector<double> vals;
    for (const auto& c : cand) vals.push_back(c(d));
    std::sort(vals.begin(), vals.end());
    axis[static_cast<std::size_t>(d)].resize(k);
    for (Index i = 0; i < k; ++i)
      axis[static_cast<std::size_t>(d)](i) = empirical_quantile(vals, (static_cast<double>(i) + 1.0) / static_cast<double>(k + 1));
  }
  Index cells = 1;
  for (Index d = 0; d < dim; ++d) cells *= k;
  Matrix out(m, dim);
  for (Index j = 0; j < m; ++j) {
    Index cell = static_cast<Index>(std::floor(static_cast<double>(j) * static_cast<double>(cells) / static_cast<double>(m)));
    for (Index d = 0; d < dim; ++d) {
      out(j, d) = axis[static_cast<std::size_t>(d)](cell % k);
      cell /= k;
    }
  }
  return out;
}

Matrix kmeans_pp(const std::vector<Vector>& cand, Index m, Index dim, Rng& rng) {
  const auto n = static_cast<Index>(cand.size());
  Matrix centers(m, dim);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  centers.row(0) = cand[static_cast<std::size_t>(pick(rng))].transpose();
  Vector d2(n);
  for (Index i = 0; i < n; ++i) d2(i) = (cand[static_cast<std::size_t>(i)].transpose() - centers.row(0)).squaredNorm();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Index c = 1; c < m; ++c) {
    double target = unif(rng) * d2.sum();
    Index chosen = n - 1;
    for (Index i = 0; i < n; ++i) {
      target -= d2(i);
      if (target < 0.0 && d2(i) > 0.0) {
        chosen = i;
        break;
      }
    }
    while (d2(chosen) <= 0.0 && chosen > 0) --chosen;
    centers.row(c) = cand[static_cast<std::size_t>(chosen)].transpose();
    for (Index i = 0; i < n; ++i)
      d2(i) = std::min(d2(i), (cand[static_cast<std::size_t>(i)].transpose() - centers.row(c)).squaredNorm());
  }

  std::vector<Index> assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      (centers.rowwise() - cand[static_cast<std::size_t>(i)].transpose()).rowwise().squaredNorm().minCoeff(&best);
      if (assign[static_cast<std::size_t>(i)] != best) {
        assign[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(m, dim);
    Vector counts = Vector::Zero(m);
    for (Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += cand[static_cast<std::size_t>(i)].transpose();
      counts(assign[static_cast<std::size_t>(i)]) += 1.0;
    }
    for (Index c = 0; c < m; ++c)
      if (counts(c) > 0.0) centers.row(c) = sums.row(c) / counts(c);
  }
  return centers;
}

// Replaces each row by the nearest not-yet-used candidate.
Matrix snap_to_candidates(const Matrix& z, const std::vector<Vector>& cand) {
  std::vector<bool> used(cand.size(), false);
  Matrix out(z.rows(), z.cols());
  for (Index j = 0; j < z.rows(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (used[i]) continue;
      const double d = (cand[i].transpose() - z.row(j)).squaredNorm();
      if (d < best) {
        best = d;
        arg = i;
      }
    }
    used[arg] = true;
    out.row(j) = cand[arg].transpose();
  }
  return out;
}

// Separates coincident rows by small deterministic offsets.
void separate_duplicates(Matrix& z, double spread) {
  const double scale = std::max(1.0, z.cwiseAbs().maxCoeff());
  const double eps = std::max(1e-6 * spread, 1e-9 * scale);
  for (Index i = 0; i < z.rows(); ++i)
    for (Index j = 0; j < i; ++j)
      if ((z.row(i) - z.row(j)).norm() <= 1e-10 * scale) {
        z(i, 0) += eps * static_cast<double>(i + 1);
        j = -1;
      }
}

}  // namespace

InducingSet init_inducing(const PointSet& candidates, Index m, InitStrategy strategy, std::uint64_t seed,
                          bool snap) {
  if (m < 1) throw InputError("init_inducing: m must be >= 1");
  if (candidates.empty()) throw InputError("init_inducing: no candidate points");
  const std::vector<Vector> cand = distinct_rows(candidates);
  const Index dim = candidates.dim();
  const auto available = static_cast<Index>(cand.size());
  const bool needs_distinct = snap || strategy != InitStrategy::QuantileGrid;
  if (needs_distinct && m > available)
    throw InputError("init_inducing: m = " + std::to_string(m) + " exceeds the " + std::to_string(available) +
                     " distinct candidate points");
  Rng rng = make_stream(seed, "init");

  Matrix z;
  switch (strategy) {
    case InitStrategy::QuantileGrid:
      z = quantile_grid(cand, m, dim);
      break;
    case InitStrategy::KMeansPlusPlus:
      z = kmeans_pp(cand, m, dim, rng);
      break;
    case InitStrategy::RandomSubset: {
      std::vector<Index> idx(cand.size());
      std::iota(idx.begin(), idx.end(), Index{0});
      std::shuffle(idx.begin(), idx.end(), rng);
      z.resize(m, dim);
      for (Index j = 0; j < m; ++j) z.row(j) = cand[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])].transpose();
      break;
    }
  }
  if (snap) {
    z = snap_to_candidates(z, cand);
  } else {
    Vector lo = cand.front(), hi = cand.front();
    for (const auto& c : cand) {
      lo = lo.cwiseMin(c);
      hi = hi.cwiseMax(c);
    }
    separate_duplicates(z, (hi - lo).maxCoeff());
  }
  return InducingSet(PointSet(std::move(z)));
}

InducingSet init_inducing(const FiniteDataset& data, Index m, InitStrategy strategy, std::uint64_t seed) {
  return init_inducing(data.ground.items(), m, strategy, seed, true);
}

InducingSet init_inducing(const ContinuousDataset& data, Index m, InitStrategy strategy, std::uint64_t seed) {
  const PointSet pooled = data.pooled();
  if (pooled.empty()) throw InputError("init_inducing: dataset has no points");
  return init_inducing(pooled, m, strategy, seed, false);
}

// ---------------------------------------------------------------------------
// Objectives

double vi_objective(const KernelParams& params, const InducingSet& z, const FiniteDataset& data) {
  return finite_loglik_bounds(params, data, z).lower;
}

double vi_objective(const KernelParams& params, const GaussianBaseMeasure& base, const InducingSet& z,
                    const ContinuousDataset& data) {
  const ContinuousFactor factor = factorize_continuous(params, base, z);
  const RoundingBound r = continuous_rounding_bound(factor);
  const double t = static_cast<double>(data.num_patterns());
  const double lower = continuous_loglik_bounds(data, continuous_data_term(params, base, data), factor).lower;
  return std::max(lower - t * (r.trace + r.logdet), kLogZero);
}

Vector overdispersion(const KernelParams& params, const GaussianBaseMeasure& base) {
  if (params.dim() != base.dim()) throw InputError("overdispersion: dimension mismatch");
  return params.lengthscales.cwiseQuotient(base.scale);
}

ContinuousObjectiveGradient vi_objective_gradient(const KernelParams& params, const GaussianBaseMeasure& base,
                                                  const InducingSet& z, const ContinuousDataset& data) {
  const Index dim = params.dim();
  if (base.dim() != dim || z.dim() != dim || data.dim != dim)
    throw InputError("vi_objective_gradient: dimension mismatch");
  const ContinuousFactor factor = factorize_continuous(params, base, z);
  const ContinuousBoundGradient bg =
      continuous_bound_gradient(params, base, z, factor, ContinuousObjective::LowerBound);
  const double t = static_cast<double>(data.num_patterns());

  ContinuousObjectiveGradient out;
  const RoundingBound rb = continuous_rounding_bound(factor);
  out.value = t * (continuous_objective_value(factor, ContinuousObjective::LowerBound) - rb.trace - rb.logdet);
  out.log_lengthscales = t * bg.log_lengthscales;
  out.log_scales = t * bg.log_scales;
  out.log_intensity = t * bg.log_intensity;
  out.z = t * bg.z;

  for (const auto& p : data.patterns) {
    if (p.empty()) continue;
    const Matrix g = gram(params, p);
    Eigen::LLT<Matrix> llt(g);
    const auto diag = llt.matrixLLT().diagonal();
    if (llt.info() != Eigen::Success || !(diag.array() > 0.0).all()) {
      out.value = kLogZero;
      return out;
    }
    out.value += 2.0 * diag.array().log().sum();
    const Matrix w = llt.solve(Matrix::Identity(p.size(), p.size()));
    for (Index d = 0; d < dim; ++d) {
      const double s = 1.0 / (params.lengthscales(d) * params.lengthscales(d));
      double acc = 0.0;
      for (Index i = 0; i < p.size(); ++i)
        for (Index j = 0; j < p.size(); ++j) {
          const double diff = p(i, d) - p(j, d);
          acc += w(i, j) * g(i, j) * diff * diff * s;
        }
      out.log_lengthscales(d) += acc;
    }
    out.value += base_log_density_sum(base, p);
    out.log_intensity += static_cast<double>(p.size());
    for (Index d = 0; d < dim; ++d) {
      const double inv_var = 1.0 / (base.scale(d) * base.scale(d));
      for (Index i = 0; i < p.size(); ++i) {
        const double u = p(i, d) - base.mean(d);
        out.log_scales(d) += -1.0 + u * u * inv_var;
      }
    }
  }
  out.value = std::max(out.value, kLogZero);
  return out;
}

namespace {

Vector flatten(const Matrix& z) { return Eigen::Map<const Vector>(z.data(), z.size()); }

Matrix unflatten(const Vector& v, Index m, Index dim) { return Eigen::Map<const Matrix>(v.data(), m, dim); }

}  // namespace

InducingSet optimize_inducing_gap(const KernelParams& params, const GaussianBaseMeasure& base,
                                  const InducingSet& z0, Index max_evals, double max_step) {
  const Index m = z0.size();
  const Index dim = z0.dim();
  auto f = [&](const Vector& x, Vector& grad) {
    const InducingSet z = z0.with_points(PointSet(unflatten(x, m, dim)));
    const ContinuousFactor factor = factorize_continuous(params, base, z);
    const ContinuousBoundGradient g =
        continuous_bound_gradient(params, base, z, factor, ContinuousObjective::NegativeGap);
    grad = flatten(g.z);
    return continuous_objective_value(factor, ContinuousObjective::NegativeGap) - continuous_rounding_bound(factor).trace;
  };
  LbfgsOptions opt;
  opt.max_evals = max_evals;
  opt.max_iters = max_evals;
  opt.max_step = max_step > 0.0 ? max_step : base.scale.mean();
  const OptimizeResult r = lbfgs_maximize(f, flatten(z0.points().coords()), opt);
  if (!std::isfinite(r.value)) return z0;
  return z0.with_points(PointSet(unflatten(r.x, m, dim)));
}

// ---------------------------------------------------------------------------
// Alternating fit

namespace {

/// Unified view of the finite and continuous objectives over (theta, Z).
class VIModel {
 public:
  virtual ~VIModel() = default;
  virtual Index num_theta() const = 0;
  virtual double value(const Vector& theta, const Matrix& z) const = 0;
  virtual bool has_gradient() const { return false; }
  virtual double value_grad(const Vector& theta, const Matrix& z, Vector& g_theta, Matrix& g_z) const {
    (void)theta, (void)z, (void)g_theta, (void)g_z;
    throw InputError("VIModel: no analytic gradient");
  }
  virtual BoundPair bounds(const Vector& theta, const Matrix& z) const = 0;
  virtual KernelParams params(const Vector& theta) const = 0;
  virtual GaussianBaseMeasure base(const Vector& theta) const = 0;
  virtual double z_scale() const = 0;
};

class FiniteModel final : public VIModel {
 public:
  FiniteModel(const FiniteDataset& data, const KernelParams& init, bool fit_amplitude, double jitter,
              const std::function<void(const VIEvaluation&)>& observer)
      : data_(data), init_(init), fit_amplitude_(fit_amplitude), jitter_(jitter), observer_(observer) {
    const Matrix& c = data.ground.items().coords();
    Vector sd(c.cols());
    for (Index d = 0; d < c.cols(); ++d) {
      const double mean = c.col(d).mean();
      sd(d) = std::sqrt((c.col(d).array() - mean).square().mean());
    }
    z_scale_ = std::max(sd.mean(), 1e-8);
  }

  Vector theta0() const {
    Vector t(num_theta());
    Index k = 0;
    if (fit_amplitude_) t(k++) = std::log(init_.amplitude);
    for (Index d = 0; d < init_.dim(); ++d) t(k++) = std::log(init_.lengthscales(d));
    return t;
  }

  Index num_theta() const override { return init_.dim() + (fit_amplitude_ ? 1 : 0); }

  KernelParams params(const Vector& theta) const override {
    Index k = 0;
    const double a = fit_amplitude_ ? std::exp(theta(k++)) : init_.amplitude;
    return KernelParams(a, theta.tail(init_.dim()).array().exp().matrix());
  }

  GaussianBaseMeasure base(const Vector&) const override { return GaussianBaseMeasure(); }

  double value(const Vector& theta, const Matrix& z) const override {
    const KernelParams p = params(theta);
    const double v = vi_objective(p, InducingSet(PointSet(z), jitter_), data_);
    if (observer_) observer_(VIEvaluation{p, nullptr, z, v});
    return v;
  }

  BoundPair bounds(const Vector& theta, const Matrix& z) const override {
    return finite_loglik_bounds(params(theta), data_, InducingSet(PointSet(z), jitter_));
  }

  double z_scale() const override { return z_scale_; }

 private:
  const FiniteDataset& data_;
  KernelParams init_;
  bool fit_amplitude_;
  double jitter_;
  const std::function<void(const VIEvaluation&)>& observer_;
  double z_scale_ = 1.0;
};

class ContinuousModel final : public VIModel {
 public:
  ContinuousModel(const ContinuousDataset& data, const KernelParams& init, const GaussianBaseMeasure& base,
                  bool fit_base, double jitter, const std::function<void(const VIEvaluation&)>& observer)
      : data_(data), init_(init), base_(base), fit_base_(fit_base), jitter_(jitter), observer_(observer) {}

  Index dim() const { return init_.dim(); }

  Vector theta0() const {
    Vector t(num_theta());
    t.head(dim()) = init_.lengthscales.array().log();
    if (fit_base_) {
      t.segment(dim(), dim()) = base_.scale.array().log();
      t(2 * dim()) = std::log(base_.intensity);
    }
    return t;
  }

  Index num_theta() const override { return fit_base_ ? 2 * dim() + 1 : dim(); }

  KernelParams params(const Vector& theta) const override {
    return KernelParams(init_.amplitude, theta.head(dim()).array().exp().matrix());
  }

  GaussianBaseMeasure base(const Vector& theta) const override {
    if (!fit_base_) return base_;
    return GaussianBaseMeasure(std::exp(theta(2 * dim())), base_.mean,
                               theta.segment(dim(), dim()).array().exp().matrix());
  }

  double value(const Vector& theta, const Matrix& z) const override {
    const KernelParams p = params(theta);
    const GaussianBaseMeasure b = base(theta);
    const double v = vi_objective(p, b, InducingSet(PointSet(z), jitter_), data_);
    if (observer_) observer_(VIEvaluation{p, &b, z, v});
    return v;
  }

  bool has_gradient() const override { return true; }

  double value_grad(const Vector& theta, const Matrix& z, Vector& g_theta, Matrix& g_z) const override {
    const KernelParams p = params(theta);
    const GaussianBaseMeasure b = base(theta);
    const ContinuousObjectiveGradient g = vi_objective_gradient(p, b, InducingSet(PointSet(z), jitter_), data_);
    if (observer_) observer_(VIEvaluation{p, &b, z, g.value});
    g_theta.resize(num_theta());
    g_theta.head(dim()) = g.log_lengthscales;
    if (fit_base_) {
      g_theta.segment(dim(), dim()) = g.log_scales;
      g_theta(2 * dim()) = g.log_intensity;
    }
    g_z = g.z;
    return is_log_zero(g.value) ? -std::numeric_limits<double>::infinity() : g.value;
  }

  BoundPair bounds(const Vector& theta, const Matrix& z) const override {
    return certified_continuous_loglik_bounds(params(theta), base(theta), data_, InducingSet(PointSet(z), jitter_));
  }

  double z_scale() const override { return base_.scale.mean(); }

 private:
  const ContinuousDataset& data_;
  KernelParams init_;
  GaussianBaseMeasure base_;
  bool fit_base_;
  double jitter_;
  const std::function<void(const VIEvaluation&)>& observer_;
};

double finite_or_neg_inf(double v) {
  return std::isfinite(v) && !is_log_zero(v) ? v : -std::numeric_limits<double>::infinity();
}

struct FitState {
  Vector theta;
  Matrix z;
  double value;
};

// One block of coordinate ascent; only improvements are kept.
void run_block(const VIModel& model, const VIConfig& config, FitState& state, bool theta_block, Rng& rng,
               Index& evaluations) {
  const Index m = state.z.rows();
  const Index dim = state.z.cols();
  const double zs = model.z_scale();

  // x is theta, or Z scaled by zs so one step size fits both blocks.
  auto unpack = [&](const Vector& x, Vector& theta, Matrix& z) {
    if (theta_block) {
      theta = x;
      z = state.z;
    } else {
      theta = state.theta;
      z = unflatten(x * zs, m, dim);
    }
  };
  const Vector x0 = theta_block ? state.theta : Vector(flatten(state.z) / zs);
  const Index budget = theta_block ? config.theta_evals : config.z_evals;

  auto value_only = [&](const Vector& x) {
    Vector theta;
    Matrix z;
    unpack(x, theta, z);
    return finite_or_neg_inf(model.value(theta, z));
  };

  OptimizeResult r;
  if (config.optimizer == VIOptimizer::EvolutionStrategy) {
    EsOptions opt;
    opt.max_evals = budget;
    opt.max_generations = budget;
    opt.initial_sigma = 0.1;
    r = es_maximize(value_only, x0, rng, opt);
  } else {
    ObjectiveWithGradient fg;
    if (config.optimizer == VIOptimizer::AnalyticGradient && model.has_gradient()) {
      fg = [&](const Vector& x, Vector& grad) {
        Vector theta, g_theta;
        Matrix z, g_z;
        unpack(x, theta, z);
        const double v = model.value_grad(theta, z, g_theta, g_z);
        grad = theta_block ? g_theta : Vector(flatten(g_z) * zs);
        return v;
      };
    } else {
      fg = [&](const Vector& x, Vector& grad) {
        const double v = value_only(x);
        if (!std::isfinite(v)) return v;
        grad = finite_difference_gradient(value_only, x, 1e-5);
        evaluations += 2 * x.size();
        return v;
      };
    }
    LbfgsOptions opt;
    opt.max_evals = budget;
    opt.max_iters = budget;
    opt.max_step = 1.0;
    r = lbfgs_maximize(fg, x0, opt);
  }
  evaluations += r.evaluations;
  if (std::isfinite(r.value) && r.value > state.value) {
    unpack(r.x, state.theta, state.z);
    state.value = r.value;
  }
}

void run_joint_es(const VIModel& model, const VIConfig& config, FitState& state, Rng& rng, Index& evaluations) {
  const Index p = state.theta.size();
  const Index m = state.z.rows();
  const Index dim = state.z.cols();
  const double zs = model.z_scale();
  Vector x0(p + m * dim);
  x0 << state.theta, flatten(state.z) / zs;
  auto f = [&](const Vector& x) {
    return finite_or_neg_inf(model.value(x.head(p), unflatten(x.tail(m * dim) * zs, m, dim)));
  };
  EsOptions opt;
  opt.max_evals = config.theta_evals + config.z_evals;
  opt.max_generations = opt.max_evals;
  opt.initial_sigma = 0.1;
  const OptimizeResult r = es_maximize(f, x0, rng, opt);
  evaluations += r.evaluations;
  if (std::isfinite(r.value) && r.value > state.value) {
    state.theta = r.x.head(p);
    state.z = unflatten(r.x.tail(m * dim) * zs, m, dim);
    state.value = r.value;
  }
}

template <typename Model>
VIResult fit_model(const Model& model, const Vector& theta0, const InducingSet& z0, const VIConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng = make_stream(config.seed, "vi");
  FitState state{theta0, z0.points().coords(), -std::numeric_limits<double>::infinity()};
  Index evaluations = 1;
  try {
    state.value = finite_or_neg_inf(model.value(state.theta, state.z));
  } catch (const InputError&) {
  } catch (const NumericError&) {
  }
  if (!std::isfinite(state.value))
    throw VIDivergence("fit_vi: objective is not finite at the initial state", model.params(state.theta),
                       model.base(state.theta), state.z);

  VIResult out{model.params(state.theta), model.base(state.theta), z0, {state.value}, {}, {}, 0, 0, 0.0, false};
  Index stall = 0;
  for (Index sweep = 0; sweep < config.max_iters; ++sweep) {
    const double before = state.value;
    if (config.joint && config.optimizer == VIOptimizer::EvolutionStrategy) {
      run_joint_es(model, config, state, rng, evaluations);
    } else {
      run_block(model, config, state, true, rng, evaluations);
      run_block(model, config, state, false, rng, evaluations);
    }
    if (!std::isfinite(state.value))
      throw VIDivergence("fit_vi: objective became non-finite", model.params(state.theta), model.base(state.theta),
                         state.z);
    out.trace.push_back(state.value);
    ++out.iterations;
    if (std::abs(state.value - before) < config.tolerance * std::abs(state.value)) {
      if (++stall >= config.stall_sweeps) {
        out.converged = true;
        break;
      }
    } else {
      stall = 0;
    }
  }

  out.params = model.params(state.theta);
  out.base = model.base(state.theta);
  out.z = z0.with_points(PointSet(state.z));
  out.bounds = model.bounds(state.theta, state.z);
  out.evaluations = evaluations;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

VIResult fit_vi(const FiniteDataset& data, const KernelParams& init, const VIConfig& config,
                const std::optional<InducingSet>& z0) {
  config.validate();
  init.validate();
  if (init.dim() != data.ground.dim()) throw InputError("fit_vi: kernel and ground set differ in dimension");
  const InducingSet z = z0 ? *z0 : init_inducing(data, config.m, config.init, config.seed);
  const FiniteModel model(data, init, config.fit_amplitude, z.jitter(), config.on_evaluate);
  return fit_model(model, model.theta0(), z, config);
}

VIResult fit_vi(const ContinuousDataset& data, const KernelParams& init, const GaussianBaseMeasure& base_init,
                const VIConfig& config, const std::optional<InducingSet>& z0) {
  config.validate();
  init.validate();
  base_init.validate(false);
  if (init.dim() != data.dim || base_init.dim() != data.dim)
    throw InputError("fit_vi: kernel, base measure and data differ in dimension");
  const InducingSet z = z0 ? *z0 : init_inducing(data, config.m, config.init, config.seed);
  const ContinuousModel model(data, init, base_init, config.fit_base, z.jitter(), config.on_evaluate);
  VIResult out = fit_model(model, model.theta0(), z, config);
  out.gamma = overdispersion(out.params, out.base);
  return out;
}

}  // namespace dppbound

namespace dppbound {

namespace {

Index default_candidates_per_axis(const KernelParams& params, const GaussianBaseMeasure& base) {
  const double wanted = std::ceil(12.0 * base.scale.maxCoeff() / (0.3 * params.lengthscales.minCoeff()));
  const double cap = std::floor(std::pow(30000.0, 1.0 / static_cast<double>(base.dim())));
  return static_cast<Index>(std::clamp(wanted, 40.0, cap));
}

double certified_width_or_inf(const KernelParams& params, const GaussianBaseMeasure& base, const Matrix& z) {
  try {
    const BoundPair b = certified_neg_logdet_bounds_continuous(params, base, InducingSet(PointSet(z))).bounds;
    return b.upper - b.lower;
  } catch (const std::exception&) {
    return std::numeric_limits<double>::infinity();
  }
}

void check_ascending(const std::vector<Index>& ms) {
  if (ms.empty()) throw InputError("bounds sweep: empty m list");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (ms[i] < 1 || ms[i] > kMaxInducing) throw InputError("bounds sweep: m out of range");
    if (i > 0 && ms[i] <= ms[i - 1]) throw InputError("bounds sweep: m values must be strictly increasing");
  }
}

}  // namespace

SweepResult continuous_bounds_sweep(const KernelParams& params, const GaussianBaseMeasure& base,
                                    const ContinuousDataset& data, const std::vector<Index>& ms, Index opt_evals,
                                    Index candidates_per_axis) {
  check_ascending(ms);
  if (opt_evals < 0) throw InputError("bounds sweep: negative optimization budget");
  if (data.dim != params.dim()) throw InputError("bounds sweep: dimension mismatch");
  const Index per_axis = candidates_per_axis > 0 ? candidates_per_axis : default_candidates_per_axis(params, base);
  const Matrix candidates = base_candidate_grid(base, per_axis);
  SweepResult out;
  Matrix z(0, params.dim());
  for (const Index m : ms) {
    const auto start = std::chrono::steady_clock::now();
    z = extend_inducing_greedy(params, base, z, m - z.rows(), candidates);
    if (opt_evals > 0) {
      const Matrix opt = optimize_inducing_gap(params, base, InducingSet(PointSet(z)), opt_evals).points().coords();
      if (certified_width_or_inf(params, base, opt) < certified_width_or_inf(params, base, z)) z = opt;
    }
    const BoundPair b = certified_continuous_loglik_bounds(params, base, data, InducingSet(PointSet(z)));
    SweepRow row;
    row.m = z.rows();
    row.lower = b.lower;
    row.upper = b.upper;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.rows.push_back(row);
  }
  out.z = z;
  return out;
}

SweepResult finite_bounds_sweep(const KernelParams& params, const FiniteDataset& data, const std::vector<Index>& ms) {
  check_ascending(ms);
  SweepResult out;
  for (const Index m : ms) {
    const auto start = std::chrono::steady_clock::now();
    const Matrix z = pivot_inducing_items(params, data.ground.items(), m);
    const BoundPair b = finite_loglik_bounds(params, data, InducingSet(PointSet(z)));
    SweepRow row;
    row.m = z.rows();
    row.lower = b.lower;
    row.upper = b.upper;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.rows.push_back(row);
    out.z = z;
  }
  return out;
}

}  // namespace dppbound
