#include "dppbound/mcmc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "dppbound/oracle.hpp"

namespace dppbound {

PriorBox PriorBox::gaussian_gaussian_default() {
  return PriorBox{{{"kappa", 200.0, 2000.0, PriorScale::Natural},
                   {"alpha", -10.0, 10.0, PriorScale::Log},
                   {"eps", -10.0, 10.0, PriorScale::Log}}};
}

void PriorBox::validate() const {
  if (intervals.empty()) throw InputError("PriorBox: no parameters");
  for (const auto& iv : intervals) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi))
      throw InputError("PriorBox: interval for '" + iv.name + "' must be finite with lo < hi");
    if (iv.scale == PriorScale::Natural && !(iv.lo > 0.0))
      throw InputError("PriorBox: natural-scale interval for '" + iv.name + "' must be positive");
  }
}

bool PriorBox::contains(const Vector& u) const {
  if (u.size() != dim()) throw InputError("PriorBox: dimension mismatch");
  for (Index i = 0; i < dim(); ++i) {
    const auto& iv = intervals[static_cast<std::size_t>(i)];
    const double v = iv.scale == PriorScale::Natural ? std::exp(u(i)) : u(i);
    if (!(v >= iv.lo && v <= iv.hi)) return false;
  }
  return true;
}

double PriorBox::log_density(const Vector& u) const {
  if (!contains(u)) return kLogZero;
  double out = 0.0;
  for (Index i = 0; i < dim(); ++i) {
    const auto& iv = intervals[static_cast<std::size_t>(i)];
    out -= std::log(iv.hi - iv.lo);
    if (iv.scale == PriorScale::Natural) out += u(i);
  }
  return out;
}

void MCMCConfig::validate(Index dim) const {
  if (n_iters < 1) throw InputError("MCMCConfig: n_iters must be >= 1");
  if (m0 < 1 || m_step < 1 || m_max < m0) throw InputError("MCMCConfig: need m0 >= 1, m_step >= 1, m_max >= m0");
  if (m_max > kMaxInducing) throw InputError("MCMCConfig: m_max exceeds the inducing-point cap");
  if (z_budget < 1) throw InputError("MCMCConfig: z_budget must be >= 1");
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
    throw InputError("MCMCConfig: target acceptance must lie in (0, 1)");
  if (adapt_start < 2) throw InputError("MCMCConfig: adapt_start must be >= 2");
  if (!(adapt_gain >= 0.0) || !(eps_reg > 0.0)) throw InputError("MCMCConfig: adapt_gain >= 0 and eps_reg > 0");
  if (initial_u.size() != dim) throw InputError("MCMCConfig: initial state has the wrong dimension");
  if (initial_proposal_sd.size() != dim || !(initial_proposal_sd.array() > 0.0).all())
    throw InputError("MCMCConfig: initial proposal sd must be positive, one per parameter");
}

// ---------------------------------------------------------------------------
// Targets

GaussianGaussianTarget::GaussianGaussianTarget(ContinuousDataset data) : data_(std::move(data)) {
  if (data_.dim != 1) throw InputError("GaussianGaussianTarget: one-dimensional data only");
}

KernelParams GaussianGaussianTarget::params(const Vector& u) { return KernelParams::from_eps(std::exp(u(2))); }

GaussianBaseMeasure GaussianGaussianTarget::base(const Vector& u) {
  return GaussianBaseMeasure::from_alpha(std::exp(u(0)), std::exp(u(1)));
}

double GaussianGaussianTarget::exact_loglik(const Vector& u) const {
  return exact_loglik_gg(params(u), base(u), data_);
}

namespace {

constexpr Index kCandidatesPerAxis = 600;

double certified_width(const KernelParams& p, const GaussianBaseMeasure& b, const Matrix& z) {
  try {
    const BoundPair w = certified_neg_logdet_bounds_continuous(p, b, InducingSet(PointSet(z))).bounds;
    return w.upper - w.lower;
  } catch (const std::exception&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

Matrix GaussianGaussianTarget::prepare_z(const Vector& u, Index m, const Matrix*, Index) const {
  const GaussianBaseMeasure b = base(u);
  return extend_inducing_greedy(params(u), b, Matrix(0, 1), m, base_candidate_grid(b, kCandidatesPerAxis));
}

Matrix GaussianGaussianTarget::refine_z(const Vector& u, const Matrix& z, Index add, Index budget) const {
  const GaussianBaseMeasure b = base(u);
  const KernelParams p = params(u);
  Matrix out = extend_inducing_greedy(p, b, z, add, base_candidate_grid(b, kCandidatesPerAxis));
  if (out.rows() == z.rows()) return z;
  const double width_before = certified_width(p, b, z);
  double width = certified_width(p, b, out);
  // Local coordinate perturbation of the new points only; improvements kept.
  double step = 0.1 * p.lengthscales(0);
  Index evals = 0;
  while (evals < budget) {
    bool improved = false;
    for (Index i = z.rows(); i < out.rows() && evals < budget; ++i) {
      for (const double dir : {1.0, -1.0}) {
        if (evals >= budget) break;
        Matrix trial = out;
        trial(i, 0) += dir * step;
        const double w = certified_width(p, b, trial);
        ++evals;
        if (w < width) {
          out = std::move(trial);
          width = w;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  // Rounding can make a larger set certify a wider interval; keep the old one then.
  if (!(width <= width_before)) return z;
  return out;
}

BoundPair GaussianGaussianTarget::loglik_bounds(const Vector& u, const Matrix& z) const {
  return certified_continuous_loglik_bounds(params(u), base(u), data_, InducingSet(PointSet(z)));
}

FiniteTarget::FiniteTarget(FiniteDataset data) : data_(std::move(data)) {}

std::vector<std::string> FiniteTarget::names() const {
  std::vector<std::string> out{"amplitude"};
  for (Index d = 0; d < data_.ground.dim(); ++d) out.push_back("sigma_" + std::to_string(d + 1));
  return out;
}

KernelParams FiniteTarget::params(const Vector& u) {
  return KernelParams(std::exp(u(0)), u.tail(u.size() - 1).array().exp().matrix());
}

double FiniteTarget::exact_loglik(const Vector& u) const { return finite_loglik_exact(params(u), data_); }

Matrix FiniteTarget::prepare_z(const Vector& u, Index m, const Matrix*, Index) const {
  return pivot_inducing_items(params(u), data_.ground.items(), m);
}

Matrix FiniteTarget::refine_z(const Vector& u, const Matrix& z, Index add, Index) const {
  return pivot_inducing_items(params(u), data_.ground.items(), z.rows() + add);
}

BoundPair FiniteTarget::loglik_bounds(const Vector& u, const Matrix& z) const {
  return finite_loglik_bounds(params(u), data_, InducingSet(PointSet(z)));
}

BoundPair log_posterior_bounds(const MHTarget& target, const Vector& u, const Matrix& z, const PriorBox& prior) {
  const double lp = prior.log_density(u);
  if (is_log_zero(lp)) return BoundPair{kLogZero, kLogZero, BoundSubject::LogLikelihood};
  const BoundPair b = target.loglik_bounds(u, z);
  return BoundPair{std::max(b.lower + lp, kLogZero), std::max(b.upper + lp, kLogZero), BoundSubject::LogLikelihood};
}

// ---------------------------------------------------------------------------
// Accept decision

AcceptDecision retrospective_accept(const MHTarget& target, const PriorBox& prior, const MHState& current,
                                    const MHState& proposed, double log_u, const MCMCConfig& config) {
  AcceptDecision d;
  Matrix zc = current.z;
  Matrix zp = proposed.z;
  BoundPair bc = current.log_post;
  BoundPair bp = proposed.log_post;
  for (;;) {
    d.lo = std::max(bp.lower - bc.upper, kLogZero);
    d.hi = std::max(bp.upper - bc.lower, kLogZero);
    d.widths.push_back(d.hi - d.lo);
    if (log_u < d.lo) {
      d.accepted = true;
      break;
    }
    if (log_u >= d.hi) {
      d.accepted = false;
      break;
    }
    if (std::max(zc.rows(), zp.rows()) + config.m_step > config.m_max) {
      d.fallback = true;
      d.accepted = log_u < 0.5 * (d.lo + d.hi);
      break;
    }
    const Index before = zc.rows() + zp.rows();
    zc = target.refine_z(current.u, zc, config.m_step, config.z_budget);
    zp = target.refine_z(proposed.u, zp, config.m_step, config.z_budget);
    if (zc.rows() + zp.rows() == before) {
      // Neither set can be refined further at working precision.
      d.fallback = true;
      d.accepted = log_u < 0.5 * (d.lo + d.hi);
      break;
    }
    bc = log_posterior_bounds(target, current.u, zc, prior);
    bp = log_posterior_bounds(target, proposed.u, zp, prior);
    ++d.refinements;
  }
  d.m_cur = zc.rows();
  d.m_prop = zp.rows();
  return d;
}

// ---------------------------------------------------------------------------
// Proposal adaptation

Matrix adapt_proposal(const Matrix& history, double log_scale, double eps_reg) {
  const Index p = history.cols();
  Matrix cov = Matrix::Zero(p, p);
  if (history.rows() >= 2) {
    const Matrix centered = history.rowwise() - history.colwise().mean();
    cov = centered.transpose() * centered / static_cast<double>(history.rows() - 1);
  }
  cov.diagonal().array() += eps_reg;
  return std::exp(log_scale) * cov;
}

double adapt_log_scale(double log_scale, bool accepted, Index k, double target, double gain) {
  return log_scale + gain / static_cast<double>(k + 1) * ((accepted ? 1.0 : 0.0) - target);
}

AdaptiveProposal::AdaptiveProposal(const Vector& initial_sd, const MCMCConfig& config)
    : initial_var_(initial_sd.cwiseAbs2()),
      target_(config.target_acceptance),
      gain_(config.adapt_gain),
      eps_reg_(config.eps_reg),
      start_(config.adapt_start),
      mean_(Vector::Zero(initial_sd.size())),
      m2_(Matrix::Zero(initial_sd.size(), initial_sd.size())) {}

Matrix AdaptiveProposal::covariance() const {
  if (k_ < start_) return std::exp(log_scale_) * Matrix(initial_var_.asDiagonal());
  Matrix cov = m2_ / static_cast<double>(k_ - 1);
  cov.diagonal().array() += eps_reg_;
  return std::exp(log_scale_) * cov;
}

Vector AdaptiveProposal::propose(const Vector& u, Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(u.size());
  for (Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  const Eigen::LLT<Matrix> llt(covariance());
  return u + llt.matrixL() * z;
}

void AdaptiveProposal::update(const Vector& u, bool accepted) {
  ++k_;
  const Vector delta = u - mean_;
  mean_ += delta / static_cast<double>(k_);
  m2_ += delta * (u - mean_).transpose();
  log_scale_ = adapt_log_scale(log_scale_, accepted, k_, target_, gain_);
  // Switching to the empirical covariance: start from the classical
  // 2.38^2 / d random-walk scaling.
  if (k_ == start_) log_scale_ = std::log(2.38 * 2.38 / static_cast<double>(u.size()));
}

// ---------------------------------------------------------------------------
// Chain

ChainTrace run_mh(const MHTarget& target, const PriorBox& prior, const MCMCConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  prior.validate();
  if (prior.dim() != target.dim()) throw InputError("run_mh: prior and target differ in dimension");
  config.validate(target.dim());
  if (!prior.contains(config.initial_u)) throw InputError("run_mh: initial state lies outside the prior box");
  const bool retro = config.mode == MHMode::Retrospective;
  const bool need_exact = !retro || config.instrument;
  if (need_exact && !target.has_exact()) throw InputError("run_mh: target has no exact likelihood");

  Rng rng_prop = make_stream(config.seed, "proposal");
  Rng rng_retro = make_stream(config.seed, "retrospective");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  AdaptiveProposal proposal(config.initial_proposal_sd, config);

  MHState cur;
  cur.u = config.initial_u;
  double exact_cur = 0.0;
  if (retro) {
    cur.z = target.prepare_z(cur.u, config.m0, nullptr, config.z_budget);
    cur.log_post = log_posterior_bounds(target, cur.u, cur.z, prior);
  }
  if (need_exact) exact_cur = target.exact_loglik(cur.u) + prior.log_density(cur.u);

  ChainTrace trace;
  trace.names = target.names();
  trace.records.reserve(static_cast<std::size_t>(config.n_iters));
  Index accepted_count = 0;

  for (Index it = 0; it < config.n_iters; ++it) {
    const Vector u_prop = proposal.propose(cur.u, rng_prop);
    // The uniform is fixed before any likelihood or bound work.
    double uu = 0.0;
    while (uu <= 0.0) uu = unif(rng_retro);
    ++trace.uniform_draws;
    const double log_u = std::log(uu);

    ChainRecord rec;
    rec.iter = it + 1;
    rec.u = uu;
    rec.proposal = target.theta(u_prop);
    bool accept = false;
    double exact_prop = kLogZero;
    MHState prop;
    if (!prior.contains(u_prop)) {
      rec.m_cur = retro ? cur.z.rows() : 0;
      if (config.instrument) rec.exact_decision = 0;
    } else if (!retro) {
      exact_prop = target.exact_loglik(u_prop) + prior.log_density(u_prop);
      const double la = std::max(exact_prop - exact_cur, kLogZero);
      accept = log_u < la;
      rec.logalpha_lo = rec.logalpha_hi = la;
    } else {
      prop.u = u_prop;
      prop.z = target.prepare_z(u_prop, config.m0, &cur.z, config.z_budget);
      prop.log_post = log_posterior_bounds(target, u_prop, prop.z, prior);
      const AcceptDecision d = retrospective_accept(target, prior, cur, prop, log_u, config);
      accept = d.accepted;
      rec.logalpha_lo = d.lo;
      rec.logalpha_hi = d.hi;
      rec.m_cur = d.m_cur;
      rec.m_prop = d.m_prop;
      rec.refinements = d.refinements;
      rec.fallback = d.fallback;
      for (std::size_t k = 1; k < d.widths.size(); ++k)
        if (d.widths[k] > d.widths[k - 1] + 1e-9 * std::max(1.0, std::abs(d.widths[k - 1]))) rec.widths_monotone = false;
      if (config.instrument) {
        exact_prop = target.exact_loglik(u_prop) + prior.log_density(u_prop);
        rec.exact_decision = log_u < std::max(exact_prop - exact_cur, kLogZero) ? 1 : 0;
        if (!d.fallback && rec.exact_decision != (accept ? 1 : 0)) ++trace.mismatches;
      }
    }

    if (accept) {
      ++accepted_count;
      if (retro) cur = std::move(prop);
      else cur.u = u_prop;
      if (need_exact) exact_cur = exact_prop;
    }
    proposal.update(cur.u, accept);

    rec.accepted = accept;
    rec.theta = target.theta(cur.u);
    if (rec.fallback) ++trace.fallbacks;
    const Index m_used = std::max(rec.m_cur, rec.m_prop);
    trace.max_m = std::max(trace.max_m, m_used);
    if (retro) ++trace.m_histogram[m_used];
    trace.records.push_back(std::move(rec));
  }
  trace.acceptance_rate = static_cast<double>(accepted_count) / static_cast<double>(config.n_iters);
  trace.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

}  // namespace dppbound
