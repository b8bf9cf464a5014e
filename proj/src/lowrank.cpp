#include "dppbound/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace dppbound {

InducingSet::InducingSet(PointSet points, double jitter) : points_(std::move(points)), jitter_(jitter) {
  if (points_.size() < 1) throw InputError("InducingSet: need at least one inducing point");
  if (points_.size() > kMaxInducing)
    throw InputError("InducingSet: more than " + std::to_string(kMaxInducing) + " inducing points");
  if (!(jitter_ >= 0.0) || !std::isfinite(jitter_))
    throw InputError("InducingSet: jitter must be nonnegative");
  if (!points_.coords().allFinite()) throw InputError("InducingSet: non-finite coordinate");
  const double scale = std::max(1.0, points_.coords().cwiseAbs().maxCoeff());
  if (min_pairwise_distance(points_) <= 1e-12 * scale)
    throw InputError("InducingSet: inducing points must be pairwise distinct");
}

double min_pairwise_distance(const PointSet& z) {
  double best = std::numeric_limits<double>::infinity();
  const Matrix& c = z.coords();
  for (Index i = 0; i < z.size(); ++i)
    for (Index j = i + 1; j < z.size(); ++j) best = std::min(best, (c.row(i) - c.row(j)).squaredNorm());
  return std::sqrt(best);
}

const char* to_string(BoundSubject s) {
  switch (s) {
    case BoundSubject::NegLogDetFinite: return "neg_logdet_finite";
    case BoundSubject::NegLogDetContinuous: return "neg_logdet_continuous";
    case BoundSubject::LogLikelihood: return "loglik";
    case BoundSubject::LogAcceptanceRatio: return "log_acceptance_ratio";
  }
  return "unknown";
}

BoundPair BoundPair::make(double lower, double upper, BoundSubject subject) {
  if (!std::isfinite(lower) || !std::isfinite(upper))
    throw NumericError(std::string("BoundPair(") + to_string(subject) + "): non-finite bound");
  if (lower > upper + 1e-12 + 1e-12 * std::abs(upper)) {
    std::ostringstream os;
    os.precision(17);
    os << "BoundPair(" << to_string(subject) << "): lower " << lower << " exceeds upper " << upper;
    throw NumericError(os.str());
  }
  return BoundPair{std::min(lower, upper), upper, subject};
}

double JitteredCholesky::logdet() const {
  const Matrix& l = llt.matrixLLT();
  double out = 0.0;
  for (Index i = 0; i < l.rows(); ++i) out += std::log(l(i, i));
  return 2.0 * out;
}

JitteredCholesky jittered_cholesky(const Matrix& a, double relative_start) {
  const Index m = a.rows();
  if (a.cols() != m) throw InputError("jittered_cholesky: matrix must be square");
  if (!a.allFinite()) throw NumericError("jittered_cholesky: non-finite input");
  double mean_diag = m > 0 ? a.diagonal().mean() : 1.0;
  if (!(mean_diag > 0.0)) mean_diag = 1.0;

  double rel = relative_start;
  double last = 0.0;
  while (rel <= kMaxRelativeJitter * (1.0 + 1e-9)) {
    last = rel * mean_diag;
    Matrix shifted = a;
    shifted.diagonal().array() += last;
    JitteredCholesky out{Eigen::LLT<Matrix>(shifted), last, rel};
    if (out.llt.info() == Eigen::Success) {
      const auto diag = out.llt.matrixLLT().diagonal();
      if (diag.allFinite() && (diag.array() > 0.0).all()) return out;
    }
    rel = rel > 0.0 ? rel * 10.0 : kDefaultRelativeJitter;
  }
  std::ostringstream os;
  os << "L_Z is not positive definite after jitter escalation (last jitter " << last << ")";
  throw FactorizationError(os.str(), last);
}

double logdet_spd_or_zero(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return kLogZero;
  const auto diag = llt.matrixLLT().diagonal();
  double out = 0.0;
  for (Index i = 0; i < diag.size(); ++i) {
    if (!(diag(i) > 0.0) || !std::isfinite(diag(i))) return kLogZero;
    out += std::log(diag(i));
  }
  return std::max(2.0 * out, kLogZero);
}

NystromFactor::NystromFactor(JitteredCholesky lz, Matrix v, double trace_l)
    : lz_(std::move(lz)), v_(std::move(v)), trace_l_(trace_l) {
  trace_q_ = v_.squaredNorm();
  logdet_lz_ = lz_.logdet();
  Matrix inner = v_ * v_.transpose();
  inner.diagonal().array() += 1.0;
  Eigen::LLT<Matrix> llt(inner);
  if (llt.info() != Eigen::Success) throw NumericError("factorize: I + V V^T is not positive definite");
  double ld = 0.0;
  for (Index i = 0; i < inner.rows(); ++i) ld += std::log(llt.matrixLLT()(i, i));
  logdet_i_plus_q_ = 2.0 * ld;
  if (!std::isfinite(logdet_i_plus_q_) || !std::isfinite(trace_q_))
    throw NumericError("factorize: non-finite low-rank quantities");
}

NystromFactor factorize(const KernelParams& params, const PointSet& x, const InducingSet& z) {
  params.validate();
  if (x.dim() != z.dim()) throw InputError("factorize: data and inducing points differ in dimension");
  const Matrix l_z = gram(params, z.points());
  JitteredCholesky lz = jittered_cholesky(l_z, z.jitter());
  const Index m = z.size();
  Matrix v(2 * m, x.size());
  v.topRows(m) = cross_gram(params, z.points(), x);
  lz.llt.matrixL().solveInPlace(v.topRows(m));
  // One refinement step of the jittered solve, A = L_Z + jI:
  //   Q = L_XZ (A^-1 + j A^-2) L_ZX = V^T V + j W^T W,  W = A^-1 L_ZX.
  // Eigenvalue-wise lambda^2 (lambda + 2j) / (lambda + j)^2 <= lambda, so Q
  // stays below the unjittered Nystrom surrogate while the jitter bias on
  // tr(L - Q) drops from about j per item to at most j / 4.
  v.bottomRows(m) = v.topRows(m);
  lz.llt.matrixU().solveInPlace(v.bottomRows(m));
  v.bottomRows(m) *= std::sqrt(lz.jitter);
  // Every diagonal entry of L equals the amplitude.
  const double trace_l = params.amplitude * static_cast<double>(x.size());
  return NystromFactor(std::move(lz), std::move(v), trace_l);
}

BoundPair neg_logdet_bounds_finite(const NystromFactor& factor) {
  const double upper = -factor.logdet_i_plus_q();
  return BoundPair::make(upper - bound_gap(factor), upper, BoundSubject::NegLogDetFinite);
}

double bound_gap(const NystromFactor& factor) {
  // Q <= L in the PSD order, so the trace difference is nonnegative up to round-off.
  return std::max(0.0, factor.trace_l() - factor.trace_q());
}

ContinuousFactor factorize_continuous(const KernelParams& params, const GaussianBaseMeasure& base,
                                      const InducingSet& z) {
  params.validate();
  base.validate();
  ContinuousFactor f;
  f.l_z = gram(params, z.points());
  f.lz = jittered_cholesky(f.l_z, z.jitter());
  f.psi = psi_matrix(params, base, z.points());
  f.trace_operator = trace_operator(params, base);

  // Phi = R^-1 Psi R^-T
  Matrix tmp = f.psi;
  f.lz.llt.matrixL().solveInPlace(tmp);
  Matrix tmp_t = tmp.transpose();
  f.lz.llt.matrixL().solveInPlace(tmp_t);
  f.phi = 0.5 * (tmp_t + tmp_t.transpose());
  f.trace_q = f.phi.trace();

  Matrix ip = f.phi;
  ip.diagonal().array() += 1.0;
  f.i_plus_phi.compute(ip);
  if (f.i_plus_phi.info() != Eigen::Success)
    throw NumericError("factorize_continuous: I + Phi is not positive definite");
  double ld = 0.0;
  for (Index i = 0; i < ip.rows(); ++i) ld += std::log(f.i_plus_phi.matrixLLT()(i, i));
  f.logdet_i_plus_q = 2.0 * ld;
  if (!std::isfinite(f.logdet_i_plus_q) || !std::isfinite(f.trace_q))
    throw NumericError("factorize_continuous: non-finite low-rank quantities");
  return f;
}

BoundPair neg_logdet_bounds_continuous(const ContinuousFactor& factor) {
  const double upper = -factor.logdet_i_plus_q;
  return BoundPair::make(upper - bound_gap(factor), upper, BoundSubject::NegLogDetContinuous);
}

BoundPair neg_logdet_bounds_continuous(const KernelParams& params, const GaussianBaseMeasure& base,
                                       const InducingSet& z) {
  return neg_logdet_bounds_continuous(factorize_continuous(params, base, z));
}

RoundingBound continuous_rounding_bound(const ContinuousFactor& factor) {
  const Index m = factor.psi.rows();
  constexpr double u = std::numeric_limits<double>::epsilon();
  constexpr double c = 32.0;
  Matrix r_inv = Matrix::Identity(m, m);
  factor.lz.llt.matrixL().solveInPlace(r_inv);
  // K^-1 = R^-T R^-1 and (K + Psi)^-1 = W^T W with W = chol(I + Phi)^-1 R^-1.
  const Matrix k_inv = r_inv.transpose() * r_inv;
  Matrix w = r_inv;
  factor.i_plus_phi.matrixL().solveInPlace(w);
  const Matrix kp_inv = w.transpose() * w;
  const Matrix abs_psi = factor.psi.cwiseAbs();
  const double accum = c * u * static_cast<double>(m) * (1.0 + std::abs(factor.trace_q) + std::abs(factor.logdet_i_plus_q));
  RoundingBound out;
  out.trace = c * u * abs_psi.cwiseProduct(k_inv.cwiseAbs()).sum() + accum;
  out.logdet = c * u * abs_psi.cwiseProduct(kp_inv.cwiseAbs()).sum() + accum;
  if (!std::isfinite(out.trace) || !std::isfinite(out.logdet))
    throw NumericError("continuous_rounding_bound: non-finite estimate");
  return out;
}

namespace {

using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

struct ExtendedEval {
  bool ok = false;
  long double trace_q = 0.0L;
  long double logdet = 0.0L;      // log det(I + Phi)
  long double err_trace = 0.0L;
  long double err_logdet = 0.0L;
};

ExtendedEval extended_eval(const LMatrix& k, const LMatrix& psi, long double jitter) {
  const Index m = k.rows();
  constexpr long double u = std::numeric_limits<long double>::epsilon();
  ExtendedEval out;
  LMatrix kj = k;
  kj.diagonal().array() += jitter;
  const Eigen::LLT<LMatrix> llt(kj);
  if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().array() > 0.0L).all()) return out;
  LMatrix x = psi;
  llt.matrixL().solveInPlace(x);
  LMatrix phi = x.transpose();
  llt.matrixL().solveInPlace(phi);
  phi = (0.5L * (phi + phi.transpose())).eval();
  LMatrix ip = phi;
  ip.diagonal().array() += 1.0L;
  const Eigen::LLT<LMatrix> ip_llt(ip);
  if (ip_llt.info() != Eigen::Success) return out;
  out.trace_q = phi.trace();
  for (Index i = 0; i < m; ++i) out.logdet += 2.0L * std::log(ip_llt.matrixLLT()(i, i));

  // d tr(K^-1 Psi) = tr(K^-1 dPsi) and d logdet(I + Phi) = tr((K + Psi)^-1 dPsi),
  // with |dPsi_ij| <= c u |Psi_ij| for the closed-form entries.
  const LMatrix id = LMatrix::Identity(m, m);
  const LMatrix k_inv = llt.solve(id);
  LMatrix kp = kj + psi;
  const Eigen::LLT<LMatrix> kp_llt(kp);
  if (kp_llt.info() != Eigen::Success) return out;
  const LMatrix kp_inv = kp_llt.solve(id);
  constexpr long double c = 32.0L;
  out.err_trace = c * u * (psi.cwiseAbs().cwiseProduct(k_inv.cwiseAbs())).sum();
  out.err_logdet = c * u * (psi.cwiseAbs().cwiseProduct(kp_inv.cwiseAbs())).sum();
  // Accumulation in the traces, the Cholesky of I + Phi and the log sum.
  const long double accum = c * u * static_cast<long double>(m) * (1.0L + out.trace_q + std::abs(out.logdet));
  out.err_trace += accum;
  out.err_logdet += accum;
  out.ok = std::isfinite(static_cast<double>(out.err_trace)) && std::isfinite(static_cast<double>(out.logdet));
  return out;
}

}  // namespace

CertifiedContinuousBounds certified_neg_logdet_bounds_continuous(const KernelParams& params,
                                                                 const GaussianBaseMeasure& base,
                                                                 const InducingSet& z) {
  params.validate();
  base.validate();
  if (params.dim() != base.dim() || params.dim() != z.dim())
    throw InputError("certified bounds: dimension mismatch");
  const PointSet& zp = z.points();
  const Index m = zp.size();
  const Index dim = zp.dim();
  LMatrix k(m, m), psi(m, m);
  long double log_pre = 2.0L * std::log(static_cast<long double>(params.amplitude));
  std::vector<long double> s(static_cast<std::size_t>(dim)), cc(static_cast<std::size_t>(dim));
  for (Index d = 0; d < dim; ++d) {
    const long double l = params.lengthscales(d);
    const long double sc = base.scale(d);
    s[static_cast<std::size_t>(d)] = 1.0L / (l * l);
    cc[static_cast<std::size_t>(d)] = 2.0L * s[static_cast<std::size_t>(d)] * sc * sc + 1.0L;
    log_pre -= 0.5L * std::log(cc[static_cast<std::size_t>(d)]);
  }
  const long double pre = static_cast<long double>(base.intensity) * std::exp(log_pre);
  const long double amp = params.amplitude;
  for (Index j = 0; j < m; ++j) {
    for (Index i = j; i < m; ++i) {
      long double ek = 0.0L, ep = 0.0L;
      for (Index d = 0; d < dim; ++d) {
        const auto sd = s[static_cast<std::size_t>(d)];
        const long double diff = static_cast<long double>(zp(i, d)) - zp(j, d);
        const long double off = static_cast<long double>(base.mean(d)) - 0.5L * (static_cast<long double>(zp(i, d)) + zp(j, d));
        ek += 0.5L * sd * diff * diff;
        ep += 0.25L * sd * diff * diff + sd * off * off / cc[static_cast<std::size_t>(d)];
      }
      k(i, j) = k(j, i) = amp * std::exp(-ek);
      psi(i, j) = psi(j, i) = pre * std::exp(-ep);
    }
  }
  const long double trace_l = static_cast<long double>(params.amplitude) * base.intensity;

  // Larger jitter loosens the bound but shrinks the rounding term; stop at
  // the first jitter that no longer narrows the certified width.
  CertifiedContinuousBounds best;
  double best_width = std::numeric_limits<double>::infinity();
  long double best_upper = 0.0L, best_lower = 0.0L;
  for (double rel = z.jitter() > 0.0 ? z.jitter() : kDefaultRelativeJitter;
       rel <= kMaxRelativeJitter * (1.0 + 1e-9); rel *= 10.0) {
    const ExtendedEval e = extended_eval(k, psi, static_cast<long double>(rel) * amp);
    if (!e.ok) continue;
    const long double gap = trace_l - e.trace_q;
    const long double upper = -e.logdet + e.err_logdet;
    const long double lower = -e.logdet - e.err_logdet - gap - e.err_trace;
    const double width = static_cast<double>(upper - lower);
    if (width >= best_width) break;
    best_width = width;
    best_upper = upper;
    best_lower = lower;
    best.gap = static_cast<double>(gap);
    best.rounding = static_cast<double>(2.0L * e.err_logdet + e.err_trace);
    best.relative_jitter = rel;
    // A larger jitter can gain at most the rounding term.
    if (best.rounding <= 1e-2 * width) break;
  }
  if (!std::isfinite(best_width)) throw FactorizationError("certified bounds: L_Z is not positive definite", 0.0);
  // Rounding to double.
  const long double slack = 4.0L * std::numeric_limits<double>::epsilon() * (std::abs(best_upper) + std::abs(best_lower) + 1.0L);
  best.rounding += static_cast<double>(2.0L * slack);
  best.bounds = BoundPair::make(static_cast<double>(best_lower - slack), static_cast<double>(best_upper + slack),
                                BoundSubject::NegLogDetContinuous);
  return best;
}

Matrix pivot_inducing_items(const KernelParams& params, const PointSet& items, Index k) {
  const Index n = items.size();
  k = std::min(k, n);
  Vector resid = Vector::Constant(n, params.amplitude);
  Matrix c(n, k);
  std::vector<Index> chosen;
  for (Index s = 0; s < k; ++s) {
    Index p = 0;
    const double best = resid.maxCoeff(&p);
    if (!(best > 1e-14 * params.amplitude)) break;
    Vector col = cross_gram(params, items, items.subset({p})).col(0);
    if (s > 0) col.noalias() -= c.leftCols(s) * c.row(p).head(s).transpose();
    col /= std::sqrt(best);
    c.col(s) = col;
    resid -= col.cwiseAbs2();
    resid(p) = 0.0;
    chosen.push_back(p);
  }
  return items.subset(chosen).coords();
}

Matrix base_candidate_grid(const GaussianBaseMeasure& base, Index per_axis, double half_width) {
  if (per_axis < 1 || !(half_width > 0.0)) throw InputError("base_candidate_grid: bad grid size");
  const Index dim = base.dim();
  Index total = 1;
  for (Index d = 0; d < dim; ++d) total *= per_axis;
  Matrix out(total, dim);
  for (Index r = 0; r < total; ++r) {
    Index rest = r;
    for (Index d = 0; d < dim; ++d) {
      const Index k = rest % per_axis;
      rest /= per_axis;
      const double t = -half_width + 2.0 * half_width * (static_cast<double>(k) + 0.5) / static_cast<double>(per_axis);
      out(r, d) = base.mean(d) + base.scale(d) * t;
    }
  }
  return out;
}

Matrix extend_inducing_greedy(const KernelParams& params, const GaussianBaseMeasure& base, const Matrix& existing,
                              Index add, const Matrix& candidates, double tau) {
  params.validate();
  base.validate();
  const Index dim = params.dim();
  if (candidates.cols() != dim || (existing.rows() > 0 && existing.cols() != dim) || base.dim() != dim)
    throw InputError("extend_inducing_greedy: dimension mismatch");
  const Index g = candidates.rows();
  const Index m = existing.rows();
  const PointSet cand{candidates};
  Vector weight(g);
  for (Index i = 0; i < g; ++i) {
    double e = 0.0;
    for (Index d = 0; d < dim; ++d) {
      const double t = (candidates(i, d) - base.mean(d)) / base.scale(d);
      e += t * t;
    }
    weight(i) = std::exp(-0.5 * e);
  }
  // Columns of a partial Cholesky factor of the kernel on the candidates.
  Matrix c(g, m + add);
  if (m > 0) {
    const PointSet zs{existing};
    const JitteredCholesky lz = jittered_cholesky(gram(params, zs));
    Matrix v = cross_gram(params, zs, cand);
    lz.llt.matrixL().solveInPlace(v);
    c.leftCols(m) = v.transpose();
  }
  Vector resid = Vector::Constant(g, params.amplitude);
  if (m > 0) resid -= c.leftCols(m).rowwise().squaredNorm();
  Matrix out(m + add, dim);
  if (m > 0) out.topRows(m) = existing;
  Index k = m;
  for (; k < m + add; ++k) {
    Index best = 0;
    resid.cwiseMax(0.0).cwiseProduct(weight).maxCoeff(&best);
    if (!(resid(best) > tau * params.amplitude)) break;
    out.row(k) = candidates.row(best);
    Vector col = cross_gram(params, cand, cand.subset({best})).col(0);
    if (k > 0) col.noalias() -= c.leftCols(k) * c.row(best).head(k).transpose();
    col /= std::sqrt(resid(best));
    c.col(k) = col;
    resid -= col.cwiseAbs2();
    resid(best) = 0.0;
  }
  return out.topRows(k);
}

double bound_gap(const ContinuousFactor& factor) {
  return std::max(0.0, factor.trace_operator - factor.trace_q);
}

double bound_gap(const KernelParams& params, const GaussianBaseMeasure& base, const InducingSet& z) {
  return bound_gap(factorize_continuous(params, base, z));
}

double continuous_objective_value(const ContinuousFactor& factor, ContinuousObjective objective) {
  switch (objective) {
    case ContinuousObjective::LowerBound:
      return -factor.logdet_i_plus_q - factor.trace_operator + factor.trace_q;
    case ContinuousObjective::NegativeGap:
      return factor.trace_q - factor.trace_operator;
  }
  return 0.0;
}

ContinuousBoundGradient continuous_bound_gradient(const KernelParams& params,
                                                  const GaussianBaseMeasure& base,
                                                  const InducingSet& z,
                                                  const ContinuousFactor& factor,
                                                  ContinuousObjective objective) {
  const Index m = z.size();
  const Index dim = z.dim();
  const Matrix identity = Matrix::Identity(m, m);
  Matrix r_inv = identity;
  factor.lz.llt.matrixL().solveInPlace(r_inv);

  // The objective changes as tr(A dL_Z) + tr(B dPsi) - d tr(L); A and B are
  // assembled in whitened coordinates and mapped back with R^-1.
  Matrix inner_a, inner_b;
  if (objective == ContinuousObjective::LowerBound) {
    const Matrix ip_inv = factor.i_plus_phi.solve(identity);
    inner_b = identity - ip_inv;
    inner_a = inner_b - factor.phi;
  } else {
    inner_a = -factor.phi;
    inner_b = identity;
  }
  // R^-1 is lower triangular; triangular products halve the flop count.
  auto sandwich = [&](const Matrix& inner) {
    const Matrix right = inner * r_inv.triangularView<Eigen::Lower>();
    return Matrix(r_inv.transpose().triangularView<Eigen::Upper>() * right);
  };
  const Matrix a = sandwich(inner_a);
  const Matrix b = sandwich(inner_b);

  const PointSet& zp = z.points();
  const Matrix& l_z = factor.l_z;
  const Matrix& psi = factor.psi;

  Vector s(dim), c(dim);
  for (Index d = 0; d < dim; ++d) {
    s(d) = 1.0 / (params.lengthscales(d) * params.lengthscales(d));
    c(d) = 2.0 * s(d) * base.scale(d) * base.scale(d) + 1.0;
  }

  ContinuousBoundGradient g;
  g.z = Matrix::Zero(m, dim);
  g.log_lengthscales = Vector::Zero(dim);
  g.log_scales = Vector::Zero(dim);
  double sum_bpsi = 0.0;
  double sum_al = 0.0;
  for (Index j = 0; j < m; ++j) {
    for (Index k = 0; k < m; ++k) {
      const double al = a(k, j) * l_z(k, j);
      const double bp = b(k, j) * psi(k, j);
      sum_al += al;
      sum_bpsi += bp;
      for (Index d = 0; d < dim; ++d) {
        const double diff = zp(k, d) - zp(j, d);
        const double off = base.mean(d) - 0.5 * (zp(k, d) + zp(j, d));
        g.z(k, d) += 2.0 * (-al * diff * s(d) + bp * (-0.5 * s(d) * diff + s(d) * off / c(d)));
        const double cm1_over_c = (c(d) - 1.0) / c(d);
        g.log_lengthscales(d) += al * diff * diff * s(d) +
                                 bp * (0.5 * s(d) * diff * diff + 2.0 * s(d) * off * off / (c(d) * c(d)) +
                                       cm1_over_c);
        g.log_scales(d) += bp * (2.0 * s(d) * (c(d) - 1.0) * off * off / (c(d) * c(d)) - cm1_over_c);
      }
    }
  }
  g.log_intensity = sum_bpsi - factor.trace_operator;
  g.log_amplitude = sum_al + 2.0 * sum_bpsi - factor.trace_operator;
  return g;
}

}  // namespace dppbound
