#include "dppbound/kernel.hpp"

#include <cmath>
#include <numbers>

namespace dppbound {

namespace {

void check_dim(Index expected, Index got, const char* what) {
  if (expected != got)
    throw InputError(std::string(what) + ": dimension mismatch (expected " +
                     std::to_string(expected) + ", got " + std::to_string(got) + ")");
}

}  // namespace

KernelParams::KernelParams(double amplitude_, Vector lengthscales_)
    : amplitude(amplitude_), lengthscales(std::move(lengthscales_)) {
  validate();
}

KernelParams KernelParams::from_eps(double eps, Index dim) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InputError("KernelParams: eps must be positive");
  return KernelParams(1.0, Vector::Constant(dim, 1.0 / (eps * std::numbers::sqrt2)));
}

double KernelParams::eps(Index d) const { return 1.0 / (lengthscales(d) * std::numbers::sqrt2); }

void KernelParams::validate() const {
  if (lengthscales.size() < 1) throw InputError("KernelParams: dim must be >= 1");
  if (!(amplitude > 0.0) || !std::isfinite(amplitude))
    throw InputError("KernelParams: amplitude must be positive and finite");
  for (Index d = 0; d < lengthscales.size(); ++d)
    if (!(lengthscales(d) > 0.0) || !std::isfinite(lengthscales(d)))
      throw InputError("KernelParams: lengthscales must be positive and finite");
}

GaussianBaseMeasure::GaussianBaseMeasure(double intensity_, Vector mean_, Vector scale_)
    : intensity(intensity_), mean(std::move(mean_)), scale(std::move(scale_)) {
  validate();
}

GaussianBaseMeasure GaussianBaseMeasure::from_alpha(double kappa, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InputError("GaussianBaseMeasure: alpha must be positive");
  return GaussianBaseMeasure(kappa, Vector::Zero(1), Vector::Constant(1, 0.5 / alpha));
}

double GaussianBaseMeasure::alpha() const { return 0.5 / scale(0); }

void GaussianBaseMeasure::validate(bool allow_zero_intensity) const {
  if (mean.size() < 1) throw InputError("GaussianBaseMeasure: dim must be >= 1");
  check_dim(mean.size(), scale.size(), "GaussianBaseMeasure");
  const bool ok = allow_zero_intensity ? intensity >= 0.0 : intensity > 0.0;
  if (!ok || !std::isfinite(intensity))
    throw InputError("GaussianBaseMeasure: intensity must be positive and finite");
  for (Index d = 0; d < scale.size(); ++d) {
    if (!(scale(d) > 0.0) || !std::isfinite(scale(d)))
      throw InputError("GaussianBaseMeasure: scales must be positive and finite");
    if (!std::isfinite(mean(d))) throw InputError("GaussianBaseMeasure: means must be finite");
  }
}

double eval_kernel(const KernelParams& params, const Vector& x, const Vector& y) {
  check_dim(params.dim(), x.size(), "eval_kernel");
  check_dim(params.dim(), y.size(), "eval_kernel");
  double e = 0.0;
  for (Index d = 0; d < params.dim(); ++d) {
    const double t = (x(d) - y(d)) / params.lengthscales(d);
    e += t * t;
  }
  return params.amplitude * std::exp(-0.5 * e);
}

Matrix cross_gram(const KernelParams& params, const PointSet& x, const PointSet& z) {
  check_dim(params.dim(), x.dim(), "cross_gram");
  check_dim(params.dim(), z.dim(), "cross_gram");
  const Index n = x.size();
  const Index m = z.size();
  const Index dim = params.dim();
  const Vector inv = params.lengthscales.cwiseInverse();
  // Scaled coordinates, so each entry is exp(-|u_i - v_j|^2 / 2).
  const Matrix u = x.coords() * inv.asDiagonal();
  const Matrix v = z.coords() * inv.asDiagonal();
  Matrix out(n, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) {
      double e = 0.0;
      for (Index d = 0; d < dim; ++d) {
        const double t = u(i, d) - v(j, d);
        e += t * t;
      }
      out(i, j) = params.amplitude * std::exp(-0.5 * e);
    }
  }
  return out;
}

Matrix gram(const KernelParams& params, const PointSet& x) {
  check_dim(params.dim(), x.dim(), "gram");
  const Index n = x.size();
  const Vector inv = params.lengthscales.cwiseInverse();
  const Matrix u = x.coords() * inv.asDiagonal();
  Matrix out(n, n);
  for (Index j = 0; j < n; ++j) {
    out(j, j) = params.amplitude;
    for (Index i = j + 1; i < n; ++i) {
      const double e = (u.row(i) - u.row(j)).squaredNorm();
      out(i, j) = out(j, i) = params.amplitude * std::exp(-0.5 * e);
    }
  }
  return out;
}

Matrix psi_matrix(const KernelParams& params, const GaussianBaseMeasure& base, const PointSet& z) {
  check_dim(params.dim(), base.dim(), "psi_matrix");
  check_dim(params.dim(), z.dim(), "psi_matrix");
  const Index m = z.size();
  const Index dim = params.dim();
  Vector s(dim), c(dim);
  double log_prefactor = std::log(params.amplitude) * 2.0;
  for (Index d = 0; d < dim; ++d) {
    s(d) = 1.0 / (params.lengthscales(d) * params.lengthscales(d));
    c(d) = 2.0 * s(d) * base.scale(d) * base.scale(d) + 1.0;
    log_prefactor -= 0.5 * std::log(c(d));
  }
  const double prefactor = base.intensity * std::exp(log_prefactor);
  Matrix out(m, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = j; i < m; ++i) {
      double e = 0.0;
      for (Index d = 0; d < dim; ++d) {
        const double diff = z(i, d) - z(j, d);
        const double off = base.mean(d) - 0.5 * (z(i, d) + z(j, d));
        e += 0.25 * s(d) * diff * diff + s(d) * off * off / c(d);
      }
      out(i, j) = out(j, i) = prefactor * std::exp(-e);
    }
  }
  if (!out.allFinite()) throw NumericError("psi_matrix: non-finite entry");
  return out;
}

double trace_operator(const KernelParams& params, const GaussianBaseMeasure& base) {
  return params.amplitude * base.intensity;
}

double base_log_density(const GaussianBaseMeasure& base, const Vector& x) {
  check_dim(base.dim(), x.size(), "base_log_density");
  constexpr double kHalfLog2Pi = 0.91893853320467274178;
  double out = std::log(base.intensity);
  for (Index d = 0; d < base.dim(); ++d) {
    const double t = (x(d) - base.mean(d)) / base.scale(d);
    out += -0.5 * t * t - std::log(base.scale(d)) - kHalfLog2Pi;
  }
  return out;
}

double base_log_density_sum(const GaussianBaseMeasure& base, const PointSet& x) {
  double out = 0.0;
  for (Index i = 0; i < x.size(); ++i) out += base_log_density(base, x.point(i));
  return out;
}

}  // namespace dppbound
