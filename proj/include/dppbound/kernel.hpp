#pragma once

#include "dppbound/types.hpp"

namespace dppbound {

/// Squared-exponential L kernel
///   L(x, y) = amplitude * exp(-sum_d (x_d - y_d)^2 / (2 sigma_d^2)).
///
/// Per-dimension lengthscales are the canonical form. The isotropic
/// L(x, y) = exp(-eps^2 |x - y|^2) form maps to amplitude 1 and
/// sigma_d = 1 / (eps sqrt 2).
struct KernelParams {
  double amplitude = 1.0;
  Vector lengthscales = Vector::Ones(1);

  KernelParams() = default;
  KernelParams(double amplitude_, Vector lengthscales_);

  static KernelParams from_eps(double eps, Index dim = 1);

  Index dim() const { return lengthscales.size(); }
  /// eps of dimension d, i.e. 1 / (sigma_d sqrt 2).
  double eps(Index d = 0) const;
  void validate() const;
};

/// Base measure with density intensity * prod_d Normal(x_d | mean_d, scale_d^2).
struct GaussianBaseMeasure {
  double intensity = 1.0;
  Vector mean = Vector::Zero(1);
  Vector scale = Vector::Ones(1);

  GaussianBaseMeasure() = default;
  GaussianBaseMeasure(double intensity_, Vector mean_, Vector scale_);

  /// 1D measure kappa * Normal(0, (2 alpha)^-2), with (2 alpha)^-2 read as the variance.
  static GaussianBaseMeasure from_alpha(double kappa, double alpha);

  Index dim() const { return mean.size(); }
  double alpha() const;
  void validate(bool allow_zero_intensity = true) const;
};

double eval_kernel(const KernelParams& params, const Vector& x, const Vector& y);

Matrix gram(const KernelParams& params, const PointSet& x);

/// |X| x |Z| matrix with entries L(x_i, z_j).
Matrix cross_gram(const KernelParams& params, const PointSet& x, const PointSet& z);

/// Psi_ij = int L(z_i, x) L(x, z_j) dmu(x), closed form for the
/// Gaussian kernel against a Gaussian base measure.
Matrix psi_matrix(const KernelParams& params, const GaussianBaseMeasure& base,
                  const PointSet& z);

/// tr of the integral operator: int L(x, x) dmu(x) = amplitude * intensity.
double trace_operator(const KernelParams& params, const GaussianBaseMeasure& base);

double base_log_density(const GaussianBaseMeasure& base, const Vector& x);

/// Sum of base_log_density over the rows of a point set.
double base_log_density_sum(const GaussianBaseMeasure& base, const PointSet& x);

}  // namespace dppbound
