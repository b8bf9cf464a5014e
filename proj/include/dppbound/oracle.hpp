#pragma once

#include <vector>

#include "dppbound/kernel.hpp"
#include "dppbound/likelihood.hpp"
#include "dppbound/random.hpp"
#include "dppbound/types.hpp"

namespace dppbound {

/// Raised when a ground-truth construction fails its own self-check.
class OracleError : public NumericError {
 public:
  using NumericError::NumericError;
};

enum class SpectrumCheck { Verify, Skip };

/// Spectrum of the integral operator of a 1D Gaussian kernel against a
/// Gaussian base measure. Eigenvalues form a geometric sequence
/// lambda_n = lambda_0 q^n; eigenfunctions are damped Hermite polynomials,
/// orthonormal under the normalized base measure.
class GGSpectrum {
 public:
  GGSpectrum(const KernelParams& params, const GaussianBaseMeasure& base);

  const KernelParams& params() const { return params_; }
  const GaussianBaseMeasure& base() const { return base_; }

  double lambda0() const { return lambda0_; }
  double ratio() const { return q_; }
  double eigenvalue(Index n) const;
  Vector eigenvalues(Index count) const;
  /// First n with lambda_n < 1e-16 lambda_0.
  Index truncation() const { return n_trunc_; }
  /// Sum of all eigenvalues, amplitude * intensity.
  double trace() const;

  double eigenfunction(Index n, double x) const;
  /// values(i, n) = phi_n(xs(i)) for n < count.
  Matrix eigenfunctions(Index count, const Vector& xs) const;

  /// max over check points of |int L(x, y) phi_n(y) dmu(y) - lambda_n phi_n(x)| / lambda_0.
  double eigen_residual(Index max_mode, Index check_points = 41) const;

 private:
  KernelParams params_;
  GaussianBaseMeasure base_;
  double alpha_ = 0.0;  ///< 1 / (rho sqrt 2)
  double beta_ = 0.0;
  double delta2_ = 0.0;
  double lambda0_ = 0.0;
  double q_ = 0.0;
  Index n_trunc_ = 0;
};

/// Spectrum for L(x, y) = exp(-eps^2 (x - y)^2) against kappa Normal(0, (2 alpha)^-2).
GGSpectrum gg_eigenpairs(double kappa, double alpha, double eps,
                         SpectrumCheck check = SpectrumCheck::Verify);
GGSpectrum gg_eigenpairs(const KernelParams& params, const GaussianBaseMeasure& base,
                         SpectrumCheck check = SpectrumCheck::Verify);

/// log det(I + L) = sum_n log(1 + lambda_n), the log of the q-Pochhammer
/// product (-lambda_0; q)_inf.
double fredholm_logdet_gg(const GGSpectrum& spectrum);

/// Composite Gauss-Legendre rule on the box mean +- half_width * scale.
struct QuadratureGrid {
  Matrix nodes;          ///< G x dim
  Vector weights;        ///< Lebesgue weights
  Vector measure;        ///< weights times base density (mass of each node under mu)
};

QuadratureGrid make_quadrature_grid(const GaussianBaseMeasure& base, Index panels_per_dim,
                                    int order = 8, double half_width = 9.0);

/// log det(I + W^1/2 L W^1/2) on a 1D grid.
double fredholm_logdet_quadrature(const KernelParams& params, const GaussianBaseMeasure& base,
                                  const QuadratureGrid& grid);

struct FredholmQuadratureResult {
  double logdet = 0.0;
  double previous = 0.0;   ///< value at half the panels
  Index panels = 0;        ///< per dimension, final grid
};

/// Doubles the panel count until consecutive grids agree to tol. Works in
/// any dimension by tensorizing per-dimension spectra.
FredholmQuadratureResult fredholm_logdet_quadrature(const KernelParams& params,
                                                    const GaussianBaseMeasure& base,
                                                    double tol = 1e-8, Index max_panels = 1024);

/// Exact HKPV draw for a separable Gaussian-Gaussian DPP in 1 or 2
/// dimensions. Sequential steps use a cell-centered grid of nodes_per_dim
/// nodes per axis over mean +- 8 scale.
PointSet sample_dpp_continuous_gg(const KernelParams& params, const GaussianBaseMeasure& base, Rng& rng,
                                  Index nodes_per_dim = 4096);
PointSet sample_dpp_continuous_gg(const GGSpectrum& spectrum, Rng& rng, Index nodes = 4096);

/// Expected number of points, sum_n lambda_n / (1 + lambda_n), for the
/// separable product spectrum.
double expected_count_gg(const KernelParams& params, const GaussianBaseMeasure& base);

/// First-order intensity K(x, x) mu'(x) of a 1D Gaussian-Gaussian DPP.
double intensity_gg(const GGSpectrum& spectrum, double x);

/// HKPV sampler for a finite L-ensemble. The eigendecomposition is computed
/// once and reused across draws.
class FiniteDppSampler {
 public:
  explicit FiniteDppSampler(const Matrix& l);
  FinitePattern draw(Rng& rng) const;
  const Vector& eigenvalues() const { return eigenvalues_; }

 private:
  Vector eigenvalues_;
  Matrix eigenvectors_;
};

FinitePattern sample_dpp_finite(const Matrix& l, Rng& rng);

/// Exact continuous log-likelihood through the closed-form spectrum (1D only).
double exact_loglik_gg(const KernelParams& params, const GaussianBaseMeasure& base,
                       const ContinuousDataset& data);
double exact_loglik_gg(double kappa, double alpha, double eps, const ContinuousDataset& data);

}  // namespace dppbound
