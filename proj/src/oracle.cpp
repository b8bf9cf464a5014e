#include "dppbound/oracle.hpp"

#include <gsl/gsl_sf_dilog.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dppbound {

namespace {

constexpr double kRescale = 1e100;
const double kLogRescale = std::log(kRescale);

// Gauss-Legendre rule on [-1, 1] by Golub-Welsch.
void gauss_legendre(int order, Vector& nodes, Vector& weights) {
  Vector diag = Vector::Zero(order);
  Vector sub(order - 1);
  for (int k = 1; k < order; ++k) sub(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  nodes = es.eigenvalues();
  weights = 2.0 * es.eigenvectors().row(0).transpose().array().square();
}

double normal_pdf(double x, double mean, double sd) {
  const double t = (x - mean) / sd;
  return std::exp(-0.5 * t * t) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

KernelParams axis_kernel(const KernelParams& params, Index d) {
  return KernelParams(1.0, Vector::Constant(1, params.lengthscales(d)));
}

GaussianBaseMeasure axis_base(const GaussianBaseMeasure& base, Index d) {
  return GaussianBaseMeasure(1.0, Vector::Constant(1, base.mean(d)), Vector::Constant(1, base.scale(d)));
}

// Per-axis unit-mass spectra of a separable Gaussian-Gaussian operator.
std::vector<GGSpectrum> axis_spectra(const KernelParams& params, const GaussianBaseMeasure& base) {
  std::vector<GGSpectrum> out;
  for (Index d = 0; d < params.dim(); ++d) out.emplace_back(axis_kernel(params, d), axis_base(base, d));
  return out;
}

}  // namespace

GGSpectrum::GGSpectrum(const KernelParams& params, const GaussianBaseMeasure& base)
    : params_(params), base_(base) {
  params_.validate();
  base_.validate();
  if (params_.dim() != 1 || base_.dim() != 1) throw InputError("GGSpectrum: one-dimensional only");
  const double eps = params_.eps(0);
  alpha_ = 1.0 / (base_.scale(0) * std::numbers::sqrt2);
  const double r = 2.0 * eps / alpha_;
  beta_ = std::pow(1.0 + r * r, 0.25);
  delta2_ = 0.5 * alpha_ * alpha_ * (beta_ * beta_ - 1.0);
  const double s = alpha_ * alpha_ + delta2_ + eps * eps;
  lambda0_ = params_.amplitude * base_.intensity * alpha_ / std::sqrt(s);
  q_ = eps * eps / s;
  n_trunc_ = static_cast<Index>(std::ceil(std::log(1e-16) / std::log(q_)));
  if (q_ <= 0.0 || n_trunc_ < 1) n_trunc_ = 1;
}

double GGSpectrum::eigenvalue(Index n) const {
  return lambda0_ * std::exp(static_cast<double>(n) * std::log(q_));
}

Vector GGSpectrum::eigenvalues(Index count) const {
  Vector out(count);
  for (Index n = 0; n < count; ++n) out(n) = eigenvalue(n);
  return out;
}

double GGSpectrum::trace() const { return params_.amplitude * base_.intensity; }

Matrix GGSpectrum::eigenfunctions(Index count, const Vector& xs) const {
  Matrix out(xs.size(), count);
  const double half_log_beta = 0.5 * std::log(beta_);
  for (Index i = 0; i < xs.size(); ++i) {
    const double u = xs(i) - base_.mean(0);
    const double t = alpha_ * beta_ * u;
    const double log_damp = half_log_beta - delta2_ * u * u;
    // Normalized Hermite recurrence h_n = H_n / sqrt(2^n n!) with a running
    // exponent so that neither h_n nor the Gaussian damping overflows.
    double h_prev = 0.0;
    double h = 1.0;
    double log_scale = 0.0;
    for (Index n = 0; n < count; ++n) {
      out(i, n) = h == 0.0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(h)) + log_scale + log_damp), h);
      const double nn = static_cast<double>(n);
      const double next = std::sqrt(2.0 / (nn + 1.0)) * t * h - std::sqrt(nn / (nn + 1.0)) * h_prev;
      h_prev = h;
      h = next;
      if (std::abs(h) > kRescale) {
        h /= kRescale;
        h_prev /= kRescale;
        log_scale += kLogRescale;
      }
    }
  }
  return out;
}

double GGSpectrum::eigenfunction(Index n, double x) const {
  return eigenfunctions(n + 1, Vector::Constant(1, x))(0, n);
}

double GGSpectrum::eigen_residual(Index max_mode, Index check_points) const {
  if (lambda0_ <= 0.0) return 0.0;
  const double rho = base_.scale(0);
  const double sigma = params_.lengthscales(0);
  const double width = 0.5 * std::min(sigma, rho / std::sqrt(static_cast<double>(max_mode) + 1.0));
  const Index panels = static_cast<Index>(std::ceil(18.0 * rho / width));
  const QuadratureGrid grid = make_quadrature_grid(base_, panels);
  const Matrix phi_nodes = eigenfunctions(max_mode + 1, grid.nodes.col(0));
  const Vector xs = Vector::LinSpaced(check_points, base_.mean(0) - 3.0 * rho, base_.mean(0) + 3.0 * rho);
  const Matrix phi_check = eigenfunctions(max_mode + 1, xs);
  const Matrix kxy = cross_gram(params_, PointSet(Matrix(xs)), PointSet(grid.nodes));
  const Matrix applied = kxy * (grid.measure.asDiagonal() * phi_nodes);
  double worst = 0.0;
  for (Index n = 0; n <= max_mode; ++n) {
    const double lam = eigenvalue(n);
    for (Index i = 0; i < xs.size(); ++i)
      worst = std::max(worst, std::abs(applied(i, n) - lam * phi_check(i, n)) / lambda0_);
  }
  return worst;
}

GGSpectrum gg_eigenpairs(const KernelParams& params, const GaussianBaseMeasure& base, SpectrumCheck check) {
  GGSpectrum spectrum(params, base);
  if (check == SpectrumCheck::Verify) {
    const Index modes = std::min<Index>(5, spectrum.truncation());
    const double residual = spectrum.eigen_residual(modes);
    if (!(residual < 1e-6)) {
      std::ostringstream os;
      os << "gg_eigenpairs: closed-form spectrum fails the quadrature eigen-residual check (" << residual << ")";
      throw OracleError(os.str());
    }
  }
  return spectrum;
}

GGSpectrum gg_eigenpairs(double kappa, double alpha, double eps, SpectrumCheck check) {
  return gg_eigenpairs(KernelParams::from_eps(eps), GaussianBaseMeasure::from_alpha(kappa, alpha), check);
}

double fredholm_logdet_gg(const GGSpectrum& spectrum) {
  const double lambda0 = spectrum.lambda0();
  if (lambda0 <= 0.0) return 0.0;
  const double q = spectrum.ratio();
  const double c = -std::log(q);
  constexpr Index kExplicitTerms = 200000;
  double sum = 0.0;
  for (Index n = 0; n < kExplicitTerms; ++n) {
    const double lam = lambda0 * std::exp(-c * static_cast<double>(n));
    sum += std::log1p(lam);
    // Remaining terms are bounded by lam q / (1 - q).
    if (lam * q / -std::expm1(-c) < 1e-17 * std::max(1.0, sum)) return sum;
  }
  // Slowly decaying tail: Euler-Maclaurin with the closed-form integral
  // int_K^inf log(1 + y e^{-c (n - K)}) dn = -Li2(-y) / c.
  const double y = lambda0 * std::exp(-c * static_cast<double>(kExplicitTerms));
  const double f = std::log1p(y);
  const double df = -c * y / (1.0 + y);
  return sum - gsl_sf_dilog(-y) / c + 0.5 * f - df / 12.0;
}

QuadratureGrid make_quadrature_grid(const GaussianBaseMeasure& base, Index panels_per_dim, int order,
                                    double half_width) {
  base.validate();
  if (panels_per_dim < 1 || order < 1) throw InputError("make_quadrature_grid: need >= 1 panel and order");
  if (half_width < 8.0) throw InputError("make_quadrature_grid: box must cover at least 8 scales");
  Vector gl_x, gl_w;
  gauss_legendre(order, gl_x, gl_w);
  const Index dim = base.dim();
  const Index per_axis = panels_per_dim * order;

  std::vector<Vector> axis_nodes(dim), axis_weights(dim);
  for (Index d = 0; d < dim; ++d) {
    const double lo = base.mean(d) - half_width * base.scale(d);
    const double h = 2.0 * half_width * base.scale(d) / static_cast<double>(panels_per_dim);
    axis_nodes[d].resize(per_axis);
    axis_weights[d].resize(per_axis);
    for (Index p = 0; p < panels_per_dim; ++p) {
      const double mid = lo + (static_cast<double>(p) + 0.5) * h;
      for (int k = 0; k < order; ++k) {
        axis_nodes[d](p * order + k) = mid + 0.5 * h * gl_x(k);
        axis_weights[d](p * order + k) = 0.5 * h * gl_w(k);
      }
    }
  }

  Index total = 1;
  for (Index d = 0; d < dim; ++d) total *= per_axis;
  QuadratureGrid grid;
  grid.nodes.resize(total, dim);
  grid.weights.resize(total);
  grid.measure.resize(total);
  for (Index g = 0; g < total; ++g) {
    Index rem = g;
    double w = 1.0;
    double dens = base.intensity;
    for (Index d = 0; d < dim; ++d) {
      const Index i = rem % per_axis;
      rem /= per_axis;
      grid.nodes(g, d) = axis_nodes[d](i);
      w *= axis_weights[d](i);
      dens *= normal_pdf(axis_nodes[d](i), base.mean(d), base.scale(d));
    }
    grid.weights(g) = w;
    grid.measure(g) = w * dens;
  }
  return grid;
}

namespace {

Vector nystrom_eigenvalues(const KernelParams& params, const QuadratureGrid& grid) {
  const Vector sqrt_w = grid.measure.cwiseMax(0.0).cwiseSqrt();
  const PointSet nodes(grid.nodes);
  const Matrix m = sqrt_w.asDiagonal() * gram(params, nodes) * sqrt_w.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw OracleError("fredholm_logdet_quadrature: eigensolver failed");
  return es.eigenvalues().cwiseMax(0.0);
}

double tensor_logdet(double scale, const std::vector<Vector>& axis_eigs) {
  if (axis_eigs.size() == 1) {
    double s = 0.0;
    for (Index i = 0; i < axis_eigs[0].size(); ++i) s += std::log1p(scale * axis_eigs[0](i));
    return s;
  }
  double s = 0.0;
  const Vector& head = axis_eigs[0];
  const std::vector<Vector> rest(axis_eigs.begin() + 1, axis_eigs.end());
  for (Index i = 0; i < head.size(); ++i) {
    if (scale * head(i) < 1e-300) continue;
    s += tensor_logdet(scale * head(i), rest);
  }
  return s;
}

}  // namespace

double fredholm_logdet_quadrature(const KernelParams& params, const GaussianBaseMeasure& base,
                                  const QuadratureGrid& grid) {
  if (params.dim() != 1 || base.dim() != 1 || grid.nodes.cols() != 1)
    throw InputError("fredholm_logdet_quadrature: dense grid form is one-dimensional");
  if (base.intensity == 0.0) return 0.0;
  const Vector eigs = nystrom_eigenvalues(params, grid);
  double s = 0.0;
  for (Index i = 0; i < eigs.size(); ++i) s += std::log1p(eigs(i));
  return s;
}

FredholmQuadratureResult fredholm_logdet_quadrature(const KernelParams& params,
                                                    const GaussianBaseMeasure& base, double tol,
                                                    Index max_panels) {
  params.validate();
  base.validate();
  if (params.dim() != base.dim()) throw InputError("fredholm_logdet_quadrature: dimension mismatch");
  FredholmQuadratureResult out;
  const double scale = params.amplitude * base.intensity;
  if (scale == 0.0) return out;
  const Index dim = params.dim();

  auto evaluate = [&](double refine) {
    std::vector<Vector> eigs;
    for (Index d = 0; d < dim; ++d) {
      const double rho = base.scale(d);
      const double width = 1.5 * std::min(rho, params.lengthscales(d));
      const Index panels = static_cast<Index>(std::ceil(refine * 18.0 * rho / width));
      if (panels > max_panels) throw OracleError("fredholm_logdet_quadrature: grid refinement limit reached");
      out.panels = panels;
      eigs.push_back(nystrom_eigenvalues(axis_kernel(params, d), make_quadrature_grid(axis_base(base, d), panels)));
    }
    return tensor_logdet(scale, eigs);
  };

  double refine = 1.0;
  double prev = evaluate(refine);
  for (;;) {
    refine *= 2.0;
    const double cur = evaluate(refine);
    if (std::abs(cur - prev) < tol) {
      out.logdet = cur;
      out.previous = prev;
      return out;
    }
    prev = cur;
  }
}

double expected_count_gg(const KernelParams& params, const GaussianBaseMeasure& base) {
  const auto spectra = axis_spectra(params, base);
  const double scale = params.amplitude * base.intensity;
  if (scale == 0.0) return 0.0;
  double total = 0.0;
  if (spectra.size() == 1) {
    for (Index n = 0;; ++n) {
      const double lam = scale * spectra[0].eigenvalue(n);
      total += lam / (1.0 + lam);
      if (lam < 1e-18 || n > 10000000) break;
    }
    return total;
  }
  if (spectra.size() != 2) throw InputError("expected_count_gg: dimension must be 1 or 2");
  for (Index a = 0;; ++a) {
    const double la = scale * spectra[0].eigenvalue(a);
    if (la < 1e-18) break;
    for (Index b = 0;; ++b) {
      const double lam = la * spectra[1].eigenvalue(b);
      if (lam < 1e-18) break;
      total += lam / (1.0 + lam);
    }
  }
  return total;
}

double intensity_gg(const GGSpectrum& spectrum, double x) {
  const Index count = std::min<Index>(spectrum.truncation(), 4000);
  const Matrix phi = spectrum.eigenfunctions(count, Vector::Constant(1, x));
  double k = 0.0;
  for (Index n = 0; n < count; ++n) {
    const double lam = spectrum.eigenvalue(n);
    k += lam / (1.0 + lam) * phi(0, n) * phi(0, n);
  }
  return k * normal_pdf(x, spectrum.base().mean(0), spectrum.base().scale(0));
}

PointSet sample_dpp_continuous_gg(const KernelParams& params, const GaussianBaseMeasure& base, Rng& rng,
                                  Index nodes_per_dim) {
  params.validate();
  base.validate();
  const Index dim = params.dim();
  if (dim != base.dim()) throw InputError("sample_dpp_continuous_gg: dimension mismatch");
  if (dim > 2) throw InputError("sample_dpp_continuous_gg: dimension must be 1 or 2");
  if (nodes_per_dim < 16) throw InputError("sample_dpp_continuous_gg: grid too coarse");
  const auto spectra = axis_spectra(params, base);
  const double scale = params.amplitude * base.intensity;

  // Stage 1: independent Bernoulli selection of eigenfunctions.
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::array<Index, 2>> selected;
  if (scale > 0.0) {
    constexpr double kNegligible = 1e-14;
    if (dim == 1) {
      for (Index n = 0;; ++n) {
        const double lam = scale * spectra[0].eigenvalue(n);
        if (lam < kNegligible) break;
        if (unif(rng) < lam / (1.0 + lam)) selected.push_back({n, 0});
      }
    } else {
      for (Index a = 0;; ++a) {
        const double la = scale * spectra[0].eigenvalue(a);
        if (la < kNegligible) break;
        for (Index b = 0;; ++b) {
          const double lam = la * spectra[1].eigenvalue(b);
          if (lam < kNegligible) break;
          if (unif(rng) < lam / (1.0 + lam)) selected.push_back({a, b});
        }
      }
    }
  }
  const Index k = static_cast<Index>(selected.size());
  PointSet out(dim);
  if (k == 0) return out;

  // Stage 2: sequential sampling of the projection DPP on a cell-centered grid.
  std::array<Index, 2> max_order{0, 0};
  for (const auto& s : selected)
    for (Index d = 0; d < dim; ++d) max_order[d] = std::max(max_order[d], s[d]);

  std::vector<Vector> centers(dim);
  std::vector<double> widths(dim);
  std::vector<Matrix> axis_phi(dim);
  std::vector<Vector> axis_mass(dim);
  for (Index d = 0; d < dim; ++d) {
    const double lo = base.mean(d) - 8.0 * base.scale(d);
    widths[d] = 16.0 * base.scale(d) / static_cast<double>(nodes_per_dim);
    centers[d] = Vector::LinSpaced(nodes_per_dim, lo + 0.5 * widths[d], lo + 16.0 * base.scale(d) - 0.5 * widths[d]);
    axis_phi[d] = spectra[d].eigenfunctions(max_order[d] + 1, centers[d]);
    axis_mass[d].resize(nodes_per_dim);
    for (Index i = 0; i < nodes_per_dim; ++i)
      axis_mass[d](i) = normal_pdf(centers[d](i), base.mean(d), base.scale(d)) * widths[d];
  }
  const Index grid_size = dim == 1 ? nodes_per_dim : nodes_per_dim * nodes_per_dim;
  Matrix phi(grid_size, k);
  Vector mass(grid_size);
  for (Index g = 0; g < grid_size; ++g) {
    const Index i0 = g % nodes_per_dim;
    const Index i1 = g / nodes_per_dim;
    mass(g) = axis_mass[0](i0) * (dim == 2 ? axis_mass[1](i1) : 1.0);
    for (Index j = 0; j < k; ++j)
      phi(g, j) = axis_phi[0](i0, selected[j][0]) * (dim == 2 ? axis_phi[1](i1, selected[j][1]) : 1.0);
  }

  auto exact_row = [&](const Vector& x) {
    std::vector<Matrix> vals(dim);
    for (Index d = 0; d < dim; ++d) vals[d] = spectra[d].eigenfunctions(max_order[d] + 1, Vector::Constant(1, x(d)));
    Vector f(k);
    for (Index j = 0; j < k; ++j) f(j) = vals[0](0, selected[j][0]) * (dim == 2 ? vals[1](0, selected[j][1]) : 1.0);
    return f;
  };

  Vector residual = phi.rowwise().squaredNorm();
  Matrix coeff_grid(grid_size, k);   // coefficients of grid nodes on the chosen directions
  Matrix sample_f(k, k);             // exact eigenfunction values of sampled points (columns)
  Matrix sample_coeff = Matrix::Zero(k, k);
  Vector sample_resid(k);
  std::vector<double> cdf(static_cast<std::size_t>(grid_size));

  for (Index step = 0; step < k; ++step) {
    double total = 0.0;
    for (Index g = 0; g < grid_size; ++g) {
      total += std::max(residual(g), 0.0) * mass(g);
      cdf[static_cast<std::size_t>(g)] = total;
    }
    if (!(total > 0.0)) throw OracleError("sample_dpp_continuous_gg: residual density vanished");

    Vector x(dim), f, c(step);
    double r_x = 0.0;
    bool accepted = false;
    for (int attempt = 0; attempt < 100 && !accepted; ++attempt) {
      const double target = unif(rng) * total;
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
      const Index g = std::min<Index>(static_cast<Index>(it - cdf.begin()), grid_size - 1);
      const Index idx[2] = {g % nodes_per_dim, g / nodes_per_dim};
      for (Index d = 0; d < dim; ++d) x(d) = centers[d](idx[d]) + (unif(rng) - 0.5) * widths[d];
      f = exact_row(x);
      for (Index l = 0; l < step; ++l) {
        double v = f.dot(sample_f.col(l));
        for (Index l2 = 0; l2 < l; ++l2) v -= c(l2) * sample_coeff(l, l2);
        c(l) = v / std::sqrt(sample_resid(l));
      }
      r_x = f.squaredNorm() - c.squaredNorm();
      accepted = r_x > 1e-10 * std::max(1.0, f.squaredNorm());
    }
    if (!accepted) throw OracleError("sample_dpp_continuous_gg: could not find a point with positive residual");

    sample_f.col(step) = f;
    sample_coeff.row(step).head(step) = c.transpose();
    sample_resid(step) = r_x;
    Vector col = phi * f;
    if (step > 0) col.noalias() -= coeff_grid.leftCols(step) * c;
    col /= std::sqrt(r_x);
    coeff_grid.col(step) = col;
    residual -= col.cwiseAbs2();
    out.append(x);
  }
  return out;
}

PointSet sample_dpp_continuous_gg(const GGSpectrum& spectrum, Rng& rng, Index nodes) {
  return sample_dpp_continuous_gg(spectrum.params(), spectrum.base(), rng, nodes);
}

FiniteDppSampler::FiniteDppSampler(const Matrix& l) {
  if (l.rows() != l.cols()) throw InputError("FiniteDppSampler: L must be square");
  if (!l.allFinite()) throw InputError("FiniteDppSampler: non-finite L");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (l + l.transpose()));
  if (es.info() != Eigen::Success) throw OracleError("FiniteDppSampler: eigensolver failed");
  eigenvalues_ = es.eigenvalues().cwiseMax(0.0);
  eigenvectors_ = es.eigenvectors();
}

FinitePattern FiniteDppSampler::draw(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Index> chosen;
  for (Index j = 0; j < eigenvalues_.size(); ++j)
    if (unif(rng) < eigenvalues_(j) / (1.0 + eigenvalues_(j))) chosen.push_back(j);
  const Index k = static_cast<Index>(chosen.size());
  if (k == 0) return FinitePattern{};
  const Index n = eigenvectors_.rows();
  Matrix v(n, k);
  for (Index j = 0; j < k; ++j) v.col(j) = eigenvectors_.col(chosen[j]);

  Vector residual = v.rowwise().squaredNorm();
  Matrix coeff(n, k);
  std::vector<Index> items;
  for (Index step = 0; step < k; ++step) {
    const double total = residual.cwiseMax(0.0).sum();
    double target = unif(rng) * total;
    Index pick = n - 1;
    for (Index i = 0; i < n; ++i) {
      target -= std::max(residual(i), 0.0);
      if (target < 0.0) {
        pick = i;
        break;
      }
    }
    while (residual(pick) <= 0.0 && pick > 0) --pick;
    Vector col = v * v.row(pick).transpose();
    if (step > 0) col.noalias() -= coeff.leftCols(step) * coeff.row(pick).head(step).transpose();
    col /= std::sqrt(residual(pick));
    coeff.col(step) = col;
    residual -= col.cwiseAbs2();
    residual(pick) = 0.0;
    items.push_back(pick);
  }
  return FinitePattern(std::move(items));
}

FinitePattern sample_dpp_finite(const Matrix& l, Rng& rng) { return FiniteDppSampler(l).draw(rng); }

double exact_loglik_gg(const KernelParams& params, const GaussianBaseMeasure& base,
                       const ContinuousDataset& data) {
  if (data.dim != 1) throw InputError("exact_loglik_gg: one-dimensional data only");
  const GGSpectrum spectrum(params, base);
  const double data_term = continuous_data_term(params, base, data);
  return std::max(data_term - static_cast<double>(data.num_patterns()) * fredholm_logdet_gg(spectrum), kLogZero);
}

double exact_loglik_gg(double kappa, double alpha, double eps, const ContinuousDataset& data) {
  return exact_loglik_gg(KernelParams::from_eps(eps), GaussianBaseMeasure::from_alpha(kappa, alpha), data);
}

}  // namespace dppbound
