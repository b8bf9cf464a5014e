#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "dppbound/kernel.hpp"
#include "dppbound/random.hpp"

using namespace dppbound;

namespace {

double integrate_line(const std::function<double(double)>& f) {
  const double inf = std::numeric_limits<double>::infinity();
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -inf, inf, 15, 1e-13);
}

double normal_pdf(double x, double m, double s) {
  const double t = (x - m) / s;
  return std::exp(-0.5 * t * t) / (s * std::sqrt(2.0 * std::numbers::pi));
}

PointSet random_points(Rng& rng, Index n, Index dim, double spread = 1.0) {
  std::normal_distribution<double> g(0.0, spread);
  Matrix c(n, dim);
  for (Index i = 0; i < n; ++i)
    for (Index d = 0; d < dim; ++d) c(i, d) = g(rng);
  return PointSet(c);
}

}  // namespace

TEST_CASE("eval_kernel direct values") {
  KernelParams p(1.0, Vector::Constant(1, 0.7));
  Vector x(1), y(1);
  x << 0.3;
  CHECK(eval_kernel(p, x, x) == doctest::Approx(1.0));

  const KernelParams e = KernelParams::from_eps(1.0);
  x << 0.0;
  y << 1.0;
  CHECK(eval_kernel(e, x, y) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

  Vector s(2);
  s << 1.0, 2.0;
  KernelParams p2(2.0, s);
  Vector a = Vector::Zero(2), b(2);
  b << 1.0, 2.0;
  CHECK(eval_kernel(p2, a, b) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));

  Vector bad(2);
  CHECK_THROWS_AS(eval_kernel(e, x, bad), InputError);
}

TEST_CASE("gram and cross_gram") {
  const KernelParams e = KernelParams::from_eps(1.0);
  CHECK(gram(e, PointSet(1)).rows() == 0);

  const PointSet two{{0.0}, {1.0}};
  const Matrix g = gram(e, two);
  CHECK(g(0, 0) == doctest::Approx(1.0));
  CHECK(g(0, 1) == doctest::Approx(std::exp(-1.0)));
  CHECK(g(1, 0) == doctest::Approx(std::exp(-1.0)));

  Rng rng = make_stream(3, "kernel");
  Vector s(2);
  s << 0.4, 0.9;
  KernelParams p(1.7, s);
  const PointSet x = random_points(rng, 20, 2);
  const Eigen::SelfAdjointEigenSolver<Matrix> es(gram(p, x));
  CHECK(es.eigenvalues().minCoeff() >= -1e-10 * p.amplitude);

  CHECK((cross_gram(p, x, x) - gram(p, x)).cwiseAbs().maxCoeff() == 0.0);
  const PointSet x3 = random_points(rng, 3, 2), z2 = random_points(rng, 2, 2);
  const Matrix c = cross_gram(p, x3, z2);
  CHECK(c.rows() == 3);
  CHECK(c.cols() == 2);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 2; ++j) CHECK(c(i, j) == doctest::Approx(eval_kernel(p, x3.point(i), z2.point(j))).epsilon(1e-13));
}

TEST_CASE("psi matches quadrature") {
  GaussianBaseMeasure unit(1.0, Vector::Zero(1), Vector::Ones(1));
  KernelParams p(1.0, Vector::Ones(1));
  const PointSet z0{{0.0}};
  CHECK(psi_matrix(p, unit, z0)(0, 0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));

  Rng rng = make_stream(5, "psi1d");
  std::uniform_real_distribution<double> u(0.3, 2.0);
  for (int rep = 0; rep < 10; ++rep) {
    KernelParams k(u(rng), Vector::Constant(1, u(rng)));
    GaussianBaseMeasure b(u(rng), Vector::Constant(1, u(rng) - 1.0), Vector::Constant(1, u(rng)));
    const PointSet z = random_points(rng, 2, 1);
    const Matrix psi = psi_matrix(k, b, z);
    const double zi = z(0, 0), zj = z(1, 0);
    const double ref = integrate_line([&](double x) {
      Vector xv(1), a(1), c(1);
      xv << x;
      a << zi;
      c << zj;
      return eval_kernel(k, a, xv) * eval_kernel(k, xv, c) * b.intensity * normal_pdf(x, b.mean(0), b.scale(0));
    });
    CHECK(psi(0, 1) == doctest::Approx(ref).epsilon(1e-10));
    CHECK(psi(1, 0) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("psi in two dimensions matches tensor quadrature") {
  Vector s(2), m(2), r(2);
  s << 0.6, 1.3;
  m << 0.2, -0.4;
  r << 1.1, 0.7;
  KernelParams k(1.4, s);
  GaussianBaseMeasure b(2.5, m, r);
  const PointSet z{{0.1, 0.5}, {-0.8, 0.3}};
  const Matrix psi = psi_matrix(k, b, z);
  // Gaussian kernel and measure factor over dimensions.
  double ref = k.amplitude * k.amplitude * b.intensity;
  for (Index d = 0; d < 2; ++d) {
    ref *= integrate_line([&](double x) {
      const double a = (z(0, d) - x) / s(d), c = (x - z(1, d)) / s(d);
      return std::exp(-0.5 * (a * a + c * c)) * normal_pdf(x, m(d), r(d));
    });
  }
  CHECK(psi(0, 1) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("psi is linear in the intensity") {
  KernelParams k(1.0, Vector::Constant(1, 0.5));
  const PointSet z{{0.0}, {0.4}, {-1.0}};
  GaussianBaseMeasure b1(1.0, Vector::Zero(1), Vector::Ones(1));
  GaussianBaseMeasure b7(7.0, Vector::Zero(1), Vector::Ones(1));
  CHECK((psi_matrix(k, b7, z) - 7.0 * psi_matrix(k, b1, z)).cwiseAbs().maxCoeff() < 1e-14);
  GaussianBaseMeasure b0(0.0, Vector::Zero(1), Vector::Ones(1));
  CHECK(psi_matrix(k, b0, z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trace_operator") {
  GaussianBaseMeasure b(1000.0, Vector::Zero(1), Vector::Ones(1));
  CHECK(trace_operator(KernelParams(1.0, Vector::Ones(1)), b) == doctest::Approx(1000.0));
  b.intensity = 3.0;
  CHECK(trace_operator(KernelParams(2.0, Vector::Ones(1)), b) == doctest::Approx(6.0));
  b.intensity = 0.0;
  CHECK(trace_operator(KernelParams(2.0, Vector::Ones(1)), b) == 0.0);
}

TEST_CASE("base log density") {
  GaussianBaseMeasure b(1.0, Vector::Zero(1), Vector::Ones(1));
  Vector x = Vector::Zero(1);
  const double c = -0.5 * std::log(2.0 * std::numbers::pi);
  CHECK(base_log_density(b, x) == doctest::Approx(c));
  b.intensity = std::exp(1.0);
  CHECK(base_log_density(b, x) == doctest::Approx(1.0 + c));

  Vector m(2), s(2), y(2);
  m << 0.5, -1.0;
  s << 2.0, 0.5;
  y << 0.1, 0.2;
  GaussianBaseMeasure b2(1.0, m, s);
  const double sum = std::log(normal_pdf(0.1, 0.5, 2.0)) + std::log(normal_pdf(0.2, -1.0, 0.5));
  CHECK(base_log_density(b2, y) == doctest::Approx(sum).epsilon(1e-13));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(KernelParams(1.0, Vector::Constant(1, -1.0)).validate(), InputError);
  CHECK_THROWS_AS(KernelParams(0.0, Vector::Ones(1)).validate(), InputError);
  CHECK_THROWS_AS(GaussianBaseMeasure(-1.0, Vector::Zero(1), Vector::Ones(1)).validate(), InputError);
  const KernelParams e = KernelParams::from_eps(2.0);
  CHECK(e.lengthscales(0) == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))));
  CHECK(e.eps() == doctest::Approx(2.0));
}
