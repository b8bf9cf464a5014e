#include <cmath>

#include "doctest.h"
#include "dppbound/optimize.hpp"

using namespace dppbound;

namespace {

double neg_rosenbrock(const Vector& x, Vector& g) {
  const double a = 1.0 - x(0), b = x(1) - x(0) * x(0);
  g.resize(2);
  g(0) = 2.0 * a + 400.0 * x(0) * b;
  g(1) = -200.0 * b;
  return -(a * a + 100.0 * b * b);
}

}  // namespace

TEST_CASE("L-BFGS maximizes Rosenbrock") {
  Vector x0(2);
  x0 << -1.2, 1.0;
  LbfgsOptions opt;
  opt.max_iters = 500;
  opt.max_evals = 5000;
  const OptimizeResult r = lbfgs_maximize(neg_rosenbrock, x0, opt);
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-4));
  Vector g;
  CHECK(r.value >= neg_rosenbrock(x0, g));
}

TEST_CASE("L-BFGS respects the step cap and never gets worse") {
  auto f = [](const Vector& x, Vector& g) {
    g = -2.0 * (x.array() - 10.0).matrix();
    return -(x.array() - 10.0).square().sum();
  };
  LbfgsOptions opt;
  opt.max_iters = 1;
  opt.max_step = 0.5;
  const OptimizeResult r = lbfgs_maximize(f, Vector::Zero(3), opt);
  CHECK(r.x.cwiseAbs().maxCoeff() <= 0.5 + 1e-12);
  Vector g;
  CHECK(r.value >= f(Vector::Zero(3), g));
}

TEST_CASE("evolution strategy finds the sphere optimum") {
  Rng rng = make_stream(1, "es");
  Vector target(4);
  target << 1.0, -2.0, 0.5, 3.0;
  auto f = [&](const Vector& x) { return -(x - target).squaredNorm(); };
  EsOptions opt;
  opt.max_generations = 400;
  opt.max_evals = 10000;
  opt.initial_sigma = 1.0;
  const OptimizeResult r = es_maximize(f, Vector::Zero(4), rng, opt);
  CHECK((r.x - target).norm() < 1e-3);
}

TEST_CASE("evolution strategy treats failures as infeasible") {
  Rng rng = make_stream(2, "es-fail");
  auto f = [](const Vector& x) -> double {
    if (x(0) < 0.0) throw NumericError("infeasible");
    return -(x(0) - 1.0) * (x(0) - 1.0);
  };
  const OptimizeResult r = es_maximize(f, Vector::Constant(1, 0.5), rng);
  CHECK(r.x(0) >= 0.0);
  CHECK(r.value >= f(Vector::Constant(1, 0.5)));
}

TEST_CASE("finite differences and safe evaluation") {
  auto f = [](const Vector& x) { return std::sin(x(0)) * std::exp(x(1)); };
  Vector x(2);
  x << 0.3, -0.2;
  const Vector g = finite_difference_gradient(f, x);
  CHECK(g(0) == doctest::Approx(std::cos(0.3) * std::exp(-0.2)).epsilon(1e-8));
  CHECK(g(1) == doctest::Approx(std::sin(0.3) * std::exp(-0.2)).epsilon(1e-8));

  CHECK(safe_evaluate([](const Vector&) { return std::nan(""); }, x) == -std::numeric_limits<double>::infinity());
  CHECK(safe_evaluate([](const Vector&) -> double { throw InputError("bad"); }, x) ==
        -std::numeric_limits<double>::infinity());
}
