#include <cmath>

#include "doctest.h"
#include "dppbound/likelihood.hpp"
#include "dppbound/oracle.hpp"
#include "dppbound/random.hpp"

using namespace dppbound;

namespace {

PointSet random_points(Rng& rng, Index n, Index dim, double spread = 1.0) {
  std::normal_distribution<double> g(0.0, spread);
  Matrix c(n, dim);
  for (Index i = 0; i < n; ++i)
    for (Index d = 0; d < dim; ++d) c(i, d) = g(rng);
  return PointSet(c);
}

FinitePattern random_pattern(Rng& rng, Index n, double p) {
  std::bernoulli_distribution keep(p);
  std::vector<Index> idx;
  for (Index i = 0; i < n; ++i)
    if (keep(rng)) idx.push_back(i);
  return FinitePattern(idx);
}

}  // namespace

TEST_CASE("finite patterns are sorted and unique") {
  CHECK(FinitePattern({3, 1, 2}).indices() == std::vector<Index>{1, 2, 3});
  CHECK_THROWS_AS(FinitePattern({1, 1}), InputError);
  const GroundSet g(PointSet{{0.0}, {1.0}});
  CHECK_THROWS_AS(FiniteDataset(g, {FinitePattern({2})}), InputError);
}

TEST_CASE("scalar and empty cases") {
  const double a = 2.5;
  const FiniteDataset one(GroundSet(PointSet{{0.0}}), {FinitePattern({0})});
  const KernelParams p(a, Vector::Ones(1));
  CHECK(finite_loglik_exact(p, one) == doctest::Approx(std::log(a) - std::log1p(a)));

  Rng rng = make_stream(1, "empty");
  const PointSet x = random_points(rng, 6, 1);
  const KernelParams q(1.0, Vector::Constant(1, 0.4));
  const FiniteDataset empty(GroundSet(x), {FinitePattern()});
  const Eigen::SelfAdjointEigenSolver<Matrix> es(gram(q, x));
  CHECK(finite_loglik_exact(q, empty) == doctest::Approx(-(es.eigenvalues().array() + 1.0).log().sum()));
}

TEST_CASE("normalization over all subsets of ten items") {
  Rng rng = make_stream(10, "exhaustive");
  const PointSet x = random_points(rng, 10, 2);
  const KernelParams p(1.8, Vector::Constant(2, 0.6));
  const GroundSet g(x);
  double total = 0.0;
  for (unsigned mask = 0; mask < 1024u; ++mask) {
    std::vector<Index> idx;
    for (Index i = 0; i < 10; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    total += std::exp(finite_loglik_exact(p, FiniteDataset(g, {FinitePattern(idx)})));
  }
  CHECK(std::abs(total - 1.0) < 1e-8);
}

TEST_CASE("singular pattern Gram gives log zero") {
  const PointSet x{{0.0}, {1e-12}, {3.0}};
  const KernelParams p(1.0, Vector::Ones(1));
  const FiniteDataset d(GroundSet(x), {FinitePattern({0, 1})});
  CHECK(is_log_zero(finite_data_term(p, d)));
  CHECK(is_log_zero(finite_loglik_exact(p, d)));
}

TEST_CASE("finite log-likelihood bounds") {
  Rng rng = make_stream(12, "finite-bounds");
  const PointSet x = random_points(rng, 50, 2, 1.5);
  const KernelParams p(1.2, Vector::Constant(2, 0.5));
  const FiniteDataset data(GroundSet(x), {random_pattern(rng, 50, 0.15), random_pattern(rng, 50, 0.15)});

  const BoundPair b = finite_loglik_bounds(p, data, InducingSet(random_points(rng, 10, 2, 1.5)));
  const double exact = finite_loglik_exact(p, data);
  CHECK(b.lower <= exact);
  CHECK(exact <= b.upper);

  const BoundPair full = finite_loglik_bounds(p, data, InducingSet(x));
  CHECK(std::abs(full.lower - exact) < 1e-8);
  CHECK(std::abs(full.upper - exact) < 1e-8);

  const InducingSet z(random_points(rng, 7, 2));
  FiniteDataset doubled = data;
  doubled.patterns.insert(doubled.patterns.end(), data.patterns.begin(), data.patterns.end());
  const BoundPair b1 = finite_loglik_bounds(p, data, z), b2 = finite_loglik_bounds(p, doubled, z);
  CHECK(b2.gap() == doctest::Approx(2.0 * b1.gap()).epsilon(1e-12));
}

TEST_CASE("expected cardinality") {
  CHECK(expected_cardinality_finite(Matrix::Identity(3, 3)) == doctest::Approx(1.5));
  CHECK(expected_cardinality_finite(4.0 * Matrix::Identity(5, 5)) == doctest::Approx(5 * 4.0 / 5.0));

  Rng rng = make_stream(13, "cardinality");
  const PointSet x = random_points(rng, 20, 1, 2.0);
  const KernelParams p(1.5, Vector::Constant(1, 0.4));
  const double expect = expected_cardinality_finite(p, GroundSet(x));
  const FiniteDppSampler sampler(gram(p, x));
  const int draws = 5000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double k = static_cast<double>(sampler.draw(rng).size());
    sum += k;
    sum2 += k * k;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
  CHECK(std::abs(mean - expect) < 3.0 * se);
}

TEST_CASE("continuous log-likelihood") {
  const GGSpectrum s = gg_eigenpairs(1000.0, 0.5, 1.0);
  const Matrix cand = base_candidate_grid(s.base(), 600);
  const Matrix z = extend_inducing_greedy(s.params(), s.base(), Matrix(0, 1), 40, cand);
  const InducingSet zs{PointSet(z)};

  SUBCASE("empty pattern reduces to the determinant bounds") {
    const ContinuousDataset empty(1, {PointSet(1)});
    const BoundPair ll = continuous_loglik_bounds(s.params(), s.base(), empty, zs);
    const BoundPair nd = neg_logdet_bounds_continuous(s.params(), s.base(), zs);
    CHECK(ll.lower == doctest::Approx(nd.lower));
    CHECK(ll.upper == doctest::Approx(nd.upper));
  }
  SUBCASE("synthetic dataset at the generating parameters") {
    Rng rng = make_stream(2024, "synth");
    const ContinuousDataset data(1, {sample_dpp_continuous_gg(s, rng)});
    const double exact = exact_loglik_gg(s.params(), s.base(), data);
    const BoundPair b = certified_continuous_loglik_bounds(s.params(), s.base(), data, zs);
    CHECK(b.contains(exact));
  }
  SUBCASE("intensity enters the data term multiplicatively") {
    const PointSet y{{0.1}, {-0.4}, {0.7}};
    GaussianBaseMeasure b = s.base();
    const double v1 = log_janossy_numerator(s.params(), b, y);
    b.intensity *= 3.0;
    CHECK(log_janossy_numerator(s.params(), b, y) - v1 == doctest::Approx(3.0 * std::log(3.0)).epsilon(1e-12));
  }
}
