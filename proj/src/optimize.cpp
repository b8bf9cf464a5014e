#include "dppbound/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace dppbound {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

double safe_evaluate(const Objective& f, const Vector& x) {
  try {
    const double v = f(x);
    return std::isfinite(v) ? v : kNegInf;
  } catch (const InputError&) {
    return kNegInf;
  } catch (const NumericError&) {
    return kNegInf;
  }
}

Vector finite_difference_gradient(const Objective& f, const Vector& x, double rel_step) {
  Vector g(x.size());
  Vector xp = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x(i)));
    xp(i) = x(i) + h;
    const double fp = f(xp);
    xp(i) = x(i) - h;
    const double fm = f(xp);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

OptimizeResult lbfgs_maximize(const ObjectiveWithGradient& f, const Vector& x0, const LbfgsOptions& options) {
  OptimizeResult out;
  auto eval = [&](const Vector& x, Vector& g) {
    ++out.evaluations;
    g.resize(x.size());
    try {
      const double v = f(x, g);
      return std::isfinite(v) && g.allFinite() ? v : kNegInf;
    } catch (const InputError&) {
      return kNegInf;
    } catch (const NumericError&) {
      return kNegInf;
    }
  };

  Vector x = x0;
  Vector g;
  double fx = eval(x, g);
  out.x = x;
  out.value = fx;
  if (!std::isfinite(fx)) return out;

  // Curvature pairs for h = -f: s = dx, y = -(dg).
  std::deque<std::pair<Vector, Vector>> history;
  int small_steps = 0;
  Vector g_new;
  while (out.iterations < options.max_iters && out.evaluations < options.max_evals) {
    const double gnorm = g.norm();
    if (gnorm < options.grad_tol) {
      out.converged = true;
      break;
    }

    Vector dir = g;
    if (!history.empty()) {
      std::vector<double> alpha(history.size());
      for (std::size_t k = history.size(); k-- > 0;) {
        const auto& [s, y] = history[k];
        alpha[k] = s.dot(dir) / y.dot(s);
        dir -= alpha[k] * y;
      }
      const auto& [s_last, y_last] = history.back();
      dir *= s_last.dot(y_last) / y_last.squaredNorm();
      for (std::size_t k = 0; k < history.size(); ++k) {
        const auto& [s, y] = history[k];
        const double beta = y.dot(dir) / y.dot(s);
        dir += (alpha[k] - beta) * s;
      }
      if (!(dir.dot(g) > 0.0) || !dir.allFinite()) {
        history.clear();
        dir = g / gnorm;
      }
    } else {
      dir = g / gnorm;
    }
    const double dir_max = dir.lpNorm<Eigen::Infinity>();
    if (dir_max > options.max_step) dir *= options.max_step / dir_max;

    const double slope = dir.dot(g);
    double t = 1.0;
    double f_new = kNegInf;
    bool ok = false;
    for (int k = 0; k < 40 && out.evaluations < options.max_evals; ++k) {
      f_new = eval(x + t * dir, g_new);
      if (f_new >= fx + 1e-4 * t * slope && f_new > fx) {
        ok = true;
        break;
      }
      t *= 0.5;
    }
    ++out.iterations;
    if (!ok) {
      if (history.empty()) {
        out.converged = true;
        break;
      }
      history.clear();
      continue;
    }

    const Vector s = t * dir;
    const Vector y = g - g_new;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      history.emplace_back(s, y);
      if (static_cast<Index>(history.size()) > options.memory) history.pop_front();
    }
    const double gain = f_new - fx;
    x += s;
    g = g_new;
    fx = f_new;
    out.x = x;
    out.value = fx;
    if (gain < options.rel_tol * std::max(1.0, std::abs(fx))) {
      if (++small_steps >= 2) {
        out.converged = true;
        break;
      }
    } else {
      small_steps = 0;
    }
  }
  return out;
}

OptimizeResult es_maximize(const Objective& f, const Vector& x0, Rng& rng, const EsOptions& options) {
  const Index n = x0.size();
  OptimizeResult out;
  out.x = x0;
  out.value = safe_evaluate(f, x0);
  out.evaluations = 1;
  if (n == 0) return out;

  const Index lambda = options.population > 0
                           ? options.population
                           : 4 + static_cast<Index>(std::floor(3.0 * std::log(static_cast<double>(n))));
  const Index mu = std::max<Index>(1, lambda / 2);
  Vector w(mu);
  for (Index i = 0; i < mu; ++i) w(i) = std::log(mu + 0.5) - std::log(static_cast<double>(i + 1));
  w /= w.sum();
  const double mueff = 1.0 / w.squaredNorm();
  const double nd = static_cast<double>(n);
  const double cs = (mueff + 2.0) / (nd + mueff + 5.0);
  const double ds = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (nd + 1.0)) - 1.0) + cs;
  const double cc = (4.0 + mueff / nd) / (nd + 4.0 + 2.0 * mueff / nd);
  double c1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mueff);
  double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nd + 2.0) * (nd + 2.0) + mueff));
  // Diagonal-only covariance learns faster.
  c1 = std::min(1.0, c1 * (nd + 2.0) / 3.0);
  cmu = std::min(1.0 - c1, cmu * (nd + 2.0) / 3.0);
  const double chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));

  Vector mean = x0;
  double sigma = options.initial_sigma;
  Vector diag_c = Vector::Ones(n);
  Vector pc = Vector::Zero(n);
  Vector ps = Vector::Zero(n);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix ys(n, lambda);
  Vector values(lambda);
  std::vector<Index> order(static_cast<std::size_t>(lambda));
  int flat_generations = 0;

  for (Index gen = 0; gen < options.max_generations && out.evaluations + lambda <= options.max_evals; ++gen) {
    const Vector d = diag_c.cwiseSqrt();
    for (Index k = 0; k < lambda; ++k) {
      for (Index i = 0; i < n; ++i) ys(i, k) = d(i) * normal(rng);
      const Vector xk = mean + sigma * ys.col(k);
      values(k) = safe_evaluate(f, xk);
      ++out.evaluations;
      if (values(k) > out.value) {
        out.value = values(k);
        out.x = xk;
      }
    }
    ++out.iterations;
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values(a) > values(b); });
    if (!std::isfinite(values(order[0]))) {
      sigma *= 0.5;
      continue;
    }

    Vector yw = Vector::Zero(n);
    for (Index i = 0; i < mu; ++i) yw += w(i) * ys.col(order[static_cast<std::size_t>(i)]);
    mean += sigma * yw;
    ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * yw.cwiseQuotient(d);
    const double ps_norm = ps.norm() / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * static_cast<double>(gen + 1)));
    const double hsig = ps_norm / chi_n < 1.4 + 2.0 / (nd + 1.0) ? 1.0 : 0.0;
    pc = (1.0 - cc) * pc + hsig * std::sqrt(cc * (2.0 - cc) * mueff) * yw;
    Vector rank_mu = Vector::Zero(n);
    for (Index i = 0; i < mu; ++i) rank_mu += w(i) * ys.col(order[static_cast<std::size_t>(i)]).cwiseAbs2();
    diag_c = (1.0 - c1 - cmu) * diag_c + c1 * (pc.cwiseAbs2() + (1.0 - hsig) * cc * (2.0 - cc) * diag_c) +
             cmu * rank_mu;
    sigma *= std::exp(cs / ds * (ps.norm() / chi_n - 1.0));

    const double best = values(order[0]);
    const double worst = values(order[static_cast<std::size_t>(lambda - 1)]);
    if (std::isfinite(worst) && best - worst < options.rel_tol * std::max(1.0, std::abs(best))) {
      if (++flat_generations >= 10) {
        out.converged = true;
        break;
      }
    } else {
      flat_generations = 0;
    }
    if (sigma * diag_c.cwiseSqrt().maxCoeff() < 1e-14 * (1.0 + mean.lpNorm<Eigen::Infinity>())) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace dppbound
