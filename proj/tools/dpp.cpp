#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "config.hpp"
#include "dppbound/io.hpp"
#include "dppbound/likelihood.hpp"
#include "dppbound/mcmc.hpp"
#include "dppbound/oracle.hpp"
#include "dppbound/random.hpp"
#include "dppbound/svg.hpp"
#include "dppbound/vi.hpp"

using namespace dppbound;
using dpp_cli::Section;

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::string out = "dpp_out";
};

// Flags win over config values.
Common read_common(Section& s, const std::optional<std::uint64_t>& seed_flag, const std::string& out_flag) {
  Common c;
  c.seed = s.seed("seed", 1);
  c.out = s.string("out", "dpp_out");
  if (seed_flag) c.seed = *seed_flag;
  if (!out_flag.empty()) c.out = out_flag;
  return c;
}

std::string out_path(const Common& c, const std::string& name) {
  return (std::filesystem::path(c.out) / name).string();
}

std::string vec_str(const Vector& v) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) out += (i ? " " : "") + format_double(v(i));
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Index>(i)) = v[i];
  return out;
}

// Continuous data: optional num_samples pads with empty samples, which the
// point-pattern file cannot list.
ContinuousDataset load_continuous(Section& s) {
  const PointPatterns p = read_point_patterns(s.string("data"));
  std::vector<PointSet> patterns = p.patterns;
  const Index t = s.integer("num_samples", static_cast<Index>(patterns.size()));
  if (t < static_cast<Index>(patterns.size()))
    throw InputError("num_samples is smaller than the number of samples in the data file");
  while (static_cast<Index>(patterns.size()) < t) patterns.emplace_back(p.dim);
  if (patterns.empty()) throw InputError("data file has no samples; set num_samples");
  return ContinuousDataset(p.dim, std::move(patterns));
}

FiniteDataset load_finite(Section& s) {
  const PointSet ground = read_ground_set(s.string("ground"));
  PointPatterns p = read_point_patterns(s.string("data"));
  const Index t = s.integer("num_samples", static_cast<Index>(p.patterns.size()));
  if (t < static_cast<Index>(p.patterns.size()))
    throw InputError("num_samples is smaller than the number of samples in the data file");
  while (static_cast<Index>(p.patterns.size()) < t) {
    p.patterns.emplace_back(p.dim);
    p.ids.push_back("empty" + std::to_string(p.patterns.size()));
  }
  if (p.patterns.empty()) throw InputError("data file has no samples; set num_samples");
  return finite_dataset_from_patterns(ground, p);
}

std::string read_mode(Section& s, std::initializer_list<const char*> allowed) {
  const std::string mode = s.string("mode", *allowed.begin());
  for (const char* a : allowed)
    if (mode == a) return mode;
  std::string msg = "mode must be one of";
  for (const char* a : allowed) msg += std::string(" '") + a + "'";
  throw InputError(msg);
}

// ---------------------------------------------------------------------------

int cmd_synth(Section& s, const Common& c) {
  const std::string mode = read_mode(s, {"continuous", "finite"});
  const Index t = s.integer("num_samples", 1);
  if (t < 1) throw InputError("num_samples must be >= 1");
  const std::string output = s.string("output", "patterns.csv");
  Rng rng = make_stream(c.seed, "synth");
  PointPatterns out;
  double expected = 0.0;
  if (mode == "continuous") {
    const auto model = dpp_cli::read_model(s, true);
    if (!model) throw InputError("synth: give 'gg' or 'kernel' and 'base'");
    const Index dim = model->kernel.dim();
    if (dim > 2) throw InputError("synth: continuous sampling supports dimensions 1 and 2");
    const Index nodes = s.integer("nodes_per_dim", dim == 1 ? 4096 : 256);
    s.finish();
    out.dim = dim;
    expected = expected_count_gg(model->kernel, *model->base);
    for (Index k = 0; k < t; ++k) {
      out.ids.push_back(std::to_string(k + 1));
      out.patterns.push_back(model->base->intensity > 0.0
                                 ? sample_dpp_continuous_gg(model->kernel, *model->base, rng, nodes)
                                 : PointSet(dim));
    }
  } else {
    const PointSet ground = read_ground_set(s.string("ground"));
    KernelParams kernel = dpp_cli::read_kernel(s.object("kernel"), true);
    s.finish();
    if (kernel.dim() != ground.dim()) throw InputError("synth: kernel and ground set differ in dimension");
    const bool zero = kernel.amplitude == 0.0;
    if (zero) kernel.amplitude = 1.0;
    const Matrix l = zero ? Matrix::Zero(ground.size(), ground.size()) : gram(kernel, ground);
    expected = expected_cardinality_finite(l);
    const FiniteDppSampler sampler(l);
    std::vector<FinitePattern> patterns;
    for (Index k = 0; k < t; ++k) patterns.push_back(sampler.draw(rng));
    out = patterns_from_finite(FiniteDataset(GroundSet(ground), std::move(patterns)));
  }
  write_point_patterns(out_path(c, output), out);
  double realized = 0.0;
  for (const auto& p : out.patterns) realized += static_cast<double>(p.size());
  std::cout << "samples " << t << "\nexpected_count " << format_double(expected) << "\nrealized_mean_count "
            << format_double(realized / static_cast<double>(t)) << "\nwrote " << out_path(c, output) << '\n';
  return 0;
}

int cmd_bounds(Section& s, const Common& c) {
  const std::string mode = read_mode(s, {"continuous", "finite"});
  const std::vector<Index> ms = s.integers("m");
  const std::string output = s.string("output", "bounds.csv");
  SweepResult sweep;
  std::vector<std::optional<double>> exact;
  if (mode == "continuous") {
    const ContinuousDataset data = load_continuous(s);
    const auto model = dpp_cli::read_model(s, true);
    if (!model) throw InputError("bounds: give 'gg' or 'kernel' and 'base'");
    const Index opt_evals = s.integer("opt_evals", 30);
    const Index per_axis = s.integer("candidates_per_axis", 0);
    const bool want_exact = s.boolean("exact", true);
    s.finish();
    if (model->kernel.dim() != data.dim) throw InputError("bounds: model and data differ in dimension");
    sweep = continuous_bounds_sweep(model->kernel, *model->base, data, ms, opt_evals, per_axis);
    std::optional<double> ex;
    if (want_exact && data.dim == 1) ex = exact_loglik_gg(model->kernel, *model->base, data);
    exact.assign(sweep.rows.size(), ex);
  } else {
    const FiniteDataset data = load_finite(s);
    const KernelParams kernel = dpp_cli::read_kernel(s.object("kernel"));
    const bool want_exact = s.boolean("exact", true);
    s.finish();
    if (kernel.dim() != data.ground.dim()) throw InputError("bounds: kernel and ground set differ in dimension");
    sweep = finite_bounds_sweep(kernel, data, ms);
    std::optional<double> ex;
    if (want_exact && data.ground.size() <= 5000) ex = finite_loglik_exact(kernel, data);
    exact.assign(sweep.rows.size(), ex);
  }
  const std::string csv = format_bounds_csv(sweep.rows, exact);
  write_file_atomic(out_path(c, output), csv);
  std::cout << csv;
  return 0;
}

int cmd_fit_vi(Section& s, const Common& c) {
  const std::string mode = read_mode(s, {"continuous", "finite"});
  VIConfig cfg;
  cfg.m = s.integer("m", cfg.m);
  cfg.init = parse_init_strategy(s.string("init", to_string(cfg.init)));
  cfg.optimizer = parse_vi_optimizer(s.string("optimizer", to_string(cfg.optimizer)));
  cfg.max_iters = s.integer("max_iters", cfg.max_iters);
  cfg.tolerance = s.number("tolerance", cfg.tolerance);
  cfg.stall_sweeps = s.integer("stall_sweeps", cfg.stall_sweeps);
  cfg.theta_evals = s.integer("theta_evals", cfg.theta_evals);
  cfg.z_evals = s.integer("z_evals", cfg.z_evals);
  cfg.joint = s.boolean("joint", cfg.joint);
  cfg.fit_amplitude = s.boolean("fit_amplitude", cfg.fit_amplitude);
  cfg.fit_base = s.boolean("fit_base", cfg.fit_base);
  cfg.seed = c.seed;
  std::optional<VIResult> res;
  bool continuous = mode == "continuous";
  if (continuous) {
    const ContinuousDataset data = load_continuous(s);
    std::optional<dpp_cli::ModelSpec> init;
    if (s.has("initial")) {
      Section i = s.object("initial");
      init = dpp_cli::read_model(i, true);
      i.finish();
      if (!init) throw InputError("initial: give 'gg' or 'kernel' and 'base'");
    }
    s.finish();
    cfg.validate();
    if (!init) {
      // Data-driven start: sigma = 0.3 sd, rho = sd, kappa = twice the mean count.
      const Matrix pooled = data.pooled().coords();
      if (pooled.rows() < 2) throw InputError("fit-vi: need at least two data points for the default start");
      const Vector mean = pooled.colwise().mean().transpose();
      const Vector sd = (pooled.rowwise() - mean.transpose()).array().square().colwise().mean().sqrt().transpose();
      init = dpp_cli::ModelSpec{KernelParams(1.0, 0.3 * sd),
                                GaussianBaseMeasure(2.0 * static_cast<double>(data.total_points()) /
                                                        static_cast<double>(data.num_patterns()),
                                                    mean, sd)};
    }
    res = fit_vi(data, init->kernel, *init->base, cfg);
  } else {
    const FiniteDataset data = load_finite(s);
    std::optional<KernelParams> init;
    if (s.has("initial")) init = dpp_cli::read_kernel(s.object("initial"));
    s.finish();
    cfg.validate();
    if (!init) {
      const Matrix& items = data.ground.items().coords();
      const Vector mean = items.colwise().mean().transpose();
      const Vector sd = (items.rowwise() - mean.transpose()).array().square().colwise().mean().sqrt().transpose();
      init = KernelParams(1.0, (0.3 * sd).cwiseMax(1e-3));
    }
    res = fit_vi(data, *init, cfg);
  }
  const VIResult& r = *res;

  std::ostringstream trace;
  trace << "sweep,objective\n";
  for (std::size_t i = 0; i < r.trace.size(); ++i) trace << i << ',' << format_double(r.trace[i]) << '\n';
  write_file_atomic(out_path(c, "vi_trace.csv"), trace.str());
  write_file_atomic(out_path(c, "inducing.csv"), format_ground_set(r.z.points()));
  Summary sum{{"mode", mode},
              {"m", std::to_string(r.z.size())},
              {"amplitude", format_double(r.params.amplitude)},
              {"lengthscales", vec_str(r.params.lengthscales)}};
  if (continuous) {
    sum.emplace_back("intensity", format_double(r.base.intensity));
    sum.emplace_back("mean", vec_str(r.base.mean));
    sum.emplace_back("scale", vec_str(r.base.scale));
    sum.emplace_back("gamma", vec_str(r.gamma));
  }
  sum.emplace_back("objective", format_double(r.trace.empty() ? r.bounds.lower : r.trace.back()));
  sum.emplace_back("lower", format_double(r.bounds.lower));
  sum.emplace_back("upper", format_double(r.bounds.upper));
  sum.emplace_back("iterations", std::to_string(r.iterations));
  sum.emplace_back("evaluations", std::to_string(r.evaluations));
  sum.emplace_back("converged", r.converged ? "true" : "false");
  sum.emplace_back("seconds", format_double(r.seconds));
  const std::string text = format_summary(sum);
  write_file_atomic(out_path(c, "vi_summary.txt"), text);
  std::cout << text;
  return 0;
}

int cmd_fit_mcmc(Section& s, const Common& c) {
  const std::string mode = read_mode(s, {"gg", "finite", "flat"});
  MCMCConfig cfg;
  cfg.n_iters = s.integer("n_iters", cfg.n_iters);
  cfg.m0 = s.integer("m0", cfg.m0);
  cfg.m_step = s.integer("m_step", cfg.m_step);
  cfg.m_max = s.integer("m_max", cfg.m_max);
  cfg.z_budget = s.integer("z_budget", cfg.z_budget);
  cfg.target_acceptance = s.number("target_acceptance", cfg.target_acceptance);
  cfg.adapt_start = s.integer("adapt_start", cfg.adapt_start);
  cfg.adapt_gain = s.number("adapt_gain", cfg.adapt_gain);
  cfg.eps_reg = s.number("eps_reg", cfg.eps_reg);
  cfg.mode = s.boolean("ideal", false) ? MHMode::Ideal : MHMode::Retrospective;
  cfg.instrument = s.boolean("instrument", false);
  cfg.seed = c.seed;
  const Index burn_in = s.integer("burn_in", cfg.n_iters / 10);
  const std::string output = s.string("output", "chain.csv");

  std::unique_ptr<MHTarget> target;
  PriorBox default_prior;
  if (mode == "gg") {
    target = std::make_unique<GaussianGaussianTarget>(load_continuous(s));
    default_prior = PriorBox::gaussian_gaussian_default();
  } else if (mode == "finite") {
    auto t = std::make_unique<FiniteTarget>(load_finite(s));
    for (const auto& n : t->names()) default_prior.intervals.push_back({n, -10.0, 10.0, PriorScale::Log});
    target = std::move(t);
  } else {
    std::vector<std::string> names;
    if (s.has("names")) {
      names = s.strings("names");
    } else {
      const Index dim = s.integer("dim", 3);
      if (dim < 1) throw InputError("dim must be >= 1");
      for (Index i = 0; i < dim; ++i) names.push_back("theta_" + std::to_string(i + 1));
    }
    if (names.empty()) throw InputError("names must not be empty");
    target = std::make_unique<FlatTarget>(names);
    for (const auto& n : names) default_prior.intervals.push_back({n, -10.0, 10.0, PriorScale::Log});
  }
  const PriorBox prior = dpp_cli::read_prior(s, "prior", default_prior);
  const auto initial = s.numbers("initial");
  const Index p = target->dim();
  std::vector<double> sd(static_cast<std::size_t>(p), 0.1);
  if (s.has("proposal_sd")) sd = s.numbers("proposal_sd");
  s.finish();
  if (static_cast<Index>(initial.size()) != p) throw InputError("initial must list one value per parameter");
  cfg.initial_u = Vector(p);
  for (Index i = 0; i < p; ++i) {
    if (!(initial[static_cast<std::size_t>(i)] > 0.0)) throw InputError("initial values must be positive");
    cfg.initial_u(i) = std::log(initial[static_cast<std::size_t>(i)]);
  }
  cfg.initial_proposal_sd = to_vector(sd);
  if (burn_in < 0 || burn_in >= cfg.n_iters) throw InputError("burn_in must lie in [0, n_iters)");

  const ChainTrace trace = run_mh(*target, prior, cfg);
  write_file_atomic(out_path(c, output), format_chain_csv(trace));

  Vector mean = Vector::Zero(p);
  for (std::size_t i = static_cast<std::size_t>(burn_in); i < trace.records.size(); ++i) mean += trace.records[i].theta;
  mean /= static_cast<double>(trace.records.size() - static_cast<std::size_t>(burn_in));
  std::string hist;
  for (const auto& [m, n] : trace.m_histogram) hist += (hist.empty() ? "" : " ") + std::to_string(m) + ":" + std::to_string(n);
  std::string names;
  for (const auto& n : trace.names) names += (names.empty() ? "" : " ") + n;
  Summary sum{{"mode", cfg.mode == MHMode::Ideal ? "ideal" : "retrospective"},
              {"names", names},
              {"iterations", std::to_string(cfg.n_iters)},
              {"burn_in", std::to_string(burn_in)},
              {"acceptance_rate", format_double(trace.acceptance_rate)},
              {"posterior_mean", vec_str(mean)},
              {"max_m", std::to_string(trace.max_m)},
              {"m_histogram", hist},
              {"fallbacks", std::to_string(trace.fallbacks)},
              {"seconds", format_double(trace.seconds)}};
  if (cfg.instrument) sum.emplace_back("mismatches", std::to_string(trace.mismatches));
  const std::string text = format_summary(sum);
  write_file_atomic(out_path(c, "chain_summary.txt"), text);
  std::cout << text;
  return 0;
}

// ---------------------------------------------------------------------------

void plot_chain(const std::string& path, Index burn_in, const PriorBox& prior, const Common& c,
                std::vector<std::string>& written) {
  const NumericTable t = parse_numeric_csv(read_file(path));
  std::vector<Index> cols;
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i].rfind("theta_", 0) == 0) cols.push_back(static_cast<Index>(i));
  if (!prior.intervals.empty() && prior.dim() != static_cast<Index>(cols.size()))
    throw InputError("plot: prior dimension differs from the chain");
  const Index it_col = t.column("iter");
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const std::string name = prior.intervals.empty() ? t.header[static_cast<std::size_t>(cols[k])]
                                                      : prior.intervals[k].name;
    std::vector<double> iter, val, kept;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      iter.push_back(t.rows[r][static_cast<std::size_t>(it_col)]);
      val.push_back(t.rows[r][static_cast<std::size_t>(cols[k])]);
    }
    const bool log_scale = !prior.intervals.empty() && prior.intervals[k].scale == PriorScale::Log;
    SvgPlot tr("Trace of " + name, "iteration", log_scale ? "log " + name : name);
    std::vector<double> shown = val;
    if (log_scale)
      for (auto& v : shown) v = std::log(v);
    tr.line(iter, shown, "#1f77b4", "", 1.0);
    const std::string tf = out_path(c, "trace_" + std::to_string(k + 1) + ".svg");
    write_file_atomic(tf, tr.render());
    written.push_back(tf);

    for (std::size_t r = static_cast<std::size_t>(burn_in); r < shown.size(); ++r) kept.push_back(shown[r]);
    if (kept.empty()) throw InputError("plot: burn_in removes every sample");
    double lo = *std::min_element(kept.begin(), kept.end()), hi = *std::max_element(kept.begin(), kept.end());
    if (!prior.intervals.empty() && !log_scale) lo = prior.intervals[k].lo, hi = prior.intervals[k].hi;
    if (!(hi > lo)) lo -= 0.5, hi += 0.5;
    const auto edges = linspace(lo, hi, 21);
    SvgPlot h("Marginal of " + name, log_scale ? "log " + name : name, "density");
    h.bars(edges, histogram_density(kept, edges), "#1f77b4", "posterior");
    if (!prior.intervals.empty()) {
      const double dens = 1.0 / (prior.intervals[k].hi - prior.intervals[k].lo);
      h.line({lo, hi}, {dens, dens}, "#d62728", "prior", 2.0, true);
    }
    const std::string hf = out_path(c, "hist_" + std::to_string(k + 1) + ".svg");
    write_file_atomic(hf, h.render());
    written.push_back(hf);
  }
}

void plot_bounds(const std::string& path, const Common& c, std::vector<std::string>& written) {
  const NumericTable t = parse_numeric_csv(read_file(path));
  std::vector<double> m, lo, up, ex;
  bool has_exact = false;
  for (const auto& r : t.rows) {
    m.push_back(r[static_cast<std::size_t>(t.column("m"))]);
    lo.push_back(r[static_cast<std::size_t>(t.column("lower"))]);
    up.push_back(r[static_cast<std::size_t>(t.column("upper"))]);
    ex.push_back(r[static_cast<std::size_t>(t.column("exact"))]);
    has_exact = has_exact || std::isfinite(ex.back());
  }
  SvgPlot p("Log-likelihood bounds", "inducing points m", "log-likelihood");
  // Very loose early bounds would flatten the curves; clip to the last rows' scale.
  if (!up.empty()) {
    const double span = std::max(1e-9, up.back() - lo.back());
    const double ref = 0.5 * (up.back() + lo.back());
    const double lo_y = std::max(*std::min_element(lo.begin(), lo.end()), ref - std::max(50.0 * span, 1.0));
    const double hi_y = std::min(*std::max_element(up.begin(), up.end()), ref + std::max(50.0 * span, 1.0));
    if (hi_y > lo_y) p.set_y_range(lo_y - 0.05 * (hi_y - lo_y), hi_y + 0.05 * (hi_y - lo_y));
  }
  p.line(m, up, "#d62728", "upper");
  p.points(m, up, "#d62728");
  p.line(m, lo, "#1f77b4", "lower");
  p.points(m, lo, "#1f77b4");
  if (has_exact) p.line(m, ex, "black", "exact", 1.0, true);
  const std::string f = out_path(c, "bounds.svg");
  write_file_atomic(f, p.render());
  written.push_back(f);
}

void plot_data(const std::string& path, const std::string& inducing, const std::optional<dpp_cli::ModelSpec>& model,
               const Common& c, std::vector<std::string>& written) {
  const PointPatterns pp = read_point_patterns(path);
  std::optional<PointSet> z;
  if (!inducing.empty()) z = read_ground_set(inducing);
  if (z && z->dim() != pp.dim) throw InputError("plot: inducing points and data differ in dimension");
  if (pp.dim == 1) {
    SvgPlot p("Data and inducing points", "x", "intensity");
    std::vector<double> xs, ys;
    for (const auto& ps : pp.patterns)
      for (Index i = 0; i < ps.size(); ++i) xs.push_back(ps(i, 0)), ys.push_back(0.0);
    double lo = xs.empty() ? -1.0 : *std::min_element(xs.begin(), xs.end());
    double hi = xs.empty() ? 1.0 : *std::max_element(xs.begin(), xs.end());
    if (model && model->base) {
      const GGSpectrum spec(model->kernel, *model->base);
      lo = std::min(lo, model->base->mean(0) - 4.0 * model->base->scale(0));
      hi = std::max(hi, model->base->mean(0) + 4.0 * model->base->scale(0));
      const auto grid = linspace(lo, hi, 400);
      std::vector<double> dens;
      for (const double x : grid) dens.push_back(intensity_gg(spec, x));
      p.line(grid, dens, "#2ca02c", "first-order intensity", 2.0);
    }
    p.points(xs, ys, "#1f77b4", "data", 3.0);
    if (z) {
      std::vector<double> zx, zy;
      for (Index i = 0; i < z->size(); ++i) zx.push_back((*z)(i, 0)), zy.push_back(0.0);
      p.points(zx, zy, "#d62728", "inducing", 5.0, true);
    }
    const std::string f = out_path(c, "data.svg");
    write_file_atomic(f, p.render());
    written.push_back(f);
    return;
  }
  SvgPlot p("Data and inducing points", "x1", "x2", 520, 520);
  const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};
  for (std::size_t t = 0; t < pp.patterns.size(); ++t) {
    std::vector<double> xs, ys;
    for (Index i = 0; i < pp.patterns[t].size(); ++i) xs.push_back(pp.patterns[t](i, 0)), ys.push_back(pp.patterns[t](i, 1));
    p.points(xs, ys, colors[t % 8], t < 8 ? "sample " + pp.ids[t] : "", 2.5);
  }
  if (z) {
    std::vector<double> zx, zy;
    for (Index i = 0; i < z->size(); ++i) zx.push_back((*z)(i, 0)), zy.push_back((*z)(i, 1));
    p.points(zx, zy, "#d62728", "inducing", 4.0, true);
  }
  const std::string f = out_path(c, "data.svg");
  write_file_atomic(f, p.render());
  written.push_back(f);
}

int cmd_plot(Section& s, const Common& c) {
  std::vector<std::string> written;
  const std::string chain = s.string("chain", "");
  const std::string bounds = s.string("bounds", "");
  const std::string data = s.string("data", "");
  const std::string inducing = s.string("inducing", "");
  const Index burn_in = s.integer("burn_in", 0);
  PriorBox prior;
  if (s.has("prior") && s.has("prior_preset")) throw InputError("give either 'prior' or 'prior_preset'");
  if (s.has("prior_preset")) {
    const std::string preset = s.string("prior_preset");
    if (preset != "gaussian_gaussian") throw InputError("prior_preset must be 'gaussian_gaussian'");
    prior = PriorBox::gaussian_gaussian_default();
  } else {
    prior = dpp_cli::read_prior(s, "prior", PriorBox{});
  }
  const auto model = dpp_cli::read_model(s, false);
  s.finish();
  if (chain.empty() && bounds.empty() && data.empty()) throw InputError("plot: give at least one of chain, bounds, data");
  if (!inducing.empty() && data.empty()) throw InputError("plot: 'inducing' needs 'data'");
  if (burn_in < 0) throw InputError("burn_in must be >= 0");
  if (!chain.empty()) plot_chain(chain, burn_in, prior, c, written);
  if (!bounds.empty()) plot_bounds(bounds, c, written);
  if (!data.empty()) plot_data(data, inducing, model, c, written);
  for (const auto& f : written) std::cout << "wrote " << f << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounds, variational fits and retrospective MCMC for Gaussian DPPs", "dpp"};
  app.require_subcommand(1);
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::map<std::string, int (*)(Section&, const Common&)> commands{{"synth", cmd_synth},
                                                                      {"bounds", cmd_bounds},
                                                                      {"fit-vi", cmd_fit_vi},
                                                                      {"fit-mcmc", cmd_fit_mcmc},
                                                                      {"plot", cmd_plot}};
  const std::map<std::string, std::string> help{{"synth", "sample synthetic point patterns"},
                                                {"bounds", "bound sweep over inducing counts"},
                                                {"fit-vi", "variational fit"},
                                                {"fit-mcmc", "retrospective Metropolis-Hastings"},
                                                {"plot", "SVG figures from run outputs"}};
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config, "JSON run configuration")->required();
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--out", out, "output directory (overrides the config)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  try {
    const nlohmann::json j = dpp_cli::load_json(config);
    Section s(j, "config");
    const Common c = read_common(s, seed, out);
    for (const auto& [name, fn] : commands)
      if (app.got_subcommand(name)) return fn(s, c);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (auto& ch : msg)
      if (ch == '\n') ch = ' ';
    std::cerr << "error: " << msg << '\n';
    return 1;
  }
  return 1;
}
