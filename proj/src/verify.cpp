#include "msfbm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "msfbm/analysis.hpp"
#include "msfbm/classify.hpp"
#include "msfbm/errors.hpp"
#include "msfbm/kernels.hpp"
#include "msfbm/linalg.hpp"
#include "msfbm/sampler.hpp"

namespace msfbm::verify {

namespace {

using kernels::IncrementWindow;

// Uniform variates built from raw mt19937_64 words so draws are identical on
// every standard library.
class Draws {
 public:
  explicit Draws(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

  ProcessSpec spec(double h_lo, double h_hi) {
    const std::size_t n = 1 + index(4);
    std::vector<double> a(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
      do {
        a[i] = uniform(-10.0, 10.0);
      } while (a[i] == 0.0);
      h[i] = uniform(h_lo, h_hi);
    }
    return ProcessSpec(std::move(a), std::move(h));
  }

  /// 0 <= u < v <= s < t <= 10.
  IncrementWindow window() {
    for (;;) {
      double q[4];
      for (double& x : q) x = uniform(0.0, 10.0);
      std::sort(q, q + 4);
      if (q[0] < q[1] && q[2] < q[3]) return IncrementWindow(q[0], q[1], q[2], q[3]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

double rel_err(double a, double b, double scale) {
  const double denom = std::max({std::abs(a), std::abs(b), std::abs(scale)});
  return denom == 0.0 ? 0.0 : std::abs(a - b) / denom;
}

double cov_scale(const ProcessSpec& spec, double t) {
  double acc = 0.0;
  for (std::size_t i : spec.active_set()) acc += spec.coeff(i) * spec.coeff(i) * std::pow(t, 2.0 * spec.hurst(i));
  return acc;
}

Check make(std::string name, Relation rel, double measured, double target, double tolerance) {
  Check c{std::move(name), rel, measured, target, tolerance, false};
  switch (rel) {
    case Relation::AtMost: c.passed = measured <= tolerance; break;
    case Relation::AtLeast: c.passed = measured >= tolerance; break;
    case Relation::Within: c.passed = std::abs(measured - target) <= tolerance; break;
  }
  if (!std::isfinite(measured)) c.passed = false;
  return c;
}

Check at_most(std::string name, double measured, double tolerance) {
  return make(std::move(name), Relation::AtMost, measured, 0.0, tolerance);
}
Check at_least(std::string name, double measured, double tolerance) {
  return make(std::move(name), Relation::AtLeast, measured, 0.0, tolerance);
}
Check within(std::string name, double measured, double target, double tolerance) {
  return make(std::move(name), Relation::Within, measured, target, tolerance);
}

// ---------------------------------------------------------------------------

constexpr double kIdentityTol = 1e-12;

void kernel_identities(const Options& o, Report& rep) {
  Draws d(o.seed);
  double e_inc = 0, e_moment = 0, e_diag = 0, e_sym = 0, e_rescale = 0;
  double bound_violations = 0;
  for (std::size_t k = 0; k < o.draws; ++k) {
    const ProcessSpec spec = o.spec ? *o.spec : d.spec(0.05, 0.95);
    const IncrementWindow w = d.window();
    const double scale = cov_scale(spec, w.t);

    const double bilinear = kernels::msfbm_cov(spec, w.v, w.t) - kernels::msfbm_cov(spec, w.v, w.s) -
                            kernels::msfbm_cov(spec, w.u, w.t) + kernels::msfbm_cov(spec, w.u, w.s);
    e_inc = std::max(e_inc, rel_err(kernels::increment_cov(spec, w), bilinear, scale));

    const double s = w.v, t = w.t;
    const double moment = kernels::increment_second_moment(spec, s, t);
    const double expansion = kernels::msfbm_var(spec, t) + kernels::msfbm_var(spec, s) - 2 * kernels::msfbm_cov(spec, s, t);
    e_moment = std::max(e_moment, rel_err(moment, expansion, scale));

    e_diag = std::max(e_diag, rel_err(kernels::msfbm_cov(spec, t, t), kernels::msfbm_var(spec, t), 0.0));
    e_sym = std::max(e_sym, rel_err(kernels::msfbm_cov(spec, s, t), kernels::msfbm_cov(spec, t, s), 0.0));

    const double h = d.uniform(0.1, 10.0);
    const ProcessSpec scaled = kernels::rescale_coeffs(spec, h);
    e_rescale = std::max(e_rescale, rel_err(kernels::msfbm_cov(spec, h * s, h * t), kernels::msfbm_cov(scaled, s, t),
                                            cov_scale(spec, h * t)));

    const auto b = kernels::increment_bounds(spec, s, t);
    if (!(b.lower <= moment && moment <= b.upper)) bound_violations += 1;
  }
  rep.checks.push_back(at_most("increment_cov_vs_bilinear_expansion", e_inc, kIdentityTol));
  rep.checks.push_back(at_most("increment_moment_vs_variance_expansion", e_moment, kIdentityTol));
  rep.checks.push_back(at_most("diagonal_consistency", e_diag, kIdentityTol));
  rep.checks.push_back(at_most("covariance_symmetry", e_sym, kIdentityTol));
  rep.checks.push_back(at_most("rescaling_identity", e_rescale, kIdentityTol));
  rep.checks.push_back(at_most("increment_bound_violations", bound_violations, 0.0));
}

void sign_and_order_laws(const Options& o, Report& rep) {
  Draws d(o.seed ^ 0x5157u);
  const std::size_t per_regime = std::max<std::size_t>(1, o.draws / 10);
  struct Regime {
    const char* name;
    double lo, hi;
  };
  for (const Regime r : {Regime{"half", 0.5, 0.5}, Regime{"above_half", 0.5, 0.95}, Regime{"below_half", 0.05, 0.5}}) {
    double sign_violations = 0, order_violations = 0, zero_size = 0;
    for (std::size_t k = 0; k < per_regime; ++k) {
      ProcessSpec spec = d.spec(r.lo, r.hi);
      if (r.lo == r.hi) {
        spec = ProcessSpec(std::vector<double>(spec.coeffs().begin(), spec.coeffs().end()),
                           std::vector<double>(spec.size(), 0.5));
      } else if (spec.h_min() == 0.5) {
        continue;  // the lower endpoint of a half-open range
      }
      const IncrementWindow w = d.window();
      const double c = kernels::increment_cov(spec, w);
      switch (classify::increment_sign_predict(spec)) {
        case classify::Sign::Zero: zero_size = std::max(zero_size, std::abs(c) / cov_scale(spec, w.t)); break;
        case classify::Sign::Positive: sign_violations += c > 0.0 ? 0 : 1; break;
        case classify::Sign::Negative: sign_violations += c < 0.0 ? 0 : 1; break;
        case classify::Sign::Indeterminate: sign_violations += 1; break;
      }
      const std::size_t i = d.index(spec.size());
      double b = d.uniform(-10.0, 10.0), cc = d.uniform(-10.0, 10.0);
      if (std::abs(b) > std::abs(cc)) std::swap(b, cc);
      if (std::abs(b) == std::abs(cc)) continue;
      if (classify::dependence_compare(spec, i, b, cc, w) != classify::predicted_dependence_order(spec, i)) {
        order_violations += 1;
      }
    }
    const std::string tag = r.name;
    if (r.lo == r.hi) {
      rep.checks.push_back(at_most("sign_law_" + tag + "_max_relative_covariance", zero_size, kIdentityTol));
    } else {
      rep.checks.push_back(at_most("sign_law_" + tag + "_violations", sign_violations, 0.0));
    }
    rep.checks.push_back(at_most("dependence_order_" + tag + "_violations", order_violations, 0.0));
  }
}

double closed_vs_window(const ProcessSpec& spec, long long p_max, long long n_max) {
  // Scale: the same sum with every component taken in absolute value, so
  // cancellation between components of opposite sign is not counted as error.
  double worst = 0.0;
  for (long long p = 0; p <= p_max; ++p) {
    for (long long n = 1; n <= n_max; ++n) {
      double scale = 0.0;
      for (std::size_t i : spec.active_set()) {
        const ProcessSpec one({spec.coeff(i)}, {spec.hurst(i)});
        scale += std::abs(kernels::lag_cov_c_closed_form(one, p, n));
      }
      worst = std::max(worst, rel_err(kernels::lag_cov_c_closed_form(spec, p, n),
                                      kernels::lag_cov_c_window(spec, static_cast<double>(p), n), scale));
    }
  }
  return worst;
}

Report kernels_suite(const Options& o) {
  Report rep{Suite::Kernels, {}};
  kernel_identities(o, rep);
  sign_and_order_laws(o, rep);
  const ProcessSpec spec = o.spec ? *o.spec : ProcessSpec({1.0, 0.5}, {0.75, 0.3});
  rep.checks.push_back(at_most("lag_cov_closed_form_vs_window_form", closed_vs_window(spec, 10, 1000), kIdentityTol));
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<ProcessSpec> sampler_specs(const Options& o) {
  if (o.spec) return {*o.spec};
  return {ProcessSpec({1.0}, {0.5}), ProcessSpec({1.0}, {0.75}), ProcessSpec({1.0, 1.0}, {0.4, 0.8})};
}

std::string spec_tag(const ProcessSpec& spec) {
  std::string s = "H";
  char buf[32];
  for (double h : spec.hurst()) {
    std::snprintf(buf, sizeof buf, "_%g", h);
    s += buf;
  }
  return s;
}

Report sampler_suite(const Options& o) {
  Report rep{Suite::Sampler, {}};
  const TimeGrid grid = TimeGrid::uniform(16, 1.0);
  EnsembleOptions exact_opts;
  exact_opts.route = EnsembleOptions::Route::Exact;
  exact_opts.threads = o.threads;
  EnsembleOptions fbm_opts = exact_opts;
  fbm_opts.route = EnsembleOptions::Route::ViaFbm;

  for (const ProcessSpec& spec : sampler_specs(o)) {
    const std::string tag = spec_tag(spec);
    const Eigen::MatrixXd gram = gram_matrix(spec, grid);
    const PsdFactor f = psd_factor(gram);
    const double max_diag = gram.diagonal().maxCoeff();
    const double fidelity = (f.lower * f.lower.transpose() - gram).cwiseAbs().maxCoeff() / max_diag;
    rep.checks.push_back(at_most("factor_fidelity_" + tag, fidelity, 1e-10));

    const Ensemble exact = sample_ensemble(spec, grid, o.reps, o.seed, exact_opts);
    const Ensemble via = sample_ensemble(spec, grid, o.reps, o.seed ^ 0xF00Du, fbm_opts);
    double worst = 0.0;
    for (std::size_t j = 1; j < grid.size(); ++j) {
      for (std::size_t k = j; k < grid.size(); ++k) {
        worst = std::max(worst, std::abs(analysis::empirical_cov(exact, j, k).zscore));
      }
    }
    rep.checks.push_back(at_most("gram_max_abs_zscore_" + tag, worst, 5.0));
    rep.checks.push_back(at_most("exact_vs_via_fbm_max_pooled_zscore_" + tag,
                                 analysis::max_pooled_cov_zscore(exact.paths, via.paths), 5.0));
    const SamplePath again = sample_exact(spec, grid, exact.replica_seeds.front());
    double redraw = 0.0;
    for (std::size_t i = 0; i < again.size(); ++i) {
      redraw = std::max(redraw, std::abs(again.values[i] - exact.paths.front().values[i]));
    }
    rep.checks.push_back(at_most("redraw_max_abs_difference_" + tag, redraw, 0.0));
  }
  return rep;
}

// ---------------------------------------------------------------------------

/// Largest active Hurst index different from 1/2; it sets the tail decay.
std::optional<double> tail_hurst(const ProcessSpec& spec) {
  std::optional<double> h;
  for (std::size_t i : spec.active_set()) {
    if (!spec.is_half(spec.hurst(i))) h = std::max(h.value_or(0.0), spec.hurst(i));
  }
  return h;
}

Report srd_suite(const Options& o) {
  Report rep{Suite::Srd, {}};
  const ProcessSpec spec = o.spec ? *o.spec : ProcessSpec({1.0}, {0.75});
  const auto h = tail_hurst(spec);
  const std::vector<double> sums = analysis::srd_partial_sums(spec, 0, 100000);
  if (!h) {
    double worst = 0.0;
    for (double s : sums) worst = std::max(worst, std::abs(s));
    rep.checks.push_back(at_most("partial_sums_max_abs", worst, 0.0));
  } else {
    const auto fit = analysis::lag_cov_tail_slope(spec, 0, 1000, 100000);
    rep.checks.push_back(within("tail_loglog_slope", fit.slope, 2.0 * *h - 3.0, 0.1));
    // Successive decade increments of the partial sums shrink like 10^{2H-2}.
    const double d1 = std::abs(sums[9999] - sums[999]);
    const double d2 = std::abs(sums[99999] - sums[9999]);
    rep.checks.push_back(within("decade_contraction_log10", std::log10(d2 / d1), 2.0 * *h - 2.0, 0.1));
    const auto gap = analysis::stationarity_gap_slope(spec, 1, 1e3, 1e5);
    rep.checks.push_back(within("stationarity_gap_slope", gap.slope, 2.0 * *h - 2.0, 0.1));
    double increases = 0;
    double prev = std::abs(kernels::stationarity_gap(spec, 1e3, 1));
    for (int k = 1; k <= 40; ++k) {
      const double x = std::pow(10.0, 3.0 + 2.0 * k / 40.0);
      const double g = std::abs(kernels::stationarity_gap(spec, x, 1));
      if (!(g < prev)) increases += 1;
      prev = g;
    }
    rep.checks.push_back(at_most("stationarity_gap_non_decreasing_steps", increases, 0.0));
  }
  rep.checks.push_back(at_most("lag_cov_closed_form_vs_window_form", closed_vs_window(spec, 10, 1000), kIdentityTol));
  return rep;
}

// ---------------------------------------------------------------------------

Report markov_suite(const Options& o) {
  Report rep{Suite::Markov, {}};
  const ProcessSpec spec = o.spec ? *o.spec : ProcessSpec({1.0}, {0.6});
  const bool markov = classify::markov_verdict(spec);
  if (markov) {
    Draws d(o.seed ^ 0x4D4Bu);
    double worst = 0.0;
    for (std::size_t k = 0; k < std::max<std::size_t>(1, o.draws / 10); ++k) {
      double q[3];
      for (double& x : q) x = d.uniform(0.0, 10.0);
      std::sort(q, q + 3);
      worst = std::max(worst, std::abs(kernels::markov_residual(spec, q[0], q[1], q[2])));
    }
    rep.checks.push_back(at_most("residual_max_abs_random_triples", worst, 1e-12));
  } else {
    // The triples of the non-Markov argument: one for H > 1/2, one for H < 1/2.
    double residual = 0.0;
    bool above = false, below = false;
    for (std::size_t i : spec.active_set()) {
      above = above || spec.above_half(spec.hurst(i));
      below = below || spec.below_half(spec.hurst(i));
    }
    if (above) {
      const double t = 1e3;
      residual = std::max(residual, std::abs(kernels::markov_residual(spec, std::sqrt(t), t, t * t)));
    }
    if (below) {
      const double t = 1e-3;
      residual = std::max(residual, std::abs(kernels::markov_residual(spec, t * t, t, std::sqrt(t))));
    }
    rep.checks.push_back(at_least("residual_abs_at_proof_triple", residual, 1e-6));
  }
  return rep;
}

// ---------------------------------------------------------------------------

Report selfsim_suite(const Options& o) {
  Report rep{Suite::Selfsim, {}};
  Draws d(o.seed ^ 0x5353u);
  double worst = 0.0;
  for (std::size_t k = 0; k < o.draws; ++k) {
    const ProcessSpec spec = o.spec ? *o.spec : d.spec(0.05, 0.95);
    const double h = d.uniform(0.1, 10.0), s = d.uniform(0.0, 10.0), t = d.uniform(0.0, 10.0);
    worst = std::max(worst, rel_err(kernels::msfbm_cov(spec, h * s, h * t),
                                    kernels::msfbm_cov(kernels::rescale_coeffs(spec, h), s, t),
                                    cov_scale(spec, h * std::max(s, t))));
  }
  rep.checks.push_back(at_most("rescaling_identity", worst, kIdentityTol));

  // In law: S on a grid scaled by h against the rescaled spec on the base grid.
  const ProcessSpec spec = o.spec ? *o.spec : ProcessSpec({1.0, 1.0}, {0.4, 0.8});
  const double h = 2.5;
  std::vector<double> base(16), scaled(16);
  for (std::size_t i = 0; i < base.size(); ++i) {
    base[i] = static_cast<double>(i) / 15.0;
    scaled[i] = h * base[i];
  }
  EnsembleOptions eo;
  eo.threads = o.threads;
  const Ensemble a = sample_ensemble(spec, TimeGrid(scaled), o.reps, o.seed, eo);
  const Ensemble b = sample_ensemble(kernels::rescale_coeffs(spec, h), TimeGrid(base), o.reps, o.seed ^ 0xBEEFu, eo);
  rep.checks.push_back(at_most("scaled_grid_vs_rescaled_spec_max_pooled_zscore",
                               analysis::max_pooled_cov_zscore(a.paths, b.paths), 5.0));
  return rep;
}

}  // namespace

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::optional<Suite> parse_suite(std::string_view name) {
  for (Suite s : kAllSuites) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::string to_string(Suite s) {
  switch (s) {
    case Suite::Kernels: return "kernels";
    case Suite::Sampler: return "sampler";
    case Suite::Srd: return "srd";
    case Suite::Markov: return "markov";
    case Suite::Selfsim: return "selfsim";
  }
  return "?";
}

Report run(Suite suite, const Options& options) {
  switch (suite) {
    case Suite::Kernels: return kernels_suite(options);
    case Suite::Sampler: return sampler_suite(options);
    case Suite::Srd: return srd_suite(options);
    case Suite::Markov: return markov_suite(options);
    case Suite::Selfsim: return selfsim_suite(options);
  }
  throw ValidationError("unknown suite");
}

namespace {

std::string to_string(Relation r) {
  switch (r) {
    case Relation::AtMost: return "at_most";
    case Relation::AtLeast: return "at_least";
    case Relation::Within: return "within";
  }
  return "?";
}

}  // namespace

nlohmann::json to_json(const Report& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    nlohmann::json j;
    j["name"] = c.name;
    j["relation"] = to_string(c.relation);
    j["measured"] = std::isfinite(c.measured) ? nlohmann::json(c.measured) : nlohmann::json(nullptr);
    if (c.relation == Relation::Within) j["target"] = c.target;
    j["tolerance"] = c.tolerance;
    j["passed"] = c.passed;
    checks.push_back(std::move(j));
  }
  return {{"suite", verify::to_string(r.suite)}, {"passed", r.passed()}, {"checks", checks}};
}

nlohmann::json to_json(const std::vector<Report>& reports) {
  nlohmann::json suites = nlohmann::json::array();
  bool ok = true;
  for (const auto& r : reports) {
    suites.push_back(to_json(r));
    ok = ok && r.passed();
  }
  return {{"schema", "msfbm.verify/1"}, {"passed", ok}, {"suites", suites}};
}

}  // namespace msfbm::verify
