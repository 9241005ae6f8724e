// msfbm: command-line front end.
//
// Exit codes: 0 success, 1 verification failure, 2 invalid input,
// 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msfbm/analysis.hpp"
#include "msfbm/classify.hpp"
#include "msfbm/errors.hpp"
#include "msfbm/io.hpp"
#include "msfbm/kernels.hpp"
#include "msfbm/sampler.hpp"
#include "msfbm/verify.hpp"

namespace {

using namespace msfbm;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

struct SpecFlags {
  std::vector<double> coeffs;
  std::vector<double> hurst;
  double half_tolerance = 0.0;

  void add(CLI::App* app, bool required) {
    auto* h = app->add_option("--hurst", hurst, "Hurst indices, comma-separated, each in (0,1)")->delimiter(',');
    app->add_option("--coeffs", coeffs, "Coefficients a_i, comma-separated (default: all 1)")->delimiter(',');
    app->add_option("--half-tolerance", half_tolerance, "Tolerance when testing H == 1/2")->capture_default_str();
    if (required) h->required();
  }
  bool given() const { return !hurst.empty(); }
  ProcessSpec spec() const {
    if (hurst.empty()) throw ValidationError("--hurst is required");
    std::vector<double> a = coeffs.empty() ? std::vector<double>(hurst.size(), 1.0) : coeffs;
    return ProcessSpec(std::move(a), hurst, half_tolerance);
  }
};

struct Output {
  std::string path;
  std::string format = "csv";

  void add(CLI::App* app, const std::string& default_format) {
    format = default_format;
    app->add_option("--out", path, "Output file (default: standard output)");
    app->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  }
  void write(const std::string& text) const {
    if (path.empty() || path == "-") {
      std::cout << text;
      std::cout.flush();
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open output file: " + path);
    f << text;
    if (!f) throw ValidationError("cannot write output file: " + path);
  }
};

std::string plain(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// cov

struct CovCmd {
  SpecFlags spec;
  Output out;
  std::vector<double> points;
  std::string kernel = "msfbm";
};

std::size_t kernel_arity(const std::string& k) {
  if (k == "increment_cov") return 4;
  if (k == "markov_residual") return 3;
  return 2;
}

double eval_kernel(const std::string& k, const ProcessSpec& spec, const double* x) {
  if (k == "msfbm") return kernels::msfbm_cov(spec, x[0], x[1]);
  if (k == "mfbm") return kernels::mfbm_cov(spec, x[0], x[1]);
  if (k == "fbm" || k == "sfbm") {
    if (spec.size() != 1 || spec.coeff(0) != 1.0) throw ValidationError("--kernel " + k + " takes one Hurst index and a = (1)");
    return k == "fbm" ? kernels::fbm_cov(spec.hurst(0), x[0], x[1]) : kernels::sfbm_cov(spec.hurst(0), x[0], x[1]);
  }
  if (k == "increment_moment") return kernels::increment_second_moment(spec, x[0], x[1]);
  if (k == "conditional_variance") return kernels::conditional_variance(spec, x[0], x[1]);
  if (k == "increment_cov") return kernels::increment_cov(spec, kernels::IncrementWindow(x[0], x[1], x[2], x[3]));
  if (k == "markov_residual") return kernels::markov_residual(spec, x[0], x[1], x[2]);
  if (k == "lag_cov") {
    const double n = x[1];
    if (n != std::floor(n) || n < 1 || n > 1e15) throw ValidationError("lag n must be a positive integer");
    return kernels::lag_cov_c(spec, x[0], static_cast<long long>(n));
  }
  throw ValidationError("unknown kernel: " + k);
}

int run_cov(const CovCmd& c) {
  const ProcessSpec spec = c.spec.spec();
  const std::size_t arity = kernel_arity(c.kernel);
  if (c.points.empty() || c.points.size() % arity != 0) {
    throw ValidationError("--points must hold groups of " + std::to_string(arity) + " values for --kernel " + c.kernel);
  }
  std::ostringstream os;
  json rows = json::array();
  for (std::size_t i = 0; i < c.points.size(); i += arity) {
    const double v = eval_kernel(c.kernel, spec, &c.points[i]);
    if (c.out.format == "csv") {
      for (std::size_t j = 0; j < arity; ++j) os << plain(c.points[i + j]) << ',';
      os << io::format_real(v) << '\n';
    } else {
      rows.push_back({{"args", std::vector<double>(c.points.begin() + i, c.points.begin() + i + arity)}, {"value", v}});
    }
  }
  if (c.out.format == "json") {
    os << io::dump({{"schema", "msfbm.cov/1"}, {"kernel", c.kernel}, {"spec", io::to_json(spec)}, {"rows", rows}});
  }
  c.out.write(os.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimCmd {
  SpecFlags spec;
  Output out;
  std::size_t grid_points = 101;
  double horizon = 1.0;
  std::vector<double> times;
  std::size_t reps = 1;
  std::uint64_t seed = 0;
  std::string method = "auto";
  std::size_t dense_limit = kDefaultDenseLimit;
  unsigned threads = 0;
};

EnsembleOptions ensemble_options(const std::string& method, std::size_t dense_limit, unsigned threads) {
  EnsembleOptions o;
  o.route = method == "exact"     ? EnsembleOptions::Route::Exact
            : method == "via_fbm" ? EnsembleOptions::Route::ViaFbm
                                  : EnsembleOptions::Route::Auto;
  o.dense_limit = dense_limit;
  o.threads = threads;
  return o;
}

int run_simulate(const SimCmd& c) {
  const ProcessSpec spec = c.spec.spec();
  const TimeGrid grid = c.times.empty() ? TimeGrid::uniform(c.grid_points, c.horizon) : TimeGrid(c.times);
  if (c.reps == 0) throw ValidationError("--reps must be positive");
  const Ensemble ens = sample_ensemble(spec, grid, c.reps, c.seed, ensemble_options(c.method, c.dense_limit, c.threads));
  if (c.out.format == "csv") {
    std::ostringstream os;
    io::write_ensemble_csv(os, ens);
    c.out.write(os.str());
  } else {
    c.out.write(io::dump(io::to_json(ens)));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyCmd {
  SpecFlags spec;
  Output out;
  std::string suite = "all";
  std::uint64_t seed = verify::Options{}.seed;
  std::size_t draws = verify::Options{}.draws;
  std::size_t reps = verify::Options{}.reps;
  unsigned threads = 0;
};

int run_verify(const VerifyCmd& c) {
  verify::Options o;
  if (c.spec.given()) o.spec = c.spec.spec();
  o.seed = c.seed;
  o.draws = c.draws;
  o.reps = c.reps;
  o.threads = c.threads;
  std::vector<verify::Report> reports;
  if (c.suite == "all") {
    for (auto s : verify::kAllSuites) reports.push_back(verify::run(s, o));
  } else {
    auto s = verify::parse_suite(c.suite);
    if (!s) throw ValidationError("unknown suite: " + c.suite);
    reports.push_back(verify::run(*s, o));
  }
  const json j = verify::to_json(reports);
  c.out.write(io::dump(j));
  return j["passed"].get<bool>() ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------------------
// dims

struct DimsCmd {
  SpecFlags spec;
  Output out;
  std::size_t grid_points = (std::size_t{1} << 16) + 1;
  double horizon = 1.0;
  std::size_t reps = 1;
  std::uint64_t seed = 0;
  double level = 0.0;
  double eps = 0.01;
  unsigned threads = 0;
};

int run_dims(const DimsCmd& c) {
  const ProcessSpec spec = c.spec.spec();
  const TimeGrid grid = TimeGrid::uniform(c.grid_points, c.horizon);
  if (grid.size() < (std::size_t{1} << 14)) {
    throw InsufficientResolution("dims needs --grid-points >= 16384 for the graph estimate");
  }
  if (c.reps == 0) throw ValidationError("--reps must be positive");
  const Ensemble ens = sample_ensemble(spec, grid, c.reps, c.seed, ensemble_options("auto", kDefaultDenseLimit, c.threads));
  const double h_min = spec.h_min();

  json graph = io::to_json(analysis::graph_box_dimension(ens.paths.front()));
  graph["target"] = 2.0 - h_min;
  json range = io::to_json(analysis::range_dimension(ens.paths.front()));
  range["target"] = 1.0;

  std::vector<double> level_values;
  json level_estimates = json::array();
  for (const auto& p : ens.paths) {
    try {
      const auto d = analysis::level_set_box_dimension(p, c.level, c.eps);
      level_values.push_back(d.value);
      level_estimates.push_back(io::to_json(d));
    } catch (const LevelNotCrossed&) {
      level_estimates.push_back(nullptr);
    }
  }
  json level;
  level["x"] = c.level;
  level["eps"] = c.eps;
  level["estimates"] = level_estimates;
  level["replicas_crossing"] = level_values.size();
  level["median"] = level_values.empty() ? json(nullptr) : json(analysis::median(level_values));
  level["target"] = 1.0 - h_min;

  json j;
  j["schema"] = "msfbm.dims/1";
  j["metadata"] = io::ensemble_metadata(ens);
  j["graph"] = graph;
  j["range"] = range;
  j["level_set"] = level;
  c.out.write(io::dump(j));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// classify

int run_classify(const SpecFlags& flags, const Output& out) {
  const ProcessSpec spec = flags.spec();
  json j;
  j["schema"] = "msfbm.classify/1";
  j["spec"] = io::to_json(spec);
  j["semimartingale"] = io::to_json(classify::semimartingale_classify(spec));
  j["markov"] = classify::markov_verdict(spec);
  j["increment_sign"] = classify::to_string(classify::increment_sign_predict(spec));
  out.write(io::dump(j));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// srd

struct SrdCmd {
  SpecFlags spec;
  Output out;
  long long p = 0;
  long long n_max = 1000;
};

int run_srd(const SrdCmd& c) {
  const ProcessSpec spec = c.spec.spec();
  const auto sums = analysis::srd_partial_sums(spec, c.p, c.n_max);
  std::ostringstream os;
  if (c.out.format == "csv") {
    os << "m,partial_sum\n";
    for (std::size_t m = 0; m < sums.size(); ++m) os << m + 1 << ',' << io::format_real(sums[m]) << '\n';
  } else {
    json j;
    j["schema"] = "msfbm.srd/1";
    j["spec"] = io::to_json(spec);
    j["p"] = c.p;
    j["n_max"] = c.n_max;
    j["partial_sums"] = sums;
    std::optional<double> h;
    for (std::size_t i : spec.active_set()) {
      if (!spec.is_half(spec.hurst(i))) h = std::max(h.value_or(0.0), spec.hurst(i));
    }
    if (h) {
      const auto fit = analysis::lag_cov_tail_slope(spec, c.p, 1000, 100000);
      j["tail_slope"] = {{"value", fit.slope}, {"stderr", fit.slope_stderr}, {"target", 2.0 * *h - 3.0},
                         {"n_range", {1000, 100000}}};
    } else {
      j["tail_slope"] = nullptr;
    }
    os << io::dump(j);
  }
  c.out.write(os.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "msfbm: mixed sub-fractional Brownian motion kernels, sampling and diagnostics.\n"
      "Option precedence: command-line flags > --config file (TOML/INI, one [section]\n"
      "per subcommand) > built-in defaults. Pass --config before the subcommand:\n"
      "  msfbm --config run.toml simulate --seed 5\n"
      "MSFBM_THREADS caps worker threads."};
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.require_subcommand(1);

  CovCmd cov;
  auto* cov_app = app.add_subcommand("cov", "Evaluate covariance kernels at given points");
  cov.spec.add(cov_app, true);
  cov.out.add(cov_app, "csv");
  cov_app->add_option("--points", cov.points, "Comma-separated arguments, grouped by kernel arity")->delimiter(',')->required();
  cov_app->add_option("--kernel", cov.kernel, "Kernel to evaluate")
      ->check(CLI::IsMember({"msfbm", "mfbm", "fbm", "sfbm", "increment_moment", "increment_cov", "lag_cov",
                             "markov_residual", "conditional_variance"}))
      ->capture_default_str();

  SimCmd sim;
  auto* sim_app = app.add_subcommand("simulate", "Simulate an ensemble of paths");
  sim.spec.add(sim_app, true);
  sim.out.add(sim_app, "csv");
  sim_app->add_option("--grid-points", sim.grid_points, "Uniform grid points including t = 0")->capture_default_str();
  sim_app->add_option("--horizon", sim.horizon, "Time horizon T")->capture_default_str();
  sim_app->add_option("--times", sim.times, "Explicit grid times (overrides --grid-points)")->delimiter(',');
  sim_app->add_option("--reps", sim.reps, "Number of replicas")->capture_default_str();
  sim_app->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  sim_app->add_option("--method", sim.method, "Sampler route")
      ->check(CLI::IsMember({"auto", "exact", "via_fbm"}))
      ->capture_default_str();
  sim_app->add_option("--dense-limit", sim.dense_limit, "Largest grid factored densely in auto mode")->capture_default_str();
  sim_app->add_option("--threads", sim.threads, "Worker threads (0: MSFBM_THREADS or all cores)");

  VerifyCmd ver;
  auto* ver_app = app.add_subcommand("verify", "Run property suites and emit a JSON report");
  ver.spec.add(ver_app, false);
  ver.out.add(ver_app, "json");
  ver_app->add_option("--suite", ver.suite, "kernels, sampler, srd, markov, selfsim or all")
      ->check(CLI::IsMember({"all", "kernels", "sampler", "srd", "markov", "selfsim"}))
      ->capture_default_str();
  ver_app->add_option("--seed", ver.seed, "Master seed")->capture_default_str();
  ver_app->add_option("--draws", ver.draws, "Randomized draws for identity checks")->capture_default_str();
  ver_app->add_option("--reps", ver.reps, "Monte Carlo replicas")->capture_default_str();
  ver_app->add_option("--threads", ver.threads, "Worker threads (0: MSFBM_THREADS or all cores)");

  DimsCmd dims;
  auto* dims_app = app.add_subcommand("dims", "Box-counting dimension estimates of simulated paths");
  dims.spec.add(dims_app, true);
  dims.out.add(dims_app, "json");
  dims_app->add_option("--grid-points", dims.grid_points, "Uniform grid points including t = 0")->capture_default_str();
  dims_app->add_option("--horizon", dims.horizon, "Time horizon T")->capture_default_str();
  dims_app->add_option("--reps", dims.reps, "Replicas for the level-set median")->capture_default_str();
  dims_app->add_option("--seed", dims.seed, "Master seed")->capture_default_str();
  dims_app->add_option("--level", dims.level, "Level x of the level set")->capture_default_str();
  dims_app->add_option("--eps", dims.eps, "Level sets are taken on [eps, T]")->capture_default_str();
  dims_app->add_option("--threads", dims.threads, "Worker threads (0: MSFBM_THREADS or all cores)");

  SpecFlags cls_spec;
  Output cls_out;
  auto* cls_app = app.add_subcommand("classify", "Semimartingale, Markov and increment-sign verdicts");
  cls_spec.add(cls_app, true);
  cls_out.add(cls_app, "json");

  SrdCmd srd;
  auto* srd_app = app.add_subcommand("srd", "Partial sums of lag covariances of unit increments");
  srd.spec.add(srd_app, true);
  srd.out.add(srd_app, "json");
  srd_app->add_option("--p", srd.p, "Offset p of the first increment")->capture_default_str();
  srd_app->add_option("--n-max", srd.n_max, "Largest lag")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*cov_app) return run_cov(cov);
    if (*sim_app) return run_simulate(sim);
    if (*ver_app) return run_verify(ver);
    if (*dims_app) return run_dims(dims);
    if (*cls_app) {
      if (cls_out.format == "csv") throw ValidationError("classify emits JSON only");
      return run_classify(cls_spec, cls_out);
    }
    if (*srd_app) return run_srd(srd);
  } catch (const std::invalid_argument& e) {  // ValidationError, PreconditionViolated
    std::cerr << "msfbm: invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const GridMismatch& e) {
    std::cerr << "msfbm: invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const InsufficientResolution& e) {
    std::cerr << "msfbm: insufficient resolution: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const InsufficientReplicas& e) {
    std::cerr << "msfbm: insufficient replicas: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {  // FactorizationFailure and other numerical failures
    std::cerr << "msfbm: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitInvalid;
}
