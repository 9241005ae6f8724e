#include "msfbm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msfbm/errors.hpp"
#include "msfbm/kernels.hpp"

namespace msfbm::analysis {

namespace {

void require_same_grid(std::span<const SamplePath> paths) {
  if (paths.empty()) throw InsufficientReplicas("no paths");
  for (const auto& p : paths) {
    if (!(p.grid == paths.front().grid)) throw GridMismatch("paths live on different grids");
  }
}

double require_uniform(const TimeGrid& grid) {
  auto step = grid.uniform_step();
  if (!step) throw GridMismatch("estimator needs a uniform grid");
  return *step;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t points) {
  std::vector<double> out(points);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    out[i] = std::exp(a + f * (b - a));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

DimensionEstimate fit_counts(BoxCounts& bc, DimensionMethod method, BoxCounts* out) {
  std::vector<double> inv(bc.boxes_per_side.begin(), bc.boxes_per_side.end());
  const LinearFit f = fit_loglog(inv, bc.counts);
  DimensionEstimate d;
  d.value = f.slope;
  d.stderr = f.slope_stderr;
  d.scale_range = {bc.boxes_per_side.front(), bc.boxes_per_side.back()};
  d.method = method;
  if (out) *out = bc;
  return d;
}

}  // namespace

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("fit_line: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw ValidationError("fit_line: need at least 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ValidationError("fit_line: x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (f.intercept + f.slope * x[i]);
      ssr += r * r;
    }
    f.slope_stderr = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  }
  return f;
}

LinearFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("fit_loglog: length mismatch");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ValidationError("fit_loglog: values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// ---------------------------------------------------------------------------

CovEstimate empirical_cov(const Ensemble& ens, std::size_t j, std::size_t k) {
  const std::size_t n = ens.n_reps();
  if (n < 2) throw InsufficientReplicas("empirical_cov needs at least 2 replicas");
  if (j >= ens.grid.size() || k >= ens.grid.size()) throw ValidationError("grid index out of range");
  double mj = 0.0, mk = 0.0;
  for (const auto& p : ens.paths) {
    mj += p.values[j];
    mk += p.values[k];
  }
  mj /= static_cast<double>(n);
  mk /= static_cast<double>(n);
  double acc = 0.0;
  for (const auto& p : ens.paths) acc += (p.values[j] - mj) * (p.values[k] - mk);

  CovEstimate e;
  e.estimate = acc / static_cast<double>(n - 1);
  const double tj = ens.grid[j], tk = ens.grid[k];
  const double gjj = kernels::msfbm_var(ens.spec, tj);
  const double gkk = kernels::msfbm_var(ens.spec, tk);
  const double gjk = kernels::msfbm_cov(ens.spec, tj, tk);
  e.stderr = std::sqrt((gjj * gkk + gjk * gjk) / static_cast<double>(n));
  e.zscore = e.stderr > 0.0 ? (e.estimate - gjk) / e.stderr : 0.0;
  return e;
}

Eigen::MatrixXd empirical_cov_matrix(std::span<const SamplePath> paths) {
  require_same_grid(paths);
  const std::size_t n = paths.size();
  if (n < 2) throw InsufficientReplicas("covariance needs at least 2 replicas");
  const Eigen::Index d = static_cast<Eigen::Index>(paths.front().size()) - 1;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), d);
  for (std::size_t r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) x(static_cast<Eigen::Index>(r), c) = paths[r].values[c + 1];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  return (x.transpose() * x) / static_cast<double>(n - 1);
}

double max_pooled_cov_zscore(std::span<const SamplePath> a, std::span<const SamplePath> b) {
  const Eigen::MatrixXd ca = empirical_cov_matrix(a);
  const Eigen::MatrixXd cb = empirical_cov_matrix(b);
  if (ca.rows() != cb.rows()) throw GridMismatch("ensembles have different grid sizes");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double worst = 0.0;
  for (Eigen::Index j = 0; j < ca.rows(); ++j) {
    for (Eigen::Index k = j; k < ca.cols(); ++k) {
      const double va = (ca(j, j) * ca(k, k) + ca(j, k) * ca(j, k)) / na;
      const double vb = (cb(j, j) * cb(k, k) + cb(j, k) * cb(j, k)) / nb;
      const double se = std::sqrt(va + vb);
      if (se > 0.0) worst = std::max(worst, std::abs(ca(j, k) - cb(j, k)) / se);
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

double p_variation_stat(const SamplePath& path, double p, std::size_t n_sub) {
  if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("p must be a positive real");
  if (n_sub == 0) throw ValidationError("n_sub must be positive");
  const TimeGrid& grid = path.grid;
  const std::size_t intervals = grid.size() - 1;
  std::vector<std::size_t> idx(n_sub + 1);
  if (grid.is_uniform() && intervals % n_sub == 0) {
    const std::size_t stride = intervals / n_sub;
    for (std::size_t j = 0; j <= n_sub; ++j) idx[j] = j * stride;
  } else {
    const double horizon = grid.horizon();
    for (std::size_t j = 0; j <= n_sub; ++j) {
      auto i = grid.find(horizon * static_cast<double>(j) / static_cast<double>(n_sub));
      if (!i) throw GridMismatch("grid lacks the uniform partition into " + std::to_string(n_sub) + " intervals");
      idx[j] = *i;
    }
  }
  double acc = 0.0;
  for (std::size_t j = 1; j <= n_sub; ++j) {
    const double d = path.values[idx[j]] - path.values[idx[j - 1]];
    acc += p == 2.0 ? d * d : std::pow(std::abs(d), p);
  }
  return acc;
}

VariationReport variation_report(std::span<const SamplePath> paths, std::span<const int> levels, double p) {
  require_same_grid(paths);
  if (levels.size() < 2) throw ValidationError("need at least 2 refinement levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 0 || levels[i] > 40) throw ValidationError("refinement level out of range");
    if (i > 0 && levels[i] <= levels[i - 1]) throw ValidationError("refinement levels must be strictly increasing");
  }
  VariationReport rep;
  rep.p = p;
  const double n_reps = static_cast<double>(paths.size());
  for (int m : levels) {
    const std::size_t n = std::size_t{1} << m;
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& path : paths) {
      const double a = p_variation_stat(path, p, n);
      sum += a;
      sum_sq += a * a;
    }
    const double mean = sum / n_reps;
    double se = 0.0;
    if (paths.size() > 1) {
      const double var = std::max(0.0, (sum_sq - n_reps * mean * mean) / (n_reps - 1.0));
      se = std::sqrt(var / n_reps);
    }
    rep.partition_sizes.push_back(n);
    rep.statistics.push_back(mean);
    rep.statistic_stderrs.push_back(se);
  }
  std::vector<double> ns(rep.partition_sizes.begin(), rep.partition_sizes.end());
  const LinearFit f = fit_loglog(ns, rep.statistics);
  rep.fitted_log_slope = f.slope;
  rep.slope_stderr = f.slope_stderr;
  return rep;
}

VariationReport qv_scaling_exponent(const ProcessSpec& spec, std::span<const int> levels, std::size_t n_reps,
                                    std::uint64_t master_seed, double p, const EnsembleOptions& options) {
  if (levels.empty()) throw ValidationError("no refinement levels");
  const int top = *std::max_element(levels.begin(), levels.end());
  if (top < 1 || top > 24) throw ValidationError("finest refinement level out of range");
  const TimeGrid grid = TimeGrid::uniform((std::size_t{1} << top) + 1, 1.0);
  const Ensemble ens = sample_ensemble(spec, grid, n_reps, master_seed, options);
  return variation_report(ens.paths, levels, p);
}

// ---------------------------------------------------------------------------

HolderEstimate holder_exponent_estimate(std::span<const SamplePath> paths) {
  require_same_grid(paths);
  const TimeGrid& grid = paths.front().grid;
  const double dt = require_uniform(grid);
  if (grid.size() < (std::size_t{1} << 8)) throw InsufficientResolution("Hoelder estimate needs >= 256 grid points");
  if (paths.size() < 100) throw InsufficientReplicas("Hoelder estimate needs >= 100 replicas");
  const std::size_t intervals = grid.size() - 1;
  const std::size_t max_lag = std::min(kVariogramLags, intervals - 1);
  if (max_lag < 4) throw InsufficientResolution("fewer than 4 lag scales available");

  HolderEstimate est;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double acc = 0.0;
    std::size_t count = 0;
    for (const auto& path : paths) {
      for (std::size_t i = 0; i + k <= intervals; ++i) {
        const double d = path.values[i + k] - path.values[i];
        acc += d * d;
      }
      count += intervals - k + 1;
    }
    est.lags.push_back(dt * static_cast<double>(k));
    est.variogram.push_back(acc / static_cast<double>(count));
  }
  const LinearFit f = fit_loglog(est.lags, est.variogram);
  est.h_hat = 0.5 * f.slope;
  est.stderr = 0.5 * f.slope_stderr;
  return est;
}

NondiffProbe nondiff_probe(std::span<const SamplePath> paths, double t0) {
  require_same_grid(paths);
  const TimeGrid& grid = paths.front().grid;
  const double dt = require_uniform(grid);
  const auto centre = grid.find(t0);
  if (!centre) throw GridMismatch("t0 is not a grid point");
  const std::size_t intervals = grid.size() - 1;
  const std::size_t i0 = *centre;
  if (i0 == 0 || i0 == intervals) throw ValidationError("t0 must be interior to the grid");
  const std::size_t room = std::min(i0, intervals - i0);
  const std::size_t m = kProbePointsPerSide;

  std::vector<std::size_t> spacings;  // grid steps between probe points, descending
  for (std::size_t s = 1; s * m <= room; s *= 2) spacings.insert(spacings.begin(), s);
  if (spacings.size() < 4) throw InsufficientResolution("fewer than 4 nested windows around t0");

  NondiffProbe probe;
  std::vector<double> eps, quot;
  for (std::size_t s : spacings) {
    double acc = 0.0;
    for (const auto& path : paths) {
      const double x0 = path.values[i0];
      double best = 0.0;
      for (std::size_t q = 1; q <= m; ++q) {
        const double h = dt * static_cast<double>(q * s);
        best = std::max(best, std::abs(path.values[i0 + q * s] - x0) / h);
        best = std::max(best, std::abs(path.values[i0 - q * s] - x0) / h);
      }
      acc += best;
    }
    const double e = dt * static_cast<double>(m * s);
    const double mean = acc / static_cast<double>(paths.size());
    probe.rows.push_back({e, mean});
    eps.push_back(e);
    quot.push_back(mean);
  }
  const LinearFit f = fit_loglog(eps, quot);
  probe.slope = f.slope;
  probe.slope_stderr = f.slope_stderr;
  return probe;
}

// ---------------------------------------------------------------------------

std::vector<double> srd_partial_sums(const ProcessSpec& spec, long long p, long long n_max) {
  if (p < 0) throw ValidationError("p must be a nonnegative integer");
  if (n_max < 10) throw ValidationError("n_max must be at least 10");
  std::vector<double> sums(static_cast<std::size_t>(n_max));
  long double acc = 0.0L;
  for (long long n = 1; n <= n_max; ++n) {
    acc += kernels::lag_cov_c_closed_form(spec, p, n);
    sums[static_cast<std::size_t>(n - 1)] = static_cast<double>(acc);
  }
  return sums;
}

LinearFit lag_cov_tail_slope(const ProcessSpec& spec, long long p, long long n_lo, long long n_hi,
                             std::size_t points) {
  if (n_lo < 1 || n_hi <= n_lo || points < 2) throw ValidationError("invalid lag range");
  std::vector<double> ns, cs;
  long long last = 0;
  for (double v : log_spaced(static_cast<double>(n_lo), static_cast<double>(n_hi), points)) {
    const long long n = std::llround(v);
    if (n == last) continue;
    last = n;
    ns.push_back(static_cast<double>(n));
    cs.push_back(std::abs(kernels::lag_cov_c_closed_form(spec, p, n)));
  }
  return fit_loglog(ns, cs);
}

LinearFit stationarity_gap_slope(const ProcessSpec& spec, long long n, double x_lo, double x_hi,
                                 std::size_t points) {
  if (!(x_lo > 0.0) || !(x_hi > x_lo) || points < 2) throw ValidationError("invalid x range");
  std::vector<double> xs = log_spaced(x_lo, x_hi, points), gs;
  for (double x : xs) gs.push_back(std::abs(kernels::stationarity_gap(spec, x, n)));
  return fit_loglog(xs, gs);
}

// ---------------------------------------------------------------------------

DimensionEstimate graph_box_dimension(const SamplePath& path, BoxCounts* counts) {
  require_uniform(path.grid);
  if (path.size() < (std::size_t{1} << 14)) throw InsufficientResolution("graph dimension needs >= 2^14 grid points");
  const std::size_t intervals = path.size() - 1;
  const auto [lo_it, hi_it] = std::minmax_element(path.values.begin(), path.values.end());
  const double lo = *lo_it, range = *hi_it - *lo_it;
  std::vector<double> y(path.size(), 0.0);
  if (range > 0.0) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = (path.values[i] - lo) / range;
  }

  // Columns must hold at least 16 samples so the sampled oscillation
  // approximates the continuous one.
  int k_hi = 0;
  while ((intervals >> (k_hi + 1)) >= 16) ++k_hi;
  const int k_lo = 4;
  if (k_hi - k_lo < 4) throw InsufficientResolution("fewer than 4 octaves of box sizes");

  BoxCounts bc;
  for (int k = k_lo; k <= k_hi; ++k) {
    const std::size_t cols = std::size_t{1} << k;
    const double boxes = static_cast<double>(cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t a = c * intervals / cols;
      const std::size_t b = std::min(intervals, ((c + 1) * intervals + cols - 1) / cols);
      double mn = y[a], mx = y[a];
      for (std::size_t i = a + 1; i <= b; ++i) {
        mn = std::min(mn, y[i]);
        mx = std::max(mx, y[i]);
      }
      const double top = std::min(std::floor(mx * boxes), boxes - 1.0);
      const double bottom = std::min(std::floor(mn * boxes), boxes - 1.0);
      total += top - bottom + 1.0;
    }
    bc.boxes_per_side.push_back(cols);
    bc.counts.push_back(total);
  }
  return fit_counts(bc, DimensionMethod::GraphBoxCount, counts);
}

DimensionEstimate level_set_box_dimension(const SamplePath& path, double x, double eps, BoxCounts* counts) {
  require_uniform(path.grid);
  if (!(eps > 0.0) || !(eps < path.grid.horizon())) throw ValidationError("eps must lie in (0, T)");
  if (!std::isfinite(x)) throw ValidationError("level must be finite");
  const auto times = path.grid.times();
  const std::size_t first =
      static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), eps * (1.0 - 1e-12)) - times.begin());
  const std::size_t segments = path.size() - 1 - first;

  std::vector<std::size_t> crossing;  // segment offsets from `first`
  for (std::size_t j = 0; j < segments; ++j) {
    const double a = path.values[first + j] - x, b = path.values[first + j + 1] - x;
    if ((a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0)) crossing.push_back(j);
  }
  if (crossing.empty()) throw LevelNotCrossed("the path does not cross the level on [eps, T]");

  int k_hi = 0;
  while ((segments >> (k_hi + 1)) >= 16) ++k_hi;
  const int k_lo = 3;
  if (k_hi - k_lo < 4) throw InsufficientResolution("fewer than 4 octaves of box sizes");

  BoxCounts bc;
  for (int k = k_lo; k <= k_hi; ++k) {
    const std::size_t boxes = std::size_t{1} << k;
    std::size_t last = boxes, total = 0;
    for (std::size_t j : crossing) {
      const std::size_t box = j * boxes / segments;
      if (box != last) {
        ++total;
        last = box;
      }
    }
    bc.boxes_per_side.push_back(boxes);
    bc.counts.push_back(static_cast<double>(total));
  }
  return fit_counts(bc, DimensionMethod::LevelSetBoxCount, counts);
}

DimensionEstimate range_dimension(const SamplePath& path, BoxCounts* counts) {
  const auto [lo_it, hi_it] = std::minmax_element(path.values.begin(), path.values.end());
  const double lo = *lo_it, range = *hi_it - *lo_it;
  constexpr int k_lo = 1, k_hi = 10;

  BoxCounts bc;
  for (int k = k_lo; k <= k_hi; ++k) {
    const std::size_t boxes = std::size_t{1} << k;
    std::vector<char> hit(boxes, 0);
    const double nb = static_cast<double>(boxes);
    auto box_of = [&](double v) {
      const double u = range > 0.0 ? (v - lo) / range : 0.0;
      return static_cast<std::size_t>(std::min(std::floor(u * nb), nb - 1.0));
    };
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      std::size_t a = box_of(path.values[i]), b = box_of(path.values[i + 1]);
      if (a > b) std::swap(a, b);
      std::fill(hit.begin() + static_cast<std::ptrdiff_t>(a), hit.begin() + static_cast<std::ptrdiff_t>(b) + 1, 1);
    }
    bc.boxes_per_side.push_back(boxes);
    bc.counts.push_back(static_cast<double>(std::count(hit.begin(), hit.end(), 1)));
  }
  return fit_counts(bc, DimensionMethod::RangeBoxCount, counts);
}

}  // namespace msfbm::analysis
