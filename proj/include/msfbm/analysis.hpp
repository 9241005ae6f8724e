#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "msfbm/grid.hpp"
#include "msfbm/process_spec.hpp"
#include "msfbm/sampler.hpp"

/// Estimators that confront simulated paths with the sample-path theory:
/// covariance, p-variation, Hoelder regularity, non-differentiability,
/// short-range dependence and box-counting dimensions.
///
/// Box-counting dimension stands in for Hausdorff dimension throughout. All
/// slopes are ordinary least squares on log-log points, with the standard
/// error taken from the residuals.
namespace msfbm::analysis {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// OLS of y on x; needs at least 2 points (stderr is 0 with exactly 2).
LinearFit fit_line(std::span<const double> x, std::span<const double> y);
/// OLS of log y on log x.
LinearFit fit_loglog(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Covariance

struct CovEstimate {
  double estimate = 0.0;
  double stderr = 0.0;  // sqrt((G_jj G_kk + G_jk^2) / n) from the theory Gram
  double zscore = 0.0;  // (estimate - theory) / stderr, 0 when stderr is 0
};

/// Unbiased sample covariance of columns j and k (grid indices) across
/// replicas. Throws InsufficientReplicas when n_reps < 2.
CovEstimate empirical_cov(const Ensemble& ens, std::size_t j, std::size_t k);

/// Unbiased sample covariance matrix over grid indices 1..n-1.
Eigen::MatrixXd empirical_cov_matrix(std::span<const SamplePath> paths);

/// Largest |z| over entries when comparing two ensembles' empirical
/// covariance matrices, with pooled Gaussian-moment standard errors
/// sqrt(se_a^2 + se_b^2) built from each ensemble's own estimates.
double max_pooled_cov_zscore(std::span<const SamplePath> a, std::span<const SamplePath> b);

// ---------------------------------------------------------------------------
// Variation

/// A_{n,p} = sum_{j=1}^{n} |S(jT/n) - S((j-1)T/n)|^p over the uniform
/// partition of [0, T] into n_sub intervals. The grid must contain every
/// partition point; otherwise GridMismatch.
double p_variation_stat(const SamplePath& path, double p, std::size_t n_sub);

struct VariationReport {
  double p = 2.0;
  std::vector<std::size_t> partition_sizes;
  std::vector<double> statistics;        // ensemble mean of A_{n,p}
  std::vector<double> statistic_stderrs;  // standard error of each mean
  double fitted_log_slope = 0.0;
  double slope_stderr = 0.0;
};

/// Mean A_{n,p} over n = 2^m, m in `levels`, on [0, 1], from n_reps paths
/// simulated on the finest partition.
VariationReport qv_scaling_exponent(const ProcessSpec& spec, std::span<const int> levels,
                                    std::size_t n_reps, std::uint64_t master_seed, double p = 2.0,
                                    const EnsembleOptions& options = {});

/// Same statistic on already simulated paths (grid must contain 2^max(levels)
/// uniform intervals).
VariationReport variation_report(std::span<const SamplePath> paths, std::span<const int> levels,
                                 double p = 2.0);

// ---------------------------------------------------------------------------
// Regularity

struct HolderEstimate {
  double h_hat = 0.0;
  double stderr = 0.0;
  std::vector<double> lags;       // time lags
  std::vector<double> variogram;  // mean squared increment per lag
};

/// Lags of the variogram regression: 1..10 grid steps (one decade).
inline constexpr std::size_t kVariogramLags = 10;

/// Variogram regression over the smallest decade of lags; h_hat is half the
/// log-log slope. Needs a uniform grid with >= 2^8 points and >= 100 paths.
HolderEstimate holder_exponent_estimate(std::span<const SamplePath> paths);
inline HolderEstimate holder_exponent_estimate(const Ensemble& ens) {
  return holder_exponent_estimate(ens.paths);
}

struct NondiffRow {
  double eps;
  double mean_max_quotient;
};

struct NondiffProbe {
  std::vector<NondiffRow> rows;  // eps descending
  double slope = 0.0;            // d log quotient / d log eps
  double slope_stderr = 0.0;
};

/// Sampled points per side of t0 in each window; the supremum of the
/// difference quotient over [t0 - eps, t0 + eps] is taken over t0 +- q eps / M,
/// q = 1..M, so every window is resolved at the same relative scale.
inline constexpr std::size_t kProbePointsPerSide = 4;

/// Ensemble mean of max |S(t) - S(t0)| / |t - t0| on nested windows.
/// Needs a uniform grid, t0 an interior grid point and >= 4 windows.
NondiffProbe nondiff_probe(std::span<const SamplePath> paths, double t0);
inline NondiffProbe nondiff_probe(const Ensemble& ens, double t0) { return nondiff_probe(ens.paths, t0); }

// ---------------------------------------------------------------------------
// Short-range dependence

/// sum_{n=1}^{m} C(p, n) for m = 1..n_max (n_max >= 10).
std::vector<double> srd_partial_sums(const ProcessSpec& spec, long long p, long long n_max);

/// Log-log slope of |C(p, n)| over `points` log-spaced lags in [n_lo, n_hi].
LinearFit lag_cov_tail_slope(const ProcessSpec& spec, long long p, long long n_lo, long long n_hi,
                             std::size_t points = 41);

/// Log-log slope of |stationarity_gap(x, n)| over log-spaced x in [x_lo, x_hi].
LinearFit stationarity_gap_slope(const ProcessSpec& spec, long long n, double x_lo, double x_hi,
                                 std::size_t points = 41);

// ---------------------------------------------------------------------------
// Dimensions

enum class DimensionMethod { GraphBoxCount, LevelSetBoxCount, RangeBoxCount };

struct DimensionEstimate {
  double value = 0.0;
  double stderr = 0.0;
  std::pair<std::size_t, std::size_t> scale_range{0, 0};  // boxes per unit, coarse and fine
  DimensionMethod method = DimensionMethod::GraphBoxCount;
};

/// Box counts per dyadic scale; exposed for plotting.
struct BoxCounts {
  std::vector<std::size_t> boxes_per_side;
  std::vector<double> counts;
};

/// Graph {(t, S_t)} rescaled to the unit square; columns of width 2^-k hold
/// floor(max/d) - floor(min/d) + 1 boxes of side d = 2^-k, endpoints of the
/// neighbouring column included. Needs a uniform grid with >= 2^14 points.
DimensionEstimate graph_box_dimension(const SamplePath& path, BoxCounts* counts = nullptr);

/// Dyadic time boxes of [eps, T] containing a sign change of S - x. Throws
/// LevelNotCrossed when S - x keeps one sign on [eps, T].
DimensionEstimate level_set_box_dimension(const SamplePath& path, double x, double eps,
                                          BoxCounts* counts = nullptr);

/// Boxes of side 2^-k (relative to the path's range) met by the image of the
/// linearly interpolated path; 0 for a constant path.
DimensionEstimate range_dimension(const SamplePath& path, BoxCounts* counts = nullptr);

double median(std::vector<double> values);

}  // namespace msfbm::analysis
