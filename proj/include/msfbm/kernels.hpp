#pragma once

#include <vector>

#include "msfbm/process_spec.hpp"

/// Closed-form second-order structure of the mixed sub-fractional Brownian
/// motion and of its comparators (fBm, sfBm, mixed fBm).
///
/// All functions are pure. Powers x^{2H} are evaluated as exp(2H log x) with
/// x = 0 mapped to 0, and differences of nearly equal powers are formed as
/// base^e * expm1(e * log1p(delta / base)) so that large-time evaluations do
/// not lose every significant digit to cancellation.
namespace msfbm::kernels {

/// 0 <= u < v <= s < t; the increments S_v - S_u and S_t - S_s.
struct IncrementWindow {
  double u, v, s, t;

  IncrementWindow(double u, double v, double s, double t);
};

struct IncrementBounds {
  double lower;
  double upper;
};

/// Per-component constants gamma_i <= nu_i of the two-sided increment bound.
struct IncrementBoundConstants {
  std::vector<double> gamma;
  std::vector<double> nu;
};

// Scalar building blocks.
double pow_abs(double x, double exponent);
/// (base + delta)^e - base^e for base >= 0, base + delta >= 0.
double pow_diff(double base, double delta, double exponent);
/// (c+1)^e - 2 c^e + (c-1)^e for c >= 1.
double second_difference(double c, double exponent);

double fbm_cov(double h, double s, double t);
double sfbm_cov(double h, double s, double t);

double msfbm_cov(const ProcessSpec& spec, double s, double t);
double msfbm_var(const ProcessSpec& spec, double t);
double mfbm_cov(const ProcessSpec& spec, double s, double t);

double increment_second_moment(const ProcessSpec& spec, double s, double t);
IncrementBoundConstants increment_bound_constants(const ProcessSpec& spec);
IncrementBounds increment_bounds(const ProcessSpec& spec, double s, double t);

/// Covariance of the increments over a window, single component with unit
/// coefficient. increment_cov is sum_i a_i^2 * component_increment_cov(H_i, w).
double component_increment_cov(double h, const IncrementWindow& w);
double increment_cov(const ProcessSpec& spec, const IncrementWindow& w);

/// C(x, n): covariance of the unit increments starting at x and x + n.
/// Integral x uses the six-term closed form and cross-checks it against the
/// window form; real x uses the window form.
double lag_cov_c(const ProcessSpec& spec, double x, long long n);
double lag_cov_c_closed_form(const ProcessSpec& spec, long long p, long long n);
double lag_cov_c_window(const ProcessSpec& spec, double x, long long n);
double lag_cov_c_asymptotic(const ProcessSpec& spec, long long p, long long n);

/// R(0, n) for the mixed fBm with the same (a, H).
double mfbm_lag_cov_r(const ProcessSpec& spec, long long n);
double stationarity_gap(const ProcessSpec& spec, double x, long long n);

/// Cov(s,u) Var(t) - Cov(s,t) Cov(t,u); vanishes identically iff Markov.
double markov_residual(const ProcessSpec& spec, double s, double t, double u);
/// Var(S_t | S_s) = Var(t) - Cov(s,t)^2 / Var(s).
double conditional_variance(const ProcessSpec& spec, double t, double s);

/// a_i -> a_i h^{H_i}: Cov at (h s, h t) equals the rescaled Cov at (s, t).
ProcessSpec rescale_coeffs(const ProcessSpec& spec, double h);

}  // namespace msfbm::kernels
