#include "msfbm/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "msfbm/errors.hpp"

namespace msfbm::kernels {

namespace {

// Internal evaluation type. Kernel sums cancel heavily at large times, so the
// terms are accumulated in extended precision and rounded once on return.
using real = long double;

real pow_abs_ext(real x, real e) {
  x = std::fabs(x);
  if (x == 0.0L) return 0.0L;
  if (e == 1.0L) return x;
  return std::exp(e * std::log(x));
}

// (base + delta)^e - base^e, base >= 0, base + delta >= 0.
real pow_diff_ext(real base, real delta, real e) {
  if (e == 1.0L) return delta;
  if (base == 0.0L) return pow_abs_ext(delta, e);
  if (base + delta == 0.0L) return -pow_abs_ext(base, e);
  return pow_abs_ext(base, e) * std::expm1(e * std::log1p(delta / base));
}

// (c+1)^e - 2c^e + (c-1)^e, c >= 1. At c = 1, log1p(-1) = -inf and
// expm1(-inf) = -1, which is the (c-1)^e = 0 term.
real second_difference_ext(real c, real e) {
  if (e == 1.0L) return 0.0L;
  return pow_abs_ext(c, e) *
         (std::expm1(e * std::log1p(1.0L / c)) + std::expm1(e * std::log1p(-1.0L / c)));
}

// Unit-coefficient sfBm covariance, Eq. (4) regrouped as
// lo^e - ((hi+lo)^e - hi^e + (hi-lo)^e - hi^e) / 2.
real sfbm_cov_ext(real e, real s, real t) {
  const real lo = std::min(s, t);
  const real hi = std::max(s, t);
  if (lo == 0.0L) return 0.0L;
  return pow_abs_ext(lo, e) - 0.5L * (pow_diff_ext(hi, lo, e) + pow_diff_ext(hi, -lo, e));
}

real sfbm_var_ext(real e, real t) {
  return (2.0L - std::exp2(e - 1.0L)) * pow_abs_ext(t, e);
}

// Eq. (14) per component, regrouped around s with d = t - s:
// 2^e [ (s + d/2)^e - (s^e + (s+d)^e)/2 ] + d^e.
real increment_moment_ext(real e, real s, real t) {
  if (e == 1.0L) return t - s;
  const real d = t - s;
  if (s == 0.0L) return sfbm_var_ext(e, t);
  return std::exp2(e) * (pow_diff_ext(s, 0.5L * d, e) - 0.5L * pow_diff_ext(s, d, e)) +
         pow_abs_ext(d, e);
}

// Far-field expansions. For x^e with a >> offsets,
//   f(a+h+k) - f(a+h) - f(a+k) + f(a) = sum_{j>=2} C(e,j) a^{e-j} ((h+k)^j - h^j - k^j),
// so differences of such mixed differences at two bases reduce to sums of
// pow_diff terms, each accurate to a few ulps.
constexpr real kSeriesRatio = 8.0L;
constexpr int kSeriesMaxTerms = 400;

// sum_{j>=2} C(e,j) ((h+k)^j - h^j - k^j) (lo^{e-j} - hi^{e-j}), hi = lo + gap.
real mixed_difference_series(real e, real lo, real gap, real h, real k) {
  real binom = e;  // C(e,1)
  real acc = 0.0L;
  real hk = h + k, hp = h, kp = k, hkp = hk;
  for (int j = 2; j < kSeriesMaxTerms; ++j) {
    binom *= (e - (j - 1)) / j;
    hkp *= hk;
    hp *= h;
    kp *= k;
    const real term = binom * (hkp - hp - kp) * -pow_diff_ext(lo, gap, e - j);
    acc += term;
    if (std::fabs(term) <= 1e-22L * std::fabs(acc)) break;
  }
  return acc;
}

// sum over even j >= 2 of 2 C(e,j) (near^{e-j} - far^{e-j}) = D2(near) - D2(far).
real second_difference_gap_series(real e, real near, real far) {
  real binom = e;
  real acc = 0.0L;
  for (int j = 2; j < kSeriesMaxTerms; ++j) {
    binom *= (e - (j - 1)) / j;
    if (j % 2 != 0) continue;
    const real term = 2.0L * binom * -pow_diff_ext(near, far - near, e - j);
    acc += term;
    if (std::fabs(term) <= 1e-22L * std::fabs(acc)) break;
  }
  return acc;
}

// Eq. (18) per component. The eight powers form two mixed second
// differences, at bases s - v and s + u with steps t - s and v - u; far
// from the origin they are expanded, otherwise paired by equal offset.
real increment_cov_ext(real e, const IncrementWindow& w) {
  const real u = w.u, v = w.v, s = w.s, t = w.t;
  const real delta = v - u;
  const real step = t - s;
  if (s - v >= kSeriesRatio * (step + delta)) {
    return 0.5L * mixed_difference_series(e, s - v, u + v, step, delta);
  }
  const real near = pow_diff_ext(t - v, delta, e) - pow_diff_ext(s - v, delta, e);
  const real far = pow_diff_ext(s + u, delta, e) - pow_diff_ext(t + u, delta, e);
  return 0.5L * (near + far);
}

void check_nonneg_time(double t, const char* what) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw ValidationError(std::string(what) + " must be a finite nonnegative time");
  }
}

void check_ordered(double s, double t) {
  check_nonneg_time(s, "s");
  check_nonneg_time(t, "t");
  if (s > t) throw ValidationError("increment requires s <= t");
}

void check_lag(long long n) {
  if (n < 1) throw ValidationError("lag n must be >= 1 (n = 0 overlaps the increments)");
}

real weight(const ProcessSpec& spec, std::size_t i) {
  const real a = spec.coeff(i);
  return a * a;
}

real exponent(const ProcessSpec& spec, std::size_t i) {
  return 2.0L * static_cast<real>(spec.hurst(i));
}

}  // namespace

IncrementWindow::IncrementWindow(double u_, double v_, double s_, double t_)
    : u(u_), v(v_), s(s_), t(t_) {
  if (!(std::isfinite(u) && std::isfinite(v) && std::isfinite(s) && std::isfinite(t))) {
    throw ValidationError("increment window entries must be finite");
  }
  if (!(0.0 <= u && u < v && v <= s && s < t)) {
    throw ValidationError("increment window must satisfy 0 <= u < v <= s < t");
  }
}

double pow_abs(double x, double exponent) {
  return static_cast<double>(pow_abs_ext(x, exponent));
}

double pow_diff(double base, double delta, double exponent) {
  return static_cast<double>(pow_diff_ext(base, delta, exponent));
}

double second_difference(double c, double exponent) {
  if (!(c >= 1.0)) throw ValidationError("second difference needs c >= 1");
  return static_cast<double>(second_difference_ext(c, exponent));
}

double fbm_cov(double h, double s, double t) {
  check_hurst(h);
  const real e = 2.0L * h;
  return static_cast<double>(0.5L * (pow_abs_ext(t, e) + pow_abs_ext(s, e) -
                                     pow_abs_ext(static_cast<real>(t) - s, e)));
}

double sfbm_cov(double h, double s, double t) {
  check_hurst(h);
  check_nonneg_time(s, "s");
  check_nonneg_time(t, "t");
  return static_cast<double>(sfbm_cov_ext(2.0L * h, s, t));
}

double msfbm_cov(const ProcessSpec& spec, double s, double t) {
  check_nonneg_time(s, "s");
  check_nonneg_time(t, "t");
  real acc = 0.0L;
  for (std::size_t i : spec.active_set()) acc += weight(spec, i) * sfbm_cov_ext(exponent(spec, i), s, t);
  return static_cast<double>(acc);
}

double msfbm_var(const ProcessSpec& spec, double t) {
  check_nonneg_time(t, "t");
  real acc = 0.0L;
  for (std::size_t i : spec.active_set()) acc += weight(spec, i) * sfbm_var_ext(exponent(spec, i), t);
  return static_cast<double>(acc);
}

double mfbm_cov(const ProcessSpec& spec, double s, double t) {
  check_nonneg_time(s, "s");
  check_nonneg_time(t, "t");
  real acc = 0.0L;
  for (std::size_t i : spec.active_set()) {
    const real e = exponent(spec, i);
    acc += weight(spec, i) * 0.5L *
           (pow_abs_ext(t, e) + pow_abs_ext(s, e) - pow_abs_ext(static_cast<real>(t) - s, e));
  }
  return static_cast<double>(acc);
}

double increment_second_moment(const ProcessSpec& spec, double s, double t) {
  check_ordered(s, t);
  if (s == t) return 0.0;
  real acc = 0.0L;
  for (std::size_t i : spec.active_set()) {
    acc += weight(spec, i) * increment_moment_ext(exponent(spec, i), s, t);
  }
  return static_cast<double>(acc);
}

IncrementBoundConstants increment_bound_constants(const ProcessSpec& spec) {
  IncrementBoundConstants k;
  k.gamma.reserve(spec.size());
  k.nu.reserve(spec.size());
  for (double h : spec.hurst()) {
    const double c = static_cast<double>(2.0L - std::exp2(2.0L * h - 1.0L));
    if (h > 0.5) {
      k.gamma.push_back(c);
      k.nu.push_back(1.0);
    } else {
      k.gamma.push_back(1.0);
      k.nu.push_back(c);
    }
  }
  return k;
}

IncrementBounds increment_bounds(const ProcessSpec& spec, double s, double t) {
  check_ordered(s, t);
  const auto k = increment_bound_constants(spec);
  const real d = static_cast<real>(t) - s;
  real lower = 0.0L;
  real upper = 0.0L;
  for (std::size_t i : spec.active_set()) {
    const real p = pow_abs_ext(d, exponent(spec, i));
    lower += weight(spec, i) * (k.gamma[i] * p);
    upper += weight(spec, i) * (k.nu[i] * p);
  }
  return {static_cast<double>(lower), static_cast<double>(upper)};
}

double component_increment_cov(double h, const IncrementWindow& w) {
  check_hurst(h);
  return static_cast<double>(increment_cov_ext(2.0L * h, w));
}

double increment_cov(const ProcessSpec& spec, const IncrementWindow& w) {
  real acc = 0.0L;
  for (std::size_t i : spec.active_set()) acc += weight(spec, i) * increment_cov_ext(exponent(spec, i), w);
  return static_cast<double>(acc);
}

double lag_cov_c_window(const ProcessSpec& spec, double x, long long n) {
  check_lag(n);
  check_nonneg_time(x, "x");
  const double nn = static_cast<double>(n);
  return increment_cov(spec, IncrementWindow(x, x + 1.0, x + nn, x + nn + 1.0));
}

double lag_cov_c_closed_form(const ProcessSpec& spec, long long p, long long n) {
  check_lag(n);
  if (p < 0) throw ValidationError("p must be a nonnegative integer");
  const real near = static_cast<real>(n);
  const real far = static_cast<real>(2 * p + n + 1);
  real acc = 0.0L;
  for (std::size_t i : spec.active_set()) {
    const real e = exponent(spec, i);
    const real gap = near >= kSeriesRatio ? second_difference_gap_series(e, near, far)
                                          : second_difference_ext(near, e) - second_difference_ext(far, e);
    acc += weight(spec, i) * 0.5L * gap;
  }
  return static_cast<double>(acc);
}

double lag_cov_c(const ProcessSpec& spec, double x, long long n) {
  check_lag(n);
  check_nonneg_time(x, "x");
  if (x == std::floor(x) && x < 4.0e15) {
    const double closed = lag_cov_c_closed_form(spec, static_cast<long long>(x), n);
    assert(std::abs(closed - lag_cov_c_window(spec, x, n)) <=
           1e-9 * std::max(1e-300, std::abs(closed)) + 1e-15);
    return closed;
  }
  return lag_cov_c_window(spec, x, n);
}

double lag_cov_c_asymptotic(const ProcessSpec& spec, long long p, long long n) {
  check_lag(n);
  if (p < 0) throw ValidationError("p must be a nonnegative integer");
  real acc = 0.0L;
  for (std::size_t i : spec.active_set()) {
    const real h = spec.hurst(i);
    acc += 2.0L * (1.0L - h) * h * (2.0L * h - 1.0L) * static_cast<real>(2 * p + 1) * weight(spec, i) *
           std::pow(static_cast<real>(n), 2.0L * h - 3.0L);
  }
  return static_cast<double>(acc);
}

double mfbm_lag_cov_r(const ProcessSpec& spec, long long n) {
  check_lag(n);
  real acc = 0.0L;
  for (std::size_t i : spec.active_set()) {
    acc += weight(spec, i) * 0.5L * second_difference_ext(static_cast<real>(n), exponent(spec, i));
  }
  return static_cast<double>(acc);
}

double stationarity_gap(const ProcessSpec& spec, double x, long long n) {
  return lag_cov_c(spec, x, n) - mfbm_lag_cov_r(spec, n);
}

double markov_residual(const ProcessSpec& spec, double s, double t, double u) {
  if (!(std::isfinite(s) && std::isfinite(t) && std::isfinite(u))) {
    throw ValidationError("markov triple must be finite");
  }
  if (!(0.0 < s && s < t && t < u)) throw ValidationError("markov triple must satisfy 0 < s < t < u");
  real cov_su = 0.0L, cov_st = 0.0L, cov_tu = 0.0L, var_t = 0.0L;
  for (std::size_t i : spec.active_set()) {
    const real e = exponent(spec, i);
    const real w = weight(spec, i);
    cov_su += w * sfbm_cov_ext(e, s, u);
    cov_st += w * sfbm_cov_ext(e, s, t);
    cov_tu += w * sfbm_cov_ext(e, t, u);
    var_t += w * sfbm_var_ext(e, t);
  }
  return static_cast<double>(cov_su * var_t - cov_st * cov_tu);
}

double conditional_variance(const ProcessSpec& spec, double t, double s) {
  if (!(std::isfinite(s) && std::isfinite(t))) throw ValidationError("times must be finite");
  if (!(s > 0.0)) throw ValidationError("conditioning time s must be > 0 (S_0 has zero variance)");
  if (!(t > 0.0)) throw ValidationError("t must be > 0");
  if (s == t) return 0.0;
  real cov = 0.0L, var_s = 0.0L, var_t = 0.0L;
  for (std::size_t i : spec.active_set()) {
    const real e = exponent(spec, i);
    const real w = weight(spec, i);
    cov += w * sfbm_cov_ext(e, s, t);
    var_s += w * sfbm_var_ext(e, s);
    var_t += w * sfbm_var_ext(e, t);
  }
  return static_cast<double>(std::max(0.0L, var_t - cov * cov / var_s));
}

ProcessSpec rescale_coeffs(const ProcessSpec& spec, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("rescaling factor h must be > 0");
  std::vector<double> coeffs(spec.coeffs().begin(), spec.coeffs().end());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    coeffs[i] = static_cast<double>(coeffs[i] * std::pow(static_cast<real>(h), static_cast<real>(spec.hurst(i))));
  }
  return ProcessSpec(std::move(coeffs), {spec.hurst().begin(), spec.hurst().end()}, spec.half_tolerance());
}

}  // namespace msfbm::kernels
