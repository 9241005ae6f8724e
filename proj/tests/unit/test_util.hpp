#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "msfbm/process_spec.hpp"

namespace msfbm::test {

/// |a - b| / max(|a|, |b|, scale). `scale` is the magnitude of the terms
/// that were summed to produce a and b; for well-conditioned values it is
/// dominated by |a| and this is the plain relative error.
inline double rel_err(double a, double b, double scale = 0.0) {
  const double denom = std::max({std::abs(a), std::abs(b), std::abs(scale)});
  if (denom == 0.0) return 0.0;
  return std::abs(a - b) / denom;
}

/// Sum of a_i^2 t^{2 H_i}: size of a covariance value at time t.
inline double cov_scale(const ProcessSpec& spec, double t) {
  double acc = 0.0;
  for (std::size_t i : spec.active_set()) {
    acc += spec.coeff(i) * spec.coeff(i) * std::pow(t, 2.0 * spec.hurst(i));
  }
  return acc;
}

class Draws {
 public:
  explicit Draws(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  /// N <= 4 components, H in (0.05, 0.95), |a| <= 10, at least one a_i != 0.
  ProcessSpec spec(std::size_t max_n = 4, double h_lo = 0.05, double h_hi = 0.95) {
    const auto n = static_cast<std::size_t>(integer(1, static_cast<int>(max_n)));
    std::vector<double> a(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = uniform(-10.0, 10.0);
      h[i] = uniform(h_lo, h_hi);
    }
    return ProcessSpec(std::move(a), std::move(h));
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace msfbm::test
