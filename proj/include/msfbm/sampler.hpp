#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "msfbm/grid.hpp"
#include "msfbm/linalg.hpp"
#include "msfbm/process_spec.hpp"
#include "msfbm/rng.hpp"

namespace msfbm {

/// G[j,k] = Cov(S_{t_{j+1}}, S_{t_{k+1}}); the t = 0 row is left out.
Eigen::MatrixXd gram_matrix(const ProcessSpec& spec, const TimeGrid& grid);

enum class SamplerMethod {
  Exact,            // factor of the msfBm Gram matrix
  ViaFbmDense,      // xi = (B_t + B_{-t}) / sqrt 2 with dense fBm factors
  ViaFbmCirculant,  // same construction, fBm from circulant-embedded fGn
};

std::string to_string(SamplerMethod m);

/// Largest grid (points, including t = 0) that is factored densely by the
/// automatic routing; larger uniform grids go through the circulant route.
inline constexpr std::size_t kDefaultDenseLimit = 4096;

/// Prepared exact sampler. Construction does the O(n^3) work once; draw()
/// is a pure function of the seed and safe to call concurrently.
class ExactSampler {
 public:
  ExactSampler(const ProcessSpec& spec, const TimeGrid& grid, const JitterPolicy& jitter = {});

  SamplePath draw(std::uint64_t seed) const;
  const TimeGrid& grid() const noexcept { return grid_; }
  const PsdFactor& factor() const noexcept { return factor_; }

 private:
  TimeGrid grid_;
  PsdFactor factor_;
};

/// Prepared sampler through the driving fractional Brownian motions on the
/// symmetric grid {-t_{n-1}, ..., -t_1, t_1, ..., t_{n-1}}.
class FbmSampler {
 public:
  /// `circulant` requires a uniform grid.
  FbmSampler(const ProcessSpec& spec, const TimeGrid& grid, bool circulant,
             const JitterPolicy& jitter = {});

  SamplePath draw(std::uint64_t seed) const;
  SamplerMethod method() const noexcept {
    return circulant_ ? SamplerMethod::ViaFbmCirculant : SamplerMethod::ViaFbmDense;
  }
  /// Largest jitter used by the dense per-component factors.
  double max_jitter() const noexcept { return max_jitter_; }

 private:
  struct Component {
    double coeff;
    double hurst;
    Eigen::MatrixXd lower;             // dense route
    std::vector<double> sqrt_spectrum;  // circulant route: sqrt(lambda_k / m)
  };

  std::vector<double> draw_fbm(const Component& c, rng::NormalStream& normals) const;

  ProcessSpec spec_;
  TimeGrid grid_;
  bool circulant_;
  double step_ = 0.0;
  std::size_t embedding_ = 0;
  double max_jitter_ = 0.0;
  std::vector<Component> components_;
};

SamplePath sample_exact(const ProcessSpec& spec, const TimeGrid& grid, std::uint64_t seed,
                        const JitterPolicy& jitter = {});

enum class FbmRoute { Auto, Dense, Circulant };

SamplePath sample_via_fbm(const ProcessSpec& spec, const TimeGrid& grid, std::uint64_t seed,
                          FbmRoute route = FbmRoute::Auto,
                          std::size_t dense_limit = kDefaultDenseLimit);

struct EnsembleOptions {
  enum class Route { Auto, Exact, ViaFbm } route = Route::Auto;
  std::size_t dense_limit = kDefaultDenseLimit;
  /// 0: MSFBM_THREADS if set, else hardware concurrency.
  unsigned threads = 0;
  JitterPolicy jitter{};
};

/// n_reps i.i.d. paths. Path k uses rng::replica_seed(master_seed, k); the
/// result does not depend on the thread count.
struct Ensemble {
  ProcessSpec spec;
  TimeGrid grid;
  std::vector<SamplePath> paths;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> replica_seeds;
  SamplerMethod method = SamplerMethod::Exact;
  double jitter = 0.0;

  std::size_t n_reps() const noexcept { return paths.size(); }
};

Ensemble sample_ensemble(const ProcessSpec& spec, const TimeGrid& grid, std::size_t n_reps,
                         std::uint64_t master_seed, const EnsembleOptions& options = {});

/// Thread count from MSFBM_THREADS (>= 1), else std::thread::hardware_concurrency.
unsigned default_thread_count();

}  // namespace msfbm
