#include "msfbm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <optional>
#include <thread>

#include <unsupported/Eigen/FFT>

#include "msfbm/errors.hpp"
#include "msfbm/kernels.hpp"

namespace msfbm {

Eigen::MatrixXd gram_matrix(const ProcessSpec& spec, const TimeGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size() - 1);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k <= j; ++k) {
      const double c = kernels::msfbm_cov(spec, grid[j + 1], grid[k + 1]);
      g(j, k) = c;
      g(k, j) = c;
    }
  }
  return g;
}

std::string to_string(SamplerMethod m) {
  switch (m) {
    case SamplerMethod::Exact: return "exact";
    case SamplerMethod::ViaFbmDense: return "via_fbm_dense";
    case SamplerMethod::ViaFbmCirculant: return "via_fbm_circulant";
  }
  return "unknown";
}

ExactSampler::ExactSampler(const ProcessSpec& spec, const TimeGrid& grid, const JitterPolicy& jitter)
    : grid_(grid), factor_(psd_factor(gram_matrix(spec, grid), jitter)) {}

SamplePath ExactSampler::draw(std::uint64_t seed) const {
  rng::NormalStream normals(seed);
  Eigen::VectorXd z(factor_.lower.rows());
  normals.fill({z.data(), static_cast<std::size_t>(z.size())});
  const Eigen::VectorXd x = factor_.lower.triangularView<Eigen::Lower>() * z;
  std::vector<double> values(grid_.size(), 0.0);
  std::copy(x.data(), x.data() + x.size(), values.begin() + 1);
  return SamplePath(grid_, std::move(values));
}

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

// Circulant embedding of unit-step fractional Gaussian noise. Returns
// sqrt(lambda_k / m) for the eigenvalues lambda_k of the m x m circulant.
std::vector<double> fgn_sqrt_spectrum(double hurst, std::size_t m) {
  const double e = 2.0 * hurst;
  std::vector<std::complex<double>> row(m);
  for (std::size_t k = 0; k <= m / 2; ++k) {
    const double gamma = k == 0 ? 1.0 : 0.5 * kernels::second_difference(static_cast<double>(k), e);
    row[k] = gamma;
    if (k != 0 && k != m / 2) row[m - k] = gamma;
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, row);
  double top = 0.0;
  for (const auto& l : spectrum) top = std::max(top, l.real());
  std::vector<double> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    double lambda = spectrum[k].real();
    if (lambda < 0.0) {
      if (lambda < -1e-10 * top) {
        throw FactorizationFailure("circulant embedding has a negative eigenvalue for H = " +
                                   std::to_string(hurst));
      }
      lambda = 0.0;
    }
    out[k] = std::sqrt(lambda / static_cast<double>(m));
  }
  return out;
}

}  // namespace

FbmSampler::FbmSampler(const ProcessSpec& spec, const TimeGrid& grid, bool circulant,
                       const JitterPolicy& jitter)
    : spec_(spec), grid_(grid), circulant_(circulant) {
  const std::size_t half = grid.size() - 1;
  if (circulant_) {
    auto step = grid.uniform_step();
    if (!step) throw ValidationError("circulant fBm route needs a uniform grid");
    step_ = *step;
    embedding_ = next_pow2(4 * half);
  }
  for (std::size_t i : spec.active_set()) {
    Component c{spec.coeff(i), spec.hurst(i), {}, {}};
    if (circulant_) {
      c.sqrt_spectrum = fgn_sqrt_spectrum(c.hurst, embedding_);
    } else {
      // positive times first, then their mirror images
      std::vector<double> pts(2 * half);
      for (std::size_t j = 0; j < half; ++j) {
        pts[j] = grid[j + 1];
        pts[half + j] = -grid[j + 1];
      }
      const auto n = static_cast<Eigen::Index>(pts.size());
      Eigen::MatrixXd g(n, n);
      for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b <= a; ++b) {
          g(a, b) = g(b, a) = kernels::fbm_cov(c.hurst, pts[a], pts[b]);
        }
      }
      auto f = psd_factor(g, jitter);
      max_jitter_ = std::max(max_jitter_, f.jitter);
      c.lower = std::move(f.lower);
    }
    components_.push_back(std::move(c));
  }
}

// fBm values at t_1..t_{n-1} followed by -t_1..-t_{n-1}.
std::vector<double> FbmSampler::draw_fbm(const Component& c, rng::NormalStream& normals) const {
  const std::size_t half = grid_.size() - 1;
  std::vector<double> out(2 * half);
  if (!circulant_) {
    Eigen::VectorXd z(c.lower.rows());
    normals.fill({z.data(), static_cast<std::size_t>(z.size())});
    const Eigen::VectorXd b = c.lower.triangularView<Eigen::Lower>() * z;
    std::copy(b.data(), b.data() + b.size(), out.begin());
    return out;
  }

  const std::size_t m = embedding_;
  std::vector<std::complex<double>> weighted(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double re = normals();
    const double im = normals();
    weighted[k] = c.sqrt_spectrum[k] * std::complex<double>(re, im);
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> noise;
  fft.fwd(noise, weighted);

  // Lattice tau_k = (k - half) * step, k = 0..2 half; W_k partial sums of fGn.
  const double scale = std::pow(step_, c.hurst);
  std::vector<double> walk(2 * half + 1, 0.0);
  for (std::size_t k = 1; k <= 2 * half; ++k) walk[k] = walk[k - 1] + scale * noise[k - 1].real();
  const double origin = walk[half];
  for (std::size_t j = 0; j < half; ++j) {
    out[j] = walk[half + j + 1] - origin;
    out[half + j] = walk[half - j - 1] - origin;
  }
  return out;
}

SamplePath FbmSampler::draw(std::uint64_t seed) const {
  rng::NormalStream normals(seed);
  const std::size_t half = grid_.size() - 1;
  std::vector<double> values(grid_.size(), 0.0);
  for (const auto& c : components_) {
    const auto b = draw_fbm(c, normals);
    for (std::size_t j = 0; j < half; ++j) {
      values[j + 1] += c.coeff * ((b[j] + b[half + j]) / std::sqrt(2.0));
    }
  }
  return SamplePath(grid_, std::move(values));
}

SamplePath sample_exact(const ProcessSpec& spec, const TimeGrid& grid, std::uint64_t seed,
                        const JitterPolicy& jitter) {
  return ExactSampler(spec, grid, jitter).draw(seed);
}

namespace {

bool use_circulant(const TimeGrid& grid, FbmRoute route, std::size_t dense_limit) {
  switch (route) {
    case FbmRoute::Dense: return false;
    case FbmRoute::Circulant: return true;
    case FbmRoute::Auto: return grid.size() > dense_limit && grid.is_uniform();
  }
  return false;
}

}  // namespace

SamplePath sample_via_fbm(const ProcessSpec& spec, const TimeGrid& grid, std::uint64_t seed,
                          FbmRoute route, std::size_t dense_limit) {
  return FbmSampler(spec, grid, use_circulant(grid, route, dense_limit)).draw(seed);
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("MSFBM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Ensemble sample_ensemble(const ProcessSpec& spec, const TimeGrid& grid, std::size_t n_reps,
                         std::uint64_t master_seed, const EnsembleOptions& options) {
  if (n_reps < 1) throw ValidationError("n_reps must be >= 1");

  using Route = EnsembleOptions::Route;
  bool exact = options.route == Route::Exact;
  if (options.route == Route::Auto) {
    exact = grid.size() <= options.dense_limit || !grid.is_uniform();
  }

  std::optional<ExactSampler> exact_sampler;
  std::optional<FbmSampler> fbm_sampler;
  Ensemble ens{spec, grid, {}, master_seed, {}, SamplerMethod::Exact, 0.0};
  if (exact) {
    exact_sampler.emplace(spec, grid, options.jitter);
    ens.jitter = exact_sampler->factor().jitter;
  } else {
    const bool circulant = use_circulant(grid, FbmRoute::Auto, options.dense_limit / 2);
    fbm_sampler.emplace(spec, grid, circulant, options.jitter);
    ens.method = fbm_sampler->method();
    ens.jitter = fbm_sampler->max_jitter();
  }

  ens.replica_seeds.resize(n_reps);
  for (std::size_t k = 0; k < n_reps; ++k) ens.replica_seeds[k] = rng::replica_seed(master_seed, k);

  std::vector<std::optional<SamplePath>> slots(n_reps);
  auto work = [&](std::size_t k) {
    slots[k] = exact ? exact_sampler->draw(ens.replica_seeds[k]) : fbm_sampler->draw(ens.replica_seeds[k]);
  };

  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(options.threads ? options.threads : default_thread_count(), n_reps));
  if (threads <= 1) {
    for (std::size_t k = 0; k < n_reps; ++k) work(k);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned id = 0; id < threads; ++id) {
      pool.emplace_back([&, id] {
        try {
          for (std::size_t k = id; k < n_reps; k += threads) work(k);
        } catch (...) {
          errors[id] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  ens.paths.reserve(n_reps);
  for (auto& s : slots) ens.paths.push_back(std::move(*s));
  return ens;
}

}  // namespace msfbm
