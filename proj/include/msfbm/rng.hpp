#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace msfbm::rng {

/// Bumped whenever the normal-variate transformation changes; golden outputs
/// are only comparable within one version.
inline constexpr int kNormalStreamVersion = 1;

/// SplitMix64 output function (Steele, Lea & Flood). Bijective on 64 bits.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Seed of replica k: the k-th output of a SplitMix64 stream started at the
/// master seed, i.e. mix64(master + (k + 1) * 0x9E3779B97F4A7C15). Distinct
/// for distinct k < 2^64.
std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t k) noexcept;

/// Deterministic i.i.d. N(0,1) stream.
///
/// Uniforms come from std::mt19937_64 (fully specified by the standard) as
/// u = (top 53 bits + 0.5) / 2^53, strictly inside (0, 1); each normal is
/// the inverse CDF  z = -sqrt(2) * erfc_inv(2u)  of exactly one uniform.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double operator()();
  void fill(std::span<double> out);

 private:
  std::mt19937_64 engine_;
};

}  // namespace msfbm::rng
