#include "msfbm/rng.hpp"

#include <cmath>

#include <boost/math/special_functions/erf.hpp>

namespace msfbm::rng {

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
  z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
  return z ^ (z >> 31);
}

std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t k) noexcept {
  return mix64(master_seed + (k + 1) * UINT64_C(0x9E3779B97F4A7C15));
}

double NormalStream::uniform() {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(engine_() >> 11) + 0.5) * kScale;
}

double NormalStream::operator()() {
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * uniform());
}

void NormalStream::fill(std::span<double> out) {
  for (double& z : out) z = (*this)();
}

}  // namespace msfbm::rng
