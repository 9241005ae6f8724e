#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace msfbm {

/// Discretization 0 = t_0 < t_1 < ... < t_{n-1} = T of [0, T].
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> times);

  /// n_points equally spaced points on [0, horizon].
  static TimeGrid uniform(std::size_t n_points, double horizon);

  std::span<const double> times() const noexcept { return times_; }
  double operator[](std::size_t i) const { return times_[i]; }
  std::size_t size() const noexcept { return times_.size(); }
  double horizon() const noexcept { return times_.back(); }

  /// Step of a uniform grid, nullopt when the grid is not uniform to 1e-12 relative.
  std::optional<double> uniform_step() const;
  bool is_uniform() const { return uniform_step().has_value(); }

  /// Index of the grid point equal to t (to 1e-9 relative), if any.
  std::optional<std::size_t> find(double t) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  std::vector<double> times_;
};

/// One realization of the process on a grid. values[0] is pinned to 0.
struct SamplePath {
  TimeGrid grid;
  std::vector<double> values;

  SamplePath(TimeGrid g, std::vector<double> v);
  std::size_t size() const noexcept { return values.size(); }
};

}  // namespace msfbm
