#include "msfbm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msfbm/errors.hpp"

namespace msfbm {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw ValidationError("time grid needs at least 2 points");
  if (times_.front() != 0.0) throw ValidationError("time grid must start at 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !(times_[i] > times_[i - 1])) {
      throw ValidationError("time grid must be strictly increasing (index " + std::to_string(i) + ")");
    }
  }
}

TimeGrid TimeGrid::uniform(std::size_t n_points, double horizon) {
  if (n_points < 2) throw ValidationError("uniform grid needs at least 2 points");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("horizon must be > 0");
  std::vector<double> times(n_points);
  const double denom = static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) times[i] = horizon * (static_cast<double>(i) / denom);
  times.back() = horizon;
  return TimeGrid(std::move(times));
}

std::optional<double> TimeGrid::uniform_step() const {
  const double step = horizon() / static_cast<double>(size() - 1);
  for (std::size_t i = 1; i < size(); ++i) {
    const double expected = step * static_cast<double>(i);
    if (std::abs(times_[i] - expected) > 1e-12 * horizon()) return std::nullopt;
  }
  return step;
}

std::optional<std::size_t> TimeGrid::find(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  const double tol = 1e-9 * std::max(1.0, horizon());
  std::optional<std::size_t> best;
  double best_err = tol;
  for (auto cand : {it, it == times_.begin() ? it : it - 1}) {
    if (cand == times_.end()) continue;
    const double err = std::abs(*cand - t);
    if (err <= best_err) {
      best_err = err;
      best = static_cast<std::size_t>(cand - times_.begin());
    }
  }
  return best;
}

SamplePath::SamplePath(TimeGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw ValidationError("path values must match the grid length");
  if (values.front() != 0.0) throw ValidationError("path must start at 0");
  for (double x : values) {
    if (!std::isfinite(x)) throw ValidationError("path values must be finite");
  }
}

}  // namespace msfbm
