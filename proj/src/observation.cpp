#include "wonham/observation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wonham {

ObservationModel::ObservationModel(Vector sensor, double noise)
    : h(std::move(sensor)), sigma(noise) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "sigma must be finite and > 0");
  }
  if (!h.allFinite()) throw Error(ErrorCode::InvalidArgument, "h must be finite");
}

std::size_t grid_steps(double horizon, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::GridMismatch, "step must be > 0");
  if (!(horizon > 0.0)) throw Error(ErrorCode::GridMismatch, "horizon must be > 0");
  const double n = std::round(horizon / step);
  if (n < 1.0 || std::abs(n * step - horizon) > 1e-12 * std::max(1.0, horizon)) {
    throw Error(ErrorCode::GridMismatch, "step " + std::to_string(step) +
                                             " does not tile horizon " + std::to_string(horizon));
  }
  return static_cast<std::size_t>(n);
}

double drift_integral(const SignalPath& path, const Vector& h, double a, double b) {
  if (!(a >= 0.0) || !(b >= a) || !(b <= path.horizon)) {
    throw Error(ErrorCode::IntervalOutOfRange,
                "[" + std::to_string(a) + ", " + std::to_string(b) + "] outside [0, horizon]");
  }
  if (a == b) return 0.0;
  // First segment whose end exceeds a.
  auto first = std::upper_bound(path.jump_times.begin(), path.jump_times.end(), a);
  double total = 0.0;
  for (auto k = static_cast<std::size_t>(first - path.jump_times.begin()); k < path.segments(); ++k) {
    const double lo = std::max(a, path.segment_start(k));
    const double hi = std::min(b, path.segment_end(k));
    if (lo >= b) break;
    if (hi > lo) total += h(static_cast<Eigen::Index>(path.states[k])) * (hi - lo);
  }
  return total;
}

ObservationGrid synthesize_observations(const SignalPath& path, const ObservationModel& model,
                                        double step, std::mt19937_64& rng, NoiseMode noise) {
  const std::size_t n = grid_steps(path.horizon, step);
  ObservationGrid grid;
  grid.step = step;
  grid.increments.resize(n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = model.sigma * std::sqrt(step);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = grid.time(k);
    const double b = std::min(grid.time(k + 1), path.horizon);
    const double drift = drift_integral(path, model.h, a, b);
    grid.increments[k] = noise == NoiseMode::On ? drift + scale * gauss(rng) : drift;
  }
  return grid;
}

ObservationGrid coarsen(const ObservationGrid& fine, std::size_t factor) {
  if (factor == 0 || fine.n_steps() % factor != 0) {
    throw Error(ErrorCode::GridMismatch, "coarsening factor must divide the number of steps");
  }
  ObservationGrid coarse;
  coarse.step = fine.step * static_cast<double>(factor);
  coarse.increments.resize(fine.n_steps() / factor);
  for (std::size_t k = 0; k < coarse.increments.size(); ++k) {
    double sum = 0.0;
    for (std::size_t m = 0; m < factor; ++m) sum += fine.increments[k * factor + m];
    coarse.increments[k] = sum;
  }
  return coarse;
}

}  // namespace wonham
