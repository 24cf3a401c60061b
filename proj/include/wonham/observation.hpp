#pragma once

// Scalar observation process Y_t = int_0^t h(X_s) ds + sigma W_t sampled as
// increments on a uniform grid.

#include <cstddef>
#include <random>
#include <vector>

#include "wonham/markov.hpp"

namespace wonham {

struct ObservationModel {
  Vector h;
  double sigma = 1.0;

  ObservationModel() = default;
  ObservationModel(Vector sensor, double noise);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(h.size()); }
};

enum class NoiseMode { On, Off };

struct ObservationGrid {
  double step = 0.0;
  std::vector<double> increments;

  std::size_t n_steps() const noexcept { return increments.size(); }
  double horizon() const noexcept { return step * static_cast<double>(increments.size()); }
  double time(std::size_t k) const noexcept { return step * static_cast<double>(k); }
};

/// Number of grid steps of size `step` tiling [0, horizon]; throws GridMismatch.
std::size_t grid_steps(double horizon, double step);

/// Exact integral of h(X_s) over [a, b].
double drift_integral(const SignalPath& path, const Vector& h, double a, double b);

ObservationGrid synthesize_observations(const SignalPath& path, const ObservationModel& model,
                                        double step, std::mt19937_64& rng,
                                        NoiseMode noise = NoiseMode::On);

/// Sums consecutive blocks of `factor` increments (same Brownian record on a
/// coarser grid).
ObservationGrid coarsen(const ObservationGrid& fine, std::size_t factor);

}  // namespace wonham
