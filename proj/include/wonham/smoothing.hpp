#pragma once

// Smoothing probabilities rho_ji(t) = P(X_0 = a_j | Y_[0,t], X_t = a_i) and
// their spread diagnostics.

#include <cstddef>
#include <optional>
#include <vector>

#include "wonham/filter.hpp"
#include "wonham/markov.hpp"

namespace wonham {

/// matrices[k](j, i) = rho_ji(k * step). Every column is a probability vector.
struct SmoothingTrajectory {
  double step = 0.0;
  std::vector<Matrix> matrices;

  std::size_t size() const noexcept { return matrices.size(); }
  std::size_t dim() const noexcept {
    return matrices.empty() ? 0 : static_cast<std::size_t>(matrices.front().rows());
  }
  double time(std::size_t k) const noexcept { return step * static_cast<double>(k); }
};

/// Rows j are integrated in parallel once d reaches this size.
inline constexpr std::size_t kParallelRowThreshold = 16;

/// Column-sum drift above which a column is renormalized after a step.
inline constexpr double kColumnRenormThreshold = 1e-12;

/// RK4 per grid step with the filter frozen at its left-endpoint value.
SmoothingTrajectory integrate_smoothing(const GeneratorMatrix& generator,
                                        const FilterTrajectory& filter);

/// Single-threaded reference of integrate_smoothing; bit-identical output.
SmoothingTrajectory integrate_smoothing_serial(const GeneratorMatrix& generator,
                                               const FilterTrajectory& filter);

struct RowSpread {
  double rho_min = 0.0;
  double rho_max = 0.0;
  std::size_t argmin = 0;
  std::size_t argmax = 0;

  double spread() const noexcept { return rho_max - rho_min; }
};

struct SpreadDiagnostics {
  double step = 0.0;
  std::size_t dim = 0;
  std::vector<RowSpread> rows;  // rows[k * dim + j]

  std::size_t size() const noexcept { return dim == 0 ? 0 : rows.size() / dim; }
  const RowSpread& at(std::size_t k, std::size_t j) const { return rows[k * dim + j]; }
  double time(std::size_t k) const noexcept { return step * static_cast<double>(k); }
  /// max_j spread at grid index k, i.e. max_{i,j,l} |rho_ji - rho_jl|.
  double max_spread(std::size_t k) const;
};

/// Per (t, j) min/max over i, ties broken toward the lowest index.
SpreadDiagnostics spread(const SmoothingTrajectory& rho);

struct KeyBoundReport {
  std::size_t violations = 0;
  /// min over grid of slack * exp(-lambda_star t) - max_j spread.
  double worst_margin = 0.0;
  std::optional<double> first_violation_time;
  /// Largest one-step increase of max_j spread (<= 0 when nonincreasing).
  double max_increase = 0.0;
};

KeyBoundReport check_key_bound(const SpreadDiagnostics& diag, const RateBound& rate, double slack);

/// j -> sum_i pi_t(i) rho_ji(t), the posterior of X_0 given Y_[0,t].
ProbabilitySimplex initial_posterior(const FilterTrajectory& filter, const SmoothingTrajectory& rho,
                                     std::size_t k);

}  // namespace wonham
