#pragma once

// Discretized Wonham filter.

#include <cstddef>
#include <string_view>
#include <vector>

#include "wonham/markov.hpp"
#include "wonham/observation.hpp"

namespace wonham {

enum class IntegratorScheme {
  /// Exact Markov prediction exp(Lambda^T dt) followed by a Gaussian
  /// likelihood Bayes correction.
  SplitBayes,
  /// Euler-Maruyama step of the filter SDE, floored and renormalized.
  EulerProjected,
};

IntegratorScheme parse_scheme(std::string_view name);
std::string_view to_string(IntegratorScheme scheme) noexcept;

inline constexpr double kPositivityFloor = 1e-14;

struct FilterTrajectory {
  double step = 0.0;
  std::vector<ProbabilitySimplex> values;

  std::size_t size() const noexcept { return values.size(); }
  double time(std::size_t k) const noexcept { return step * static_cast<double>(k); }
};

FilterTrajectory integrate_filter(const GeneratorMatrix& generator, const ObservationModel& model,
                                  const ProbabilitySimplex& init, const ObservationGrid& obs,
                                  IntegratorScheme scheme = IntegratorScheme::SplitBayes);

/// Sum_i |p(i) - q(i)|, range [0, 2].
double tv_distance(const ProbabilitySimplex& p, const ProbabilitySimplex& q);

/// d^2 * max_j(beta_j / nu_j) * max_j(nu_j / beta_j).
double likelihood_ratio_constant(const ProbabilitySimplex& beta, const ProbabilitySimplex& nu);

/// max_j(beta_j / nu_j) * max_j(nu_j / beta_j), without the d^2 factor.
double likelihood_ratio_spread(const ProbabilitySimplex& beta, const ProbabilitySimplex& nu);

}  // namespace wonham
