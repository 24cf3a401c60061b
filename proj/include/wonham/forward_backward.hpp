#pragma once

// Discrete-time HMM smoother used as an independent check of the smoothing
// ODE. The chain moves with exp(Lambda dt) per step and the increment dY_k is
// emitted by the state at the end of the step with density N(h dt, sigma^2 dt).

#include <cstddef>
#include <vector>

#include "wonham/markov.hpp"
#include "wonham/observation.hpp"

namespace wonham {

/// P(X_0 = a_j | dY_1..dY_k, X_k = a_i) as a d x d matrix (j, i), computed by
/// a backward recursion from step k with indicator terminal condition.
Matrix discrete_smoothing_at(const GeneratorMatrix& generator, const ObservationModel& model,
                             const ProbabilitySimplex& nu, const ObservationGrid& obs,
                             std::size_t k);

/// discrete_smoothing_at for every k in `indices`, evaluated in parallel.
std::vector<Matrix> discrete_smoothing(const GeneratorMatrix& generator,
                                       const ObservationModel& model, const ProbabilitySimplex& nu,
                                       const ObservationGrid& obs,
                                       const std::vector<std::size_t>& indices);

}  // namespace wonham
