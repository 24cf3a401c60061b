#include "wonham/forward_backward.hpp"

#include <cmath>
#include <exception>
#include <string>

namespace wonham {

namespace {

Vector emission(const ObservationModel& model, double dy, double dt) {
  const double var = model.sigma * model.sigma * dt;
  Vector log_density = (model.h * dt).unaryExpr([&](double mean) {
    const double r = dy - mean;
    return -r * r / (2.0 * var);
  });
  const double shift = log_density.maxCoeff();
  return (log_density.array() - shift).exp().matrix();
}

}  // namespace

Matrix discrete_smoothing_at(const GeneratorMatrix& generator, const ObservationModel& model,
                             const ProbabilitySimplex& nu, const ObservationGrid& obs,
                             std::size_t k) {
  if (k > obs.n_steps()) throw Error(ErrorCode::IntervalOutOfRange, "index " + std::to_string(k));
  const auto d = static_cast<Eigen::Index>(generator.dim());
  const Matrix transition = transition_matrix(generator, obs.step);

  // backward(r, i) ∝ P(dY_{m+1..k}, X_k = a_i | X_m = a_r), stepping m from k
  // down to 0.
  Matrix backward = Matrix::Identity(d, d);
  for (std::size_t m = k; m > 0; --m) {
    const Vector like = emission(model, obs.increments[m - 1], obs.step);
    backward = transition * (like.asDiagonal() * backward);
    for (Eigen::Index i = 0; i < d; ++i) backward.col(i) /= backward.col(i).maxCoeff();
  }

  Matrix rho = nu.weights().asDiagonal() * backward;
  for (Eigen::Index i = 0; i < d; ++i) rho.col(i) /= rho.col(i).sum();
  return rho;
}

std::vector<Matrix> discrete_smoothing(const GeneratorMatrix& generator,
                                       const ObservationModel& model, const ProbabilitySimplex& nu,
                                       const ObservationGrid& obs,
                                       const std::vector<std::size_t>& indices) {
  std::vector<Matrix> out(indices.size());
  std::exception_ptr error;
  const auto count = static_cast<long>(indices.size());
#pragma omp parallel for schedule(dynamic)
  for (long n = 0; n < count; ++n) {
    try {
      out[static_cast<std::size_t>(n)] =
          discrete_smoothing_at(generator, model, nu, obs, indices[static_cast<std::size_t>(n)]);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace wonham
