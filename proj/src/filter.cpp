#include "wonham/filter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wonham {

IntegratorScheme parse_scheme(std::string_view name) {
  if (name == "split_bayes" || name == "SplitBayes") return IntegratorScheme::SplitBayes;
  if (name == "euler_projected" || name == "EulerProjected") return IntegratorScheme::EulerProjected;
  throw Error(ErrorCode::InvalidArgument, "unknown scheme '" + std::string(name) + "'");
}

std::string_view to_string(IntegratorScheme scheme) noexcept {
  return scheme == IntegratorScheme::SplitBayes ? "split_bayes" : "euler_projected";
}

namespace {

Vector split_bayes_step(const Matrix& predict, const ObservationModel& model, const Vector& pi,
                        double dy, double dt, Vector& exponent) {
  Vector p = predict * pi;
  const double inv_var = 1.0 / (model.sigma * model.sigma);
  exponent = (model.h * dy - 0.5 * model.h.cwiseProduct(model.h) * dt) * inv_var;
  const double shift = exponent.maxCoeff();
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) *= std::exp(exponent(i) - shift);
  const double total = p.sum();
  if (!(total > 0.0) || !std::isfinite(total) || !(p.minCoeff() > 0.0)) {
    throw Error(ErrorCode::DegenerateState,
                "Bayes correction underflowed; step too coarse for the signal-to-noise ratio");
  }
  return p / total;
}

Vector euler_step(const Matrix& rates_t, const ObservationModel& model, const Vector& pi, double dy,
                  double dt) {
  const double inv_var = 1.0 / (model.sigma * model.sigma);
  const double mean_h = model.h.dot(pi);
  Vector next = pi + rates_t * pi * dt +
                (pi.cwiseProduct(model.h) - pi * mean_h) * (inv_var * (dy - mean_h * dt));
  if (!next.allFinite() || !(next.maxCoeff() > 0.0)) {
    throw Error(ErrorCode::DegenerateState,
                "Euler step left the simplex; step too coarse for the signal-to-noise ratio");
  }
  next = next.cwiseMax(kPositivityFloor);
  return next / next.sum();
}

}  // namespace

FilterTrajectory integrate_filter(const GeneratorMatrix& generator, const ObservationModel& model,
                                  const ProbabilitySimplex& init, const ObservationGrid& obs,
                                  IntegratorScheme scheme) {
  const std::size_t d = generator.dim();
  if (model.dim() != d || init.dim() != d) {
    throw Error(ErrorCode::DimensionMismatch, "filter inputs disagree on the number of states");
  }
  if (!init.strictly_positive()) {
    throw Error(ErrorCode::NotEquivalent, "filter initial law must be strictly positive");
  }

  FilterTrajectory out;
  out.step = obs.step;
  out.values.reserve(obs.n_steps() + 1);
  out.values.push_back(init);

  const double dt = obs.step;
  Vector pi = init.weights();
  if (scheme == IntegratorScheme::SplitBayes) {
    const Matrix predict = transition_matrix(generator, dt).transpose();
    Vector exponent(static_cast<Eigen::Index>(d));
    for (double dy : obs.increments) {
      pi = split_bayes_step(predict, model, pi, dy, dt, exponent);
      out.values.push_back(ProbabilitySimplex::from_normalized(pi));
    }
  } else {
    const Matrix rates_t = generator.rates().transpose();
    for (double dy : obs.increments) {
      pi = euler_step(rates_t, model, pi, dy, dt);
      out.values.push_back(ProbabilitySimplex::from_normalized(pi));
    }
  }
  return out;
}

double tv_distance(const ProbabilitySimplex& p, const ProbabilitySimplex& q) {
  if (p.dim() != q.dim()) throw Error(ErrorCode::DimensionMismatch, "tv_distance");
  return (p.weights() - q.weights()).cwiseAbs().sum();
}

double likelihood_ratio_spread(const ProbabilitySimplex& beta, const ProbabilitySimplex& nu) {
  if (beta.dim() != nu.dim()) throw Error(ErrorCode::DimensionMismatch, "likelihood ratio");
  if (!beta.strictly_positive() || !nu.strictly_positive()) {
    throw Error(ErrorCode::NotEquivalent, "beta and nu must both be strictly positive");
  }
  const Vector ratio = beta.weights().cwiseQuotient(nu.weights());
  const Vector inverse = nu.weights().cwiseQuotient(beta.weights());
  return ratio.maxCoeff() * inverse.maxCoeff();
}

double likelihood_ratio_constant(const ProbabilitySimplex& beta, const ProbabilitySimplex& nu) {
  const auto d = static_cast<double>(beta.dim());
  return d * d * likelihood_ratio_spread(beta, nu);
}

}  // namespace wonham
