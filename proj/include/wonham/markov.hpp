#pragma once

// Finite-state continuous-time Markov chain primitives.

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wonham/error.hpp"

namespace wonham {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Transition intensity matrix of a chain on d >= 2 states. Off-diagonal
/// rates are strictly positive and every row sums to zero.
class GeneratorMatrix {
 public:
  /// Validates `raw` and overwrites its diagonal so rows sum to zero.
  explicit GeneratorMatrix(Matrix raw);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(rates_.rows()); }
  const Matrix& rates() const noexcept { return rates_; }
  double operator()(std::size_t i, std::size_t j) const {
    return rates_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  /// Exit rate of state i, i.e. -lambda_ii.
  double exit_rate(std::size_t i) const { return -(*this)(i, i); }
  /// Max absolute row sum.
  double inf_norm() const;

 private:
  Matrix rates_;
};

GeneratorMatrix make_generator(const Matrix& raw);
GeneratorMatrix make_generator(const std::vector<std::vector<double>>& raw);

/// Probability vector on the state alphabet. Entries are nonnegative and are
/// renormalized to sum to one on construction.
class ProbabilitySimplex {
 public:
  explicit ProbabilitySimplex(Vector weights);
  explicit ProbabilitySimplex(std::span<const double> weights);
  ProbabilitySimplex(std::initializer_list<double> weights);

  /// Wraps weights already known to sum to one (no renormalization).
  static ProbabilitySimplex from_normalized(Vector weights);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(weights_.size()); }
  const Vector& weights() const noexcept { return weights_; }
  double operator[](std::size_t i) const { return weights_(static_cast<Eigen::Index>(i)); }
  bool strictly_positive() const noexcept { return weights_.minCoeff() > 0.0; }

  friend bool operator==(const ProbabilitySimplex& a, const ProbabilitySimplex& b) {
    return a.weights_.size() == b.weights_.size() && a.weights_ == b.weights_;
  }

 private:
  struct Trusted {};
  ProbabilitySimplex(Vector weights, Trusted) : weights_(std::move(weights)) {}
  Vector weights_;
};

/// Right-continuous step path of the signal. `states[0]` is held on
/// [0, jump_times[0]); `states[k+1]` on [jump_times[k], jump_times[k+1]).
struct SignalPath {
  double horizon = 0.0;
  std::vector<double> jump_times;
  std::vector<std::size_t> states;

  std::size_t initial_state() const { return states.front(); }
  std::size_t state_at(double t) const;
  /// Start time of segment k (0 for the initial segment).
  double segment_start(std::size_t k) const { return k == 0 ? 0.0 : jump_times[k - 1]; }
  double segment_end(std::size_t k) const {
    return k < jump_times.size() ? jump_times[k] : horizon;
  }
  std::size_t segments() const noexcept { return states.size(); }
};

struct RateBound {
  double lambda_star = 0.0;
};

/// 2 * min over unordered pairs p != q of sqrt(lambda_pq * lambda_qp).
RateBound theoretical_rate(const GeneratorMatrix& generator);

/// exp(A) by scaling and squaring with a degree-13 Pade approximant.
Matrix matrix_exponential(const Matrix& a);

/// exp(Lambda t); rows are probability vectors.
Matrix transition_matrix(const GeneratorMatrix& generator, double t);

ProbabilitySimplex stationary_distribution(const GeneratorMatrix& generator);

/// Exact jump-chain / holding-time sample on [0, horizon].
SignalPath sample_path(const GeneratorMatrix& generator, const ProbabilitySimplex& initial,
                       double horizon, std::mt19937_64& rng);

}  // namespace wonham
