#include "wonham/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wonham {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonPositiveOffDiagonal: return "NonPositiveOffDiagonal";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::IntervalOutOfRange: return "IntervalOutOfRange";
    case ErrorCode::DegenerateState: return "DegenerateState";
    case ErrorCode::NotEquivalent: return "NotEquivalent";
    case ErrorCode::NonPositiveFilterValue: return "NonPositiveFilterValue";
    case ErrorCode::ZeroNormalizer: return "ZeroNormalizer";
    case ErrorCode::WindowEmpty: return "WindowEmpty";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

GeneratorMatrix::GeneratorMatrix(Matrix raw) : rates_(std::move(raw)) {
  if (rates_.rows() != rates_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "generator must be square");
  }
  const Eigen::Index d = rates_.rows();
  if (d < 2) throw Error(ErrorCode::DimensionTooSmall, "generator needs at least 2 states");
  for (Eigen::Index i = 0; i < d; ++i) {
    double exit = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      const double rate = rates_(i, j);
      if (!(rate > 0.0) || !std::isfinite(rate)) {
        std::ostringstream msg;
        msg << "generator[" << i << "][" << j << "] must be finite and > 0 (got " << rate << ")";
        throw Error(ErrorCode::NonPositiveOffDiagonal, msg.str());
      }
      exit += rate;
    }
    rates_(i, i) = -exit;
  }
}

double GeneratorMatrix::inf_norm() const { return rates_.cwiseAbs().rowwise().sum().maxCoeff(); }

GeneratorMatrix make_generator(const Matrix& raw) { return GeneratorMatrix(raw); }

GeneratorMatrix make_generator(const std::vector<std::vector<double>>& raw) {
  const auto d = static_cast<Eigen::Index>(raw.size());
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (static_cast<Eigen::Index>(raw[i].size()) != d) {
      throw Error(ErrorCode::DimensionMismatch, "generator row " + std::to_string(i) +
                                                    " has " + std::to_string(raw[i].size()) +
                                                    " entries, expected " + std::to_string(d));
    }
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = raw[i][j];
  }
  return GeneratorMatrix(std::move(m));
}

ProbabilitySimplex::ProbabilitySimplex(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw Error(ErrorCode::InvalidDistribution, "empty distribution");
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_(i) >= 0.0) || !std::isfinite(weights_(i))) {
      throw Error(ErrorCode::InvalidDistribution,
                  "entry " + std::to_string(i) + " is negative or not finite");
    }
  }
  const double total = weights_.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidDistribution, "weights sum to zero");
  weights_ /= total;
}

ProbabilitySimplex::ProbabilitySimplex(std::span<const double> weights)
    : ProbabilitySimplex(Vector(Eigen::Map<const Vector>(weights.data(),
                                                         static_cast<Eigen::Index>(weights.size())))) {}

ProbabilitySimplex::ProbabilitySimplex(std::initializer_list<double> weights)
    : ProbabilitySimplex(std::span<const double>(weights.begin(), weights.size())) {}

ProbabilitySimplex ProbabilitySimplex::from_normalized(Vector weights) {
  return ProbabilitySimplex(std::move(weights), Trusted{});
}

std::size_t SignalPath::state_at(double t) const {
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  return states[static_cast<std::size_t>(it - jump_times.begin())];
}

RateBound theoretical_rate(const GeneratorMatrix& generator) {
  const std::size_t d = generator.dim();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < d; ++p) {
    for (std::size_t q = p + 1; q < d; ++q) {
      best = std::min(best, std::sqrt(generator(p, q) * generator(q, p)));
    }
  }
  return RateBound{2.0 * best};
}

Matrix matrix_exponential(const Matrix& a) {
  // Higham (2005) degree-13 coefficients.
  static constexpr double b[] = {64764752532480000.0,
                                 32382376266240000.0,
                                 7771770303897600.0,
                                 1187353796428800.0,
                                 129060195264000.0,
                                 10559470521600.0,
                                 670442572800.0,
                                 33522128640.0,
                                 1323241920.0,
                                 40840800.0,
                                 960960.0,
                                 16380.0,
                                 182.0,
                                 1.0};
  constexpr double theta13 = 5.371920351148152;

  const Eigen::Index n = a.rows();
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
  const Matrix scaled = a / std::ldexp(1.0, squarings);

  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = scaled * scaled;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u_inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
  const Matrix u = scaled * (a6 * u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  const Matrix v_inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
  const Matrix v = a6 * v_inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;

  Matrix result = (v - u).partialPivLu().solve(v + u);
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

Matrix transition_matrix(const GeneratorMatrix& generator, double t) {
  if (t < 0.0) throw Error(ErrorCode::NegativeTime, "t = " + std::to_string(t));
  const auto d = static_cast<Eigen::Index>(generator.dim());
  if (t == 0.0) return Matrix::Identity(d, d);
  return matrix_exponential(generator.rates() * t);
}

ProbabilitySimplex stationary_distribution(const GeneratorMatrix& generator) {
  const auto d = static_cast<Eigen::Index>(generator.dim());
  Matrix system(d + 1, d);
  system.topRows(d) = generator.rates().transpose();
  system.row(d).setOnes();
  Vector rhs = Vector::Zero(d + 1);
  rhs(d) = 1.0;

  Eigen::ColPivHouseholderQR<Matrix> qr(system);
  if (qr.rank() < d) throw Error(ErrorCode::SingularSystem, "stationary system is rank deficient");
  Vector mu = qr.solve(rhs);
  if (!(mu.minCoeff() > 0.0) || !mu.allFinite()) {
    throw Error(ErrorCode::SingularSystem, "stationary solution is not strictly positive");
  }
  return ProbabilitySimplex(std::move(mu));
}

SignalPath sample_path(const GeneratorMatrix& generator, const ProbabilitySimplex& initial,
                       double horizon, std::mt19937_64& rng) {
  if (initial.dim() != generator.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "initial law and generator disagree on d");
  }
  if (horizon < 0.0) throw Error(ErrorCode::NegativeTime, "negative horizon");
  const std::size_t d = generator.dim();

  std::vector<std::discrete_distribution<std::size_t>> jump_chain;
  jump_chain.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> row(d);
    for (std::size_t j = 0; j < d; ++j) row[j] = (i == j) ? 0.0 : generator(i, j);
    jump_chain.emplace_back(row.begin(), row.end());
  }

  SignalPath path;
  path.horizon = horizon;
  const auto& w = initial.weights();
  std::discrete_distribution<std::size_t> start(w.data(), w.data() + w.size());
  std::size_t state = start(rng);
  path.states.push_back(state);

  double t = 0.0;
  for (;;) {
    std::exponential_distribution<double> hold(generator.exit_rate(state));
    t += hold(rng);
    if (t > horizon) break;
    state = jump_chain[state](rng);
    path.jump_times.push_back(t);
    path.states.push_back(state);
  }
  return path;
}

}  // namespace wonham
