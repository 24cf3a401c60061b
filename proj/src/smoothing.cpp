#include "wonham/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wonham {

namespace {

// M(r, i) = lambda_ri pi(r) / pi(i) for r != i, columns summing to zero, so
// that d rho_j. / dt = rho_j. M.
void coefficient_matrix(const GeneratorMatrix& generator, const Vector& pi, Matrix& m) {
  const auto d = static_cast<Eigen::Index>(generator.dim());
  for (Eigen::Index i = 0; i < d; ++i) {
    double column = 0.0;
    for (Eigen::Index r = 0; r < d; ++r) {
      if (r == i) continue;
      const double c = generator.rates()(r, i) * pi(r) / pi(i);
      m(r, i) = c;
      column += c;
    }
    m(i, i) = -column;
  }
}

void check_positive(const FilterTrajectory& filter, std::size_t k) {
  if (!(filter.values[k].weights().minCoeff() > 0.0)) {
    throw Error(ErrorCode::NonPositiveFilterValue,
                "filter has a non-positive entry at grid index " + std::to_string(k));
  }
}

// Classical RK4 for one row over one step with frozen coefficients.
void rk4_row(Matrix& rho, Eigen::Index j, const Matrix& m, double dt) {
  using Row = Eigen::RowVectorXd;
  const Row y = rho.row(j);
  const Row k1 = y * m;
  const Row k2 = (y + 0.5 * dt * k1) * m;
  const Row k3 = (y + 0.5 * dt * k2) * m;
  const Row k4 = (y + dt * k3) * m;
  rho.row(j) = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void finish_step(Matrix& rho, std::size_t k) {
  if (!rho.allFinite()) {
    throw Error(ErrorCode::DegenerateState,
                "smoothing probabilities diverged at grid index " + std::to_string(k) +
                    "; step too coarse for the filter's range");
  }
  for (Eigen::Index i = 0; i < rho.cols(); ++i) {
    const double total = rho.col(i).sum();
    if (std::abs(total - 1.0) > kColumnRenormThreshold) rho.col(i) /= total;
  }
}

SmoothingTrajectory start(const GeneratorMatrix& generator, const FilterTrajectory& filter) {
  if (filter.values.empty()) throw Error(ErrorCode::InvalidArgument, "empty filter trajectory");
  if (filter.values.front().dim() != generator.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "filter and generator disagree on d");
  }
  const auto d = static_cast<Eigen::Index>(generator.dim());
  SmoothingTrajectory out;
  out.step = filter.step;
  out.matrices.reserve(filter.size());
  out.matrices.push_back(Matrix::Identity(d, d));
  return out;
}

}  // namespace

SmoothingTrajectory integrate_smoothing_serial(const GeneratorMatrix& generator,
                                               const FilterTrajectory& filter) {
  SmoothingTrajectory out = start(generator, filter);
  const auto d = static_cast<Eigen::Index>(generator.dim());
  Matrix rho = out.matrices.front();
  Matrix m(d, d);
  for (std::size_t k = 0; k + 1 < filter.size(); ++k) {
    check_positive(filter, k);
    coefficient_matrix(generator, filter.values[k].weights(), m);
    for (Eigen::Index j = 0; j < d; ++j) rk4_row(rho, j, m, filter.step);
    finish_step(rho, k + 1);
    out.matrices.push_back(rho);
  }
  return out;
}

SmoothingTrajectory integrate_smoothing(const GeneratorMatrix& generator,
                                        const FilterTrajectory& filter) {
  const std::size_t dim = generator.dim();
  if (dim < kParallelRowThreshold) return integrate_smoothing_serial(generator, filter);

  SmoothingTrajectory out = start(generator, filter);
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix rho = out.matrices.front();
  Matrix m(d, d);
  const std::size_t steps = filter.size() - 1;
  bool failed = false;

#pragma omp parallel shared(rho, m, out, failed)
  for (std::size_t k = 0; k < steps; ++k) {
#pragma omp single
    {
      try {
        check_positive(filter, k);
        coefficient_matrix(generator, filter.values[k].weights(), m);
      } catch (...) {
        failed = true;
      }
    }
    if (failed) break;
#pragma omp for schedule(static)
    for (Eigen::Index j = 0; j < d; ++j) rk4_row(rho, j, m, filter.step);
#pragma omp single
    {
      try {
        finish_step(rho, k + 1);
        out.matrices.push_back(rho);
      } catch (...) {
        failed = true;
      }
    }
    if (failed) break;
  }

  if (failed) {
    // Re-run serially to raise the same error with its message.
    return integrate_smoothing_serial(generator, filter);
  }
  return out;
}

double SpreadDiagnostics::max_spread(std::size_t k) const {
  double best = 0.0;
  for (std::size_t j = 0; j < dim; ++j) best = std::max(best, at(k, j).spread());
  return best;
}

SpreadDiagnostics spread(const SmoothingTrajectory& rho) {
  SpreadDiagnostics diag;
  diag.step = rho.step;
  diag.dim = rho.dim();
  diag.rows.reserve(rho.size() * diag.dim);
  for (const Matrix& m : rho.matrices) {
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
      RowSpread row{m(j, 0), m(j, 0), 0, 0};
      for (Eigen::Index i = 1; i < m.cols(); ++i) {
        if (m(j, i) < row.rho_min) {
          row.rho_min = m(j, i);
          row.argmin = static_cast<std::size_t>(i);
        }
        if (m(j, i) > row.rho_max) {
          row.rho_max = m(j, i);
          row.argmax = static_cast<std::size_t>(i);
        }
      }
      diag.rows.push_back(row);
    }
  }
  return diag;
}

KeyBoundReport check_key_bound(const SpreadDiagnostics& diag, const RateBound& rate, double slack) {
  KeyBoundReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  report.max_increase = -std::numeric_limits<double>::infinity();
  double previous = 0.0;
  for (std::size_t k = 0; k < diag.size(); ++k) {
    const double t = diag.time(k);
    const double value = diag.max_spread(k);
    const double margin = slack * std::exp(-rate.lambda_star * t) - value;
    report.worst_margin = std::min(report.worst_margin, margin);
    if (margin < 0.0) {
      if (!report.first_violation_time) report.first_violation_time = t;
      ++report.violations;
    }
    if (k > 0) report.max_increase = std::max(report.max_increase, value - previous);
    previous = value;
  }
  if (diag.size() < 2) report.max_increase = 0.0;
  return report;
}

ProbabilitySimplex initial_posterior(const FilterTrajectory& filter, const SmoothingTrajectory& rho,
                                     std::size_t k) {
  if (k >= filter.size() || k >= rho.size()) {
    throw Error(ErrorCode::IntervalOutOfRange, "grid index " + std::to_string(k));
  }
  return ProbabilitySimplex::from_normalized(rho.matrices[k] * filter.values[k].weights());
}

}  // namespace wonham
