#pragma once

// Paired-filter experiments: a correctly initialized filter and one or two
// wrongly initialized filters driven by the same observation record.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "wonham/filter.hpp"
#include "wonham/markov.hpp"
#include "wonham/observation.hpp"
#include "wonham/smoothing.hpp"

namespace wonham {

struct Slack {
  double mult = 1.1;
  double add = 1e-6;
};

struct ExperimentConfig {
  GeneratorMatrix generator;
  ProbabilitySimplex nu;
  ProbabilitySimplex beta;
  std::optional<ProbabilitySimplex> beta2;
  ObservationModel model;
  double horizon = 10.0;
  double step = 1e-3;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  IntegratorScheme scheme = IntegratorScheme::SplitBayes;
  NoiseMode noise = NoiseMode::On;
  Slack slack;
  double posterior_slack = 1.05;
  double window_begin = 2.0;
  double window_end = 8.0;

  /// Throws InvalidArgument / DimensionMismatch / NotEquivalent.
  void validate() const;
};

inline constexpr double kRateFloor = 1e-12;
inline constexpr std::size_t kMinRatePoints = 10;

struct RateEstimate {
  double slope = 0.0;
  std::size_t points = 0;
  bool valid = false;
};

/// OLS slope of log D_t against t over grid points in [t0, t1] with
/// D_t > 1e-12. Invalid when fewer than 10 usable points. Throws WindowEmpty
/// when no grid point lies in the window.
RateEstimate estimate_rate(const std::vector<double>& series, double step, double t0, double t1);

/// Bayes reinitialization of pi^nu through rho:
/// pi^beta(i) ∝ sum_j (beta_j / nu_j) rho_ji(t) pi^nu_t(i).
FilterTrajectory reconstruct_beta_filter(const FilterTrajectory& filter,
                                         const SmoothingTrajectory& rho,
                                         const ProbabilitySimplex& beta,
                                         const ProbabilitySimplex& nu);

struct PosteriorGapReport {
  std::size_t violations = 0;
  /// min over grid of slack * rhs - max_i lhs.
  double min_margin = 0.0;
};

/// max_i |pi^nu_t(i) - pi^beta_t(i)| <= slack * d * C' * max_j Delta_t(j),
/// with C' the likelihood-ratio spread of beta against nu.
PosteriorGapReport check_posterior_gap(const FilterTrajectory& filter,
                                       const FilterTrajectory& beta_filter,
                                       const SmoothingTrajectory& rho,
                                       const ProbabilitySimplex& beta,
                                       const ProbabilitySimplex& nu, double slack);

struct JensenReport {
  std::size_t violations = 0;
  /// max over grid of lhs / rhs (<= 1 + tol when the inequality holds).
  double worst_ratio = 0.0;
};

/// 1 / sum_j (beta_j/nu_j) q_j <= tol * sum_j (nu_j/beta_j) q_j with q the
/// posterior of X_0 at each grid time.
JensenReport check_jensen(const FilterTrajectory& filter, const SmoothingTrajectory& rho,
                          const ProbabilitySimplex& beta, const ProbabilitySimplex& nu,
                          double tol = 1.0 + 1e-12);

struct TwoWrongReport {
  std::vector<double> distance;  // ||pi^{beta' nu} - pi^{beta'' nu}||
  std::vector<double> distance_first;
  std::vector<double> distance_second;
  /// max over grid of lhs - (rhs) of the triangle inequality.
  double triangle_excess = 0.0;
  std::size_t triangle_violations = 0;
  RateEstimate rate;
};

inline constexpr double kTriangleTolerance = 1e-12;

struct ReplicateReport {
  std::size_t replicate = 0;
  double step = 0.0;
  std::vector<double> distance;        // D_t
  std::vector<double> bound;           // C exp(-lambda_star t)
  std::vector<double> spread_max;      // max_j Delta_t(j)
  std::vector<double> bayes_residual;  // sup-norm reconstruction error
  std::size_t bound_violations = 0;
  RateEstimate rate;
  double bayes_residual_max = 0.0;
  PosteriorGapReport posterior_gap;
  JensenReport jensen;
  KeyBoundReport key_bound;
  std::optional<TwoWrongReport> two_wrong;

  /// D_t identically zero (beta == nu).
  bool degenerate() const;
};

struct Record {
  SignalPath path;
  ObservationGrid obs;
};

/// Signal path from nu and its observation record, in that order from `rng`.
Record simulate_record(const ExperimentConfig& cfg, std::mt19937_64& rng);

/// One replicate: sample X from nu, one record Y, integrate pi^nu and
/// pi^{beta nu} on that record and evaluate all checks.
ReplicateReport run_paired_experiment(const ExperimentConfig& cfg, std::mt19937_64& rng,
                                      std::size_t replicate = 0);

/// Three filters (nu, beta', beta'') on one record. beta2 must be set.
TwoWrongReport run_two_wrong_experiment(const ExperimentConfig& cfg, std::mt19937_64& rng);

struct StabilityReport {
  double lambda_star = 0.0;
  double constant = 0.0;
  std::vector<ReplicateReport> replicates;

  std::size_t total_violations() const;
  std::size_t max_violations() const;
  /// min/median/max of the valid empirical rates; empty when none are valid.
  std::optional<std::array<double, 3>> rate_summary() const;
};

/// Replicate r draws from replicate_stream(cfg.seed, r). Replicates run in
/// parallel; the result is independent of the thread count.
StabilityReport run_stability(const ExperimentConfig& cfg);

/// Serial reference of run_stability.
StabilityReport run_stability_serial(const ExperimentConfig& cfg);

}  // namespace wonham
