#include "wonham/stability.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "wonham/random.hpp"

namespace wonham {

void ExperimentConfig::validate() const {
  const std::size_t d = generator.dim();
  if (nu.dim() != d || beta.dim() != d || model.dim() != d || (beta2 && beta2->dim() != d)) {
    throw Error(ErrorCode::DimensionMismatch, "nu, beta, beta2 and h must all have d entries");
  }
  if (!nu.strictly_positive()) throw Error(ErrorCode::NotEquivalent, "nu must be strictly positive");
  if (!beta.strictly_positive()) {
    throw Error(ErrorCode::NotEquivalent, "beta must be strictly positive");
  }
  if (beta2 && !beta2->strictly_positive()) {
    throw Error(ErrorCode::NotEquivalent, "beta2 must be strictly positive");
  }
  grid_steps(horizon, step);
  if (replicates < 1) throw Error(ErrorCode::InvalidArgument, "replicates must be >= 1");
  if (!(window_begin >= step) || !(window_end <= horizon) || !(window_begin < window_end)) {
    throw Error(ErrorCode::InvalidArgument, "regression window must satisfy dt <= t0 < t1 <= T");
  }
  if (!(slack.mult > 0.0) || !(slack.add >= 0.0) || !(posterior_slack > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "slack values must be positive");
  }
}

RateEstimate estimate_rate(const std::vector<double>& series, double step, double t0, double t1) {
  constexpr double eps = 1e-12;
  std::size_t in_window = 0;
  double n = 0.0, sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double t = step * static_cast<double>(k);
    if (t < t0 - eps || t > t1 + eps) continue;
    ++in_window;
    if (!(series[k] > kRateFloor)) continue;
    const double y = std::log(series[k]);
    n += 1.0;
    sum_t += t;
    sum_y += y;
    sum_tt += t * t;
    sum_ty += t * y;
  }
  if (in_window == 0) throw Error(ErrorCode::WindowEmpty, "no grid point inside the window");

  RateEstimate est;
  est.points = static_cast<std::size_t>(n);
  if (est.points < kMinRatePoints) {
    est.slope = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  const double mean_t = sum_t / n;
  const double sxx = sum_tt - n * mean_t * mean_t;
  const double sxy = sum_ty - mean_t * sum_y;
  est.slope = sxy / sxx;
  est.valid = std::isfinite(est.slope);
  return est;
}

FilterTrajectory reconstruct_beta_filter(const FilterTrajectory& filter,
                                         const SmoothingTrajectory& rho,
                                         const ProbabilitySimplex& beta,
                                         const ProbabilitySimplex& nu) {
  if (filter.size() != rho.size()) {
    throw Error(ErrorCode::DimensionMismatch, "filter and smoothing grids differ");
  }
  likelihood_ratio_spread(beta, nu);  // positivity and dimension checks
  const Vector ratio = beta.weights().cwiseQuotient(nu.weights());

  FilterTrajectory out;
  out.step = filter.step;
  out.values.reserve(filter.size());
  for (std::size_t k = 0; k < filter.size(); ++k) {
    const Vector weighted =
        (ratio.transpose() * rho.matrices[k]).transpose().cwiseProduct(filter.values[k].weights());
    const double total = weighted.sum();
    if (!(total > 0.0) || !std::isfinite(total)) {
      throw Error(ErrorCode::ZeroNormalizer, "at grid index " + std::to_string(k));
    }
    out.values.push_back(ProbabilitySimplex::from_normalized(weighted / total));
  }
  return out;
}

PosteriorGapReport check_posterior_gap(const FilterTrajectory& filter,
                                       const FilterTrajectory& beta_filter,
                                       const SmoothingTrajectory& rho,
                                       const ProbabilitySimplex& beta,
                                       const ProbabilitySimplex& nu, double slack) {
  if (filter.size() != beta_filter.size() || filter.size() != rho.size()) {
    throw Error(ErrorCode::DimensionMismatch, "trajectories are not aligned");
  }
  const double factor = static_cast<double>(nu.dim()) * likelihood_ratio_spread(beta, nu);
  const SpreadDiagnostics diag = spread(rho);
  PosteriorGapReport report;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < filter.size(); ++k) {
    const double lhs =
        (filter.values[k].weights() - beta_filter.values[k].weights()).cwiseAbs().maxCoeff();
    const double margin = slack * factor * diag.max_spread(k) - lhs;
    report.min_margin = std::min(report.min_margin, margin);
    if (margin < 0.0) ++report.violations;
  }
  return report;
}

JensenReport check_jensen(const FilterTrajectory& filter, const SmoothingTrajectory& rho,
                          const ProbabilitySimplex& beta, const ProbabilitySimplex& nu,
                          double tol) {
  likelihood_ratio_spread(beta, nu);
  const Vector ratio = beta.weights().cwiseQuotient(nu.weights());
  const Vector inverse = nu.weights().cwiseQuotient(beta.weights());
  JensenReport report;
  for (std::size_t k = 0; k < filter.size(); ++k) {
    const Vector q = initial_posterior(filter, rho, k).weights();
    const double lhs = 1.0 / ratio.dot(q);
    const double rhs = inverse.dot(q);
    report.worst_ratio = std::max(report.worst_ratio, lhs / rhs);
    if (lhs > tol * rhs) ++report.violations;
  }
  return report;
}

bool ReplicateReport::degenerate() const {
  return std::all_of(distance.begin(), distance.end(), [](double x) { return x == 0.0; });
}

Record simulate_record(const ExperimentConfig& cfg, std::mt19937_64& rng) {
  Record record;
  record.path = sample_path(cfg.generator, cfg.nu, cfg.horizon, rng);
  record.obs = synthesize_observations(record.path, cfg.model, cfg.step, rng, cfg.noise);
  return record;
}

namespace {

std::vector<double> distance_series(const FilterTrajectory& a, const FilterTrajectory& b) {
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = tv_distance(a.values[k], b.values[k]);
  return out;
}

TwoWrongReport analyze_two_wrong(const ExperimentConfig& cfg, const ObservationGrid& obs,
                                 const FilterTrajectory& pi_nu) {
  const FilterTrajectory first = integrate_filter(cfg.generator, cfg.model, cfg.beta, obs, cfg.scheme);
  const FilterTrajectory second =
      integrate_filter(cfg.generator, cfg.model, *cfg.beta2, obs, cfg.scheme);

  TwoWrongReport report;
  report.distance = distance_series(first, second);
  report.distance_first = distance_series(first, pi_nu);
  report.distance_second = distance_series(second, pi_nu);
  report.triangle_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < report.distance.size(); ++k) {
    const double excess =
        report.distance[k] - (report.distance_first[k] + report.distance_second[k]);
    report.triangle_excess = std::max(report.triangle_excess, excess);
    if (excess > kTriangleTolerance) ++report.triangle_violations;
  }
  report.rate = estimate_rate(report.distance, obs.step, cfg.window_begin, cfg.window_end);
  return report;
}

}  // namespace

ReplicateReport run_paired_experiment(const ExperimentConfig& cfg, std::mt19937_64& rng,
                                      std::size_t replicate) {
  const Record record = simulate_record(cfg, rng);
  const ObservationGrid& obs = record.obs;

  const FilterTrajectory pi_nu = integrate_filter(cfg.generator, cfg.model, cfg.nu, obs, cfg.scheme);
  const FilterTrajectory pi_beta =
      integrate_filter(cfg.generator, cfg.model, cfg.beta, obs, cfg.scheme);
  const SmoothingTrajectory rho = integrate_smoothing(cfg.generator, pi_nu);
  const SpreadDiagnostics diag = spread(rho);
  const FilterTrajectory rebuilt = reconstruct_beta_filter(pi_nu, rho, cfg.beta, cfg.nu);

  const RateBound rate = theoretical_rate(cfg.generator);
  const double constant = likelihood_ratio_constant(cfg.beta, cfg.nu);

  ReplicateReport report;
  report.replicate = replicate;
  report.step = obs.step;
  const std::size_t n = pi_nu.size();
  report.distance = distance_series(pi_nu, pi_beta);
  report.bound.resize(n);
  report.spread_max.resize(n);
  report.bayes_residual.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = obs.time(k);
    report.bound[k] = constant * std::exp(-rate.lambda_star * t);
    if (report.distance[k] > cfg.slack.mult * report.bound[k] + cfg.slack.add) {
      ++report.bound_violations;
    }
    report.spread_max[k] = diag.max_spread(k);
    report.bayes_residual[k] =
        (rebuilt.values[k].weights() - pi_beta.values[k].weights()).cwiseAbs().maxCoeff();
    report.bayes_residual_max = std::max(report.bayes_residual_max, report.bayes_residual[k]);
  }
  report.rate = estimate_rate(report.distance, obs.step, cfg.window_begin, cfg.window_end);
  report.posterior_gap =
      check_posterior_gap(pi_nu, pi_beta, rho, cfg.beta, cfg.nu, cfg.posterior_slack);
  report.jensen = check_jensen(pi_nu, rho, cfg.beta, cfg.nu);
  report.key_bound = check_key_bound(diag, rate, cfg.slack.mult);
  if (cfg.beta2) report.two_wrong = analyze_two_wrong(cfg, obs, pi_nu);
  return report;
}

TwoWrongReport run_two_wrong_experiment(const ExperimentConfig& cfg, std::mt19937_64& rng) {
  if (!cfg.beta2) throw Error(ErrorCode::InvalidArgument, "two-wrong experiment needs beta2");
  const Record record = simulate_record(cfg, rng);
  const FilterTrajectory pi_nu =
      integrate_filter(cfg.generator, cfg.model, cfg.nu, record.obs, cfg.scheme);
  return analyze_two_wrong(cfg, record.obs, pi_nu);
}

std::size_t StabilityReport::total_violations() const {
  std::size_t total = 0;
  for (const auto& r : replicates) total += r.bound_violations;
  return total;
}

std::size_t StabilityReport::max_violations() const {
  std::size_t worst = 0;
  for (const auto& r : replicates) worst = std::max(worst, r.bound_violations);
  return worst;
}

std::optional<std::array<double, 3>> StabilityReport::rate_summary() const {
  std::vector<double> rates;
  for (const auto& r : replicates) {
    if (r.rate.valid) rates.push_back(r.rate.slope);
  }
  if (rates.empty()) return std::nullopt;
  std::sort(rates.begin(), rates.end());
  const std::size_t mid = rates.size() / 2;
  const double median = rates.size() % 2 ? rates[mid] : 0.5 * (rates[mid - 1] + rates[mid]);
  return std::array<double, 3>{rates.front(), median, rates.back()};
}

namespace {

StabilityReport prepare(const ExperimentConfig& cfg) {
  cfg.validate();
  StabilityReport report;
  report.lambda_star = theoretical_rate(cfg.generator).lambda_star;
  report.constant = likelihood_ratio_constant(cfg.beta, cfg.nu);
  report.replicates.resize(cfg.replicates);
  return report;
}

ReplicateReport run_replicate(const ExperimentConfig& cfg, std::size_t r) {
  auto rng = replicate_stream(cfg.seed, r);
  return run_paired_experiment(cfg, rng, r);
}

[[noreturn]] void rethrow_for_replicate(std::size_t r, const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const Error& e) {
    throw Error(e.code(), "replicate " + std::to_string(r) + ": " + e.detail());
  }
}

}  // namespace

StabilityReport run_stability_serial(const ExperimentConfig& cfg) {
  StabilityReport report = prepare(cfg);
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    try {
      report.replicates[r] = run_replicate(cfg, r);
    } catch (const Error&) {
      rethrow_for_replicate(r, std::current_exception());
    }
  }
  return report;
}

StabilityReport run_stability(const ExperimentConfig& cfg) {
  StabilityReport report = prepare(cfg);
  std::vector<std::exception_ptr> errors(cfg.replicates);
  const auto count = static_cast<long>(cfg.replicates);
#pragma omp parallel for schedule(dynamic)
  for (long r = 0; r < count; ++r) {
    const auto idx = static_cast<std::size_t>(r);
    try {
      report.replicates[idx] = run_replicate(cfg, idx);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (std::size_t r = 0; r < errors.size(); ++r) {
    if (errors[r]) rethrow_for_replicate(r, errors[r]);
  }
  return report;
}

}  // namespace wonham
