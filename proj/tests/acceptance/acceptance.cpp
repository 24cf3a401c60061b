// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "wonham/config.hpp"
#include "wonham/forward_backward.hpp"
#include "wonham/random.hpp"
#include "wonham/stability.hpp"

namespace fs = std::filesystem;
using namespace wonham;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

ExperimentConfig shipped(const std::string& name) {
  return load_config(fs::path(WONHAM_SOURCE_DIR) / "configs" / (name + ".json"));
}

struct Suite {
  ExperimentConfig cfg;
  StabilityReport report;
};

const std::vector<Suite>& suites() {
  static const std::vector<Suite> cache = [] {
    std::vector<Suite> out;
    for (const char* name : {"two_state", "three_state"}) {
      ExperimentConfig cfg = shipped(name);
      StabilityReport report = run_stability(cfg);
      out.push_back({std::move(cfg), std::move(report)});
    }
    return out;
  }();
  return cache;
}

double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

Outcome ac1_stability_bound() {
  std::size_t violations = 0, replicates = 0;
  for (const auto& s : suites()) {
    violations += s.report.total_violations();
    replicates += s.report.replicates.size();
  }
  return {violations == 0, fmt("%.0f violations over %.0f replicates", static_cast<double>(violations),
                               static_cast<double>(replicates))};
}

Outcome ac2_key_bound() {
  std::size_t violations = 0;
  double increase = -INFINITY;
  for (const auto& s : suites()) {
    for (const auto& r : s.report.replicates) {
      violations += r.key_bound.violations;
      increase = std::max(increase, r.key_bound.max_increase);
    }
  }
  return {violations == 0 && increase <= 1e-10,
          fmt("%.0f violations, largest spread increase %.3g", static_cast<double>(violations), increase)};
}

Outcome ac3_rate() {
  bool pass = true;
  std::string detail;
  for (const auto& s : suites()) {
    const double target = -s.report.lambda_star + 0.3;
    double worst = -INFINITY;
    std::size_t invalid = 0;
    for (const auto& r : s.report.replicates) {
      if (!r.rate.valid) {
        ++invalid;
        continue;
      }
      worst = std::max(worst, r.rate.slope);
    }
    pass = pass && invalid == 0 && worst <= target;
    detail += fmt("d=%.0f worst slope %.4f <= %.4f; ", static_cast<double>(s.cfg.generator.dim()),
                  worst, target);
  }
  return {pass, detail};
}

Outcome ac4_constant_sensor() {
  const ExperimentConfig cfg = shipped("constant_h");
  auto rng = replicate_stream(cfg.seed, 0);
  const Record rec = simulate_record(cfg, rng);
  const FilterTrajectory pi = integrate_filter(cfg.generator, cfg.model, cfg.nu, rec.obs);
  double gap = 0.0;
  for (std::size_t k = 0; k < pi.size(); ++k) {
    const Vector exact = transition_matrix(cfg.generator, pi.time(k)).transpose() * cfg.nu.weights();
    gap = std::max(gap, max_abs_diff(pi.values[k].weights(), exact));
  }
  return {gap < 1e-6, fmt("max |pi - nu exp(Lambda t)| = %.3g", gap)};
}

ExperimentConfig random_model(std::size_t d, std::uint64_t model_seed) {
  std::mt19937_64 rng(model_seed);
  std::uniform_real_distribution<double> rate(0.5, 2.0), level(0.0, 1.0);
  Matrix raw = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  Vector h(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    h(i) = level(rng);
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
      if (i != j) raw(i, j) = rate(rng);
    }
  }
  const Vector uniform = Vector::Constant(static_cast<Eigen::Index>(d), 1.0);
  ExperimentConfig cfg{
      .generator = make_generator(raw),
      .nu = ProbabilitySimplex(uniform),
      .beta = ProbabilitySimplex(uniform),
      .beta2 = std::nullopt,
      .model = ObservationModel(h, 0.5),
  };
  cfg.horizon = 5.0;
  cfg.window_begin = 1.0;
  cfg.window_end = 4.0;
  return cfg;
}

Outcome ac5_forward_backward() {
  std::vector<ExperimentConfig> models;
  ExperimentConfig two = shipped("two_state");
  two.horizon = 5.0;
  two.window_begin = 1.0;
  two.window_end = 4.0;
  models.push_back(two);
  models.push_back(random_model(3, 303));
  models.push_back(random_model(4, 404));

  constexpr std::size_t kStride = 5;
  double gap = 0.0;
  for (const auto& cfg : models) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto rng = replicate_stream(seed, 0);
      const Record rec = simulate_record(cfg, rng);
      const FilterTrajectory pi = integrate_filter(cfg.generator, cfg.model, cfg.nu, rec.obs);
      const SmoothingTrajectory rho = integrate_smoothing(cfg.generator, pi);
      std::vector<std::size_t> idx;
      for (std::size_t k = 0; k <= rec.obs.n_steps(); k += kStride) idx.push_back(k);
      const auto oracle = discrete_smoothing(cfg.generator, cfg.model, cfg.nu, rec.obs, idx);
      for (std::size_t n = 0; n < idx.size(); ++n) {
        gap = std::max(gap, (oracle[n] - rho.matrices[idx[n]]).cwiseAbs().maxCoeff());
      }
    }
  }
  return {gap < 1e-3, fmt("max |rho - forward-backward| = %.3g over d=2,3,4 x 5 seeds", gap)};
}

Outcome ac6_bayes_reconstruction() {
  double worst = 0.0;
  for (const auto& s : suites()) {
    for (const auto& r : s.report.replicates) worst = std::max(worst, r.bayes_residual_max);
  }
  bool monotone = true;
  const ExperimentConfig cfg = shipped("two_state");
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto rng = replicate_stream(seed, 0);
    const auto path = sample_path(cfg.generator, cfg.nu, cfg.horizon, rng);
    const auto fine = synthesize_observations(path, cfg.model, 1e-3, rng);
    double previous = INFINITY;
    for (std::size_t factor : {4u, 2u, 1u}) {
      const auto obs = coarsen(fine, factor);
      const auto pi = integrate_filter(cfg.generator, cfg.model, cfg.nu, obs);
      const auto pb = integrate_filter(cfg.generator, cfg.model, cfg.beta, obs);
      const auto rebuilt =
          reconstruct_beta_filter(pi, integrate_smoothing(cfg.generator, pi), cfg.beta, cfg.nu);
      double residual = 0.0;
      for (std::size_t k = 0; k < pi.size(); ++k) {
        residual = std::max(residual, max_abs_diff(rebuilt.values[k].weights(), pb.values[k].weights()));
      }
      monotone = monotone && residual < previous;
      previous = residual;
    }
  }
  return {worst < 5e-3 && monotone,
          fmt("max residual %.3g; shrinking with step: ", worst) + (monotone ? "yes" : "no")};
}

Outcome ac7_posterior_and_jensen() {
  std::size_t gap = 0, jensen = 0;
  double margin = INFINITY, ratio = 0.0;
  for (const auto& s : suites()) {
    for (const auto& r : s.report.replicates) {
      gap += r.posterior_gap.violations;
      jensen += r.jensen.violations;
      margin = std::min(margin, r.posterior_gap.min_margin);
      ratio = std::max(ratio, r.jensen.worst_ratio);
    }
  }
  return {gap == 0 && jensen == 0,
          fmt("posterior bound violations %.0f (min margin %.3g); ", static_cast<double>(gap), margin) +
              fmt("harmonic-mean violations %.0f (worst ratio %.6f)", static_cast<double>(jensen), ratio)};
}

Outcome ac8_two_wrong() {
  const Suite& s = suites().front();
  std::size_t bad = 0, invalid = 0;
  double excess = -INFINITY, worst = -INFINITY;
  for (const auto& r : s.report.replicates) {
    bad += r.two_wrong->triangle_violations;
    excess = std::max(excess, r.two_wrong->triangle_excess);
    if (!r.two_wrong->rate.valid) {
      ++invalid;
    } else {
      worst = std::max(worst, r.two_wrong->rate.slope);
    }
  }
  const double target = -s.report.lambda_star + 0.3;
  return {bad == 0 && invalid == 0 && worst <= target,
          fmt("triangle excess %.3g; worst slope %.4f <= %.4f", excess, worst, target)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome ac9_reproducible() {
  ExperimentConfig cfg = shipped("three_state");
  cfg.replicates = 6;
  const fs::path root = fs::temp_directory_path() / "wonham_acceptance_threads";
  fs::remove_all(root);
  std::ostringstream sink;
  std::vector<fs::path> dirs;
  for (int threads : {1, 2, 4}) {
    omp_set_num_threads(threads);
    dirs.push_back(root / std::to_string(threads));
    if (cli::cmd_stability(cfg, dirs.back(), true, sink, sink) != cli::kOk) {
      return {false, "stability run failed"};
    }
  }
  omp_set_num_threads(omp_get_num_procs());
  std::size_t files = 0, mismatched = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    const std::string ref = slurp(entry.path());
    for (std::size_t n = 1; n < dirs.size(); ++n) {
      mismatched += slurp(dirs[n] / entry.path().filename()) != ref;
    }
  }
  fs::remove_all(root);
  return {files > 0 && mismatched == 0,
          fmt("%.0f CSV files compared across 1, 2, 4 threads, %.0f mismatches",
              static_cast<double>(files), static_cast<double>(mismatched))};
}

Outcome ac10_scheme_agreement() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"two_state", "three_state"}) {
    const ExperimentConfig cfg = shipped(name);
    const double hmax = cfg.model.h.cwiseAbs().maxCoeff();
    const double limit = 10.0 * cfg.step * cfg.horizon *
                         (cfg.generator.inf_norm() + hmax * hmax / (cfg.model.sigma * cfg.model.sigma));
    double gap = 0.0;
    for (std::size_t r = 0; r < 5; ++r) {
      auto rng = replicate_stream(cfg.seed, r);
      const Record rec = simulate_record(cfg, rng);
      const auto split =
          integrate_filter(cfg.generator, cfg.model, cfg.nu, rec.obs, IntegratorScheme::SplitBayes);
      const auto euler =
          integrate_filter(cfg.generator, cfg.model, cfg.nu, rec.obs, IntegratorScheme::EulerProjected);
      for (std::size_t k = 0; k < split.size(); ++k) {
        gap = std::max(gap, max_abs_diff(split.values[k].weights(), euler.values[k].weights()));
      }
    }
    pass = pass && gap < limit;
    detail += fmt("d=%.0f gap %.3g < %.3g; ", static_cast<double>(cfg.generator.dim()), gap, limit);
  }
  return {pass, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1 ", ac1_stability_bound},   {"AC2 ", ac2_key_bound},
      {"AC3 ", ac3_rate},            {"AC4 ", ac4_constant_sensor},
      {"AC5 ", ac5_forward_backward}, {"AC6 ", ac6_bayes_reconstruction},
      {"AC7 ", ac7_posterior_and_jensen}, {"AC8 ", ac8_two_wrong},
      {"AC9 ", ac9_reproducible},    {"AC10", ac10_scheme_agreement},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome result;
    try {
      result = check();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    failures += !result.pass;
    std::printf("%s %s  %s\n", name, result.pass ? "PASS" : "FAIL", result.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
