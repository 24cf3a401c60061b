#include <benchmark/benchmark.h>

#include <omp.h>

#include <random>

#include "wonham/random.hpp"
#include "wonham/stability.hpp"

namespace {

using namespace wonham;

ExperimentConfig two_state(std::size_t replicates) {
  Vector h(2);
  h << 0.0, 1.0;
  ExperimentConfig cfg{
      .generator = make_generator(Matrix::Constant(2, 2, 1.0)),
      .nu = ProbabilitySimplex{0.5, 0.5},
      .beta = ProbabilitySimplex{0.9, 0.1},
      .beta2 = ProbabilitySimplex{0.1, 0.9},
      .model = ObservationModel(h, 0.5),
  };
  cfg.horizon = 2.0;
  cfg.window_begin = 0.4;
  cfg.window_end = 1.6;
  cfg.replicates = replicates;
  cfg.seed = 1;
  return cfg;
}

struct LargeModel {
  GeneratorMatrix generator;
  FilterTrajectory pi;
};

LargeModel large_model(std::size_t d) {
  std::mt19937_64 rng(d);
  std::uniform_real_distribution<double> rate(0.2, 1.0);
  Matrix raw(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    for (Eigen::Index j = 0; j < raw.cols(); ++j) raw(i, j) = rate(rng);
  }
  GeneratorMatrix gen = make_generator(raw);
  const Vector h = Vector::LinSpaced(static_cast<Eigen::Index>(d), 0.0, 1.0);
  const ObservationModel model(h, 0.5);
  const ProbabilitySimplex nu(Vector::Ones(static_cast<Eigen::Index>(d)));
  auto stream = replicate_stream(1, 0);
  const auto path = sample_path(gen, nu, 0.5, stream);
  const auto obs = synthesize_observations(path, model, 1e-3, stream);
  FilterTrajectory pi = integrate_filter(gen, model, nu, obs);
  return {std::move(gen), std::move(pi)};
}

void BM_StabilityParallel(benchmark::State& state) {
  const auto cfg = two_state(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_stability(cfg));
  state.counters["threads"] = omp_get_max_threads();
}

void BM_StabilitySerial(benchmark::State& state) {
  const auto cfg = two_state(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_stability_serial(cfg));
}

void BM_SmoothingParallel(benchmark::State& state) {
  const auto m = large_model(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_smoothing(m.generator, m.pi));
  state.counters["threads"] = omp_get_max_threads();
}

void BM_SmoothingSerial(benchmark::State& state) {
  const auto m = large_model(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_smoothing_serial(m.generator, m.pi));
}

}  // namespace

BENCHMARK(BM_StabilityParallel)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StabilitySerial)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SmoothingParallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SmoothingSerial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
