#include "cli.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wonham/config.hpp"
#include "wonham/csv.hpp"
#include "wonham/forward_backward.hpp"
#include "wonham/random.hpp"

namespace wonham::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string significant12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  std::string s(buf);
  if (s.find_first_of(".eEni") == std::string::npos) s += ".0";
  return s;
}

std::string short_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::Io, "cannot create output directory " + dir.string());
  }
}

json rate_json(const RateEstimate& est) {
  return est.valid ? json(est.slope) : json(nullptr);
}

struct ReplicateTrajectories {
  FilterTrajectory pi_nu;
  FilterTrajectory pi_beta;
  SmoothingTrajectory rho;
};

ReplicateTrajectories trajectories_for(const ExperimentConfig& cfg, const ObservationGrid& obs) {
  ReplicateTrajectories out;
  out.pi_nu = integrate_filter(cfg.generator, cfg.model, cfg.nu, obs, cfg.scheme);
  out.pi_beta = integrate_filter(cfg.generator, cfg.model, cfg.beta, obs, cfg.scheme);
  out.rho = integrate_smoothing(cfg.generator, out.pi_nu);
  return out;
}

void write_trajectories(const fs::path& dir, const std::string& suffix,
                        const ReplicateTrajectories& t) {
  csv::write_file(dir / ("pi_nu" + suffix + ".csv"),
                  [&](std::ostream& s) { csv::write_trajectory(s, t.pi_nu); });
  csv::write_file(dir / ("pi_beta" + suffix + ".csv"),
                  [&](std::ostream& s) { csv::write_trajectory(s, t.pi_beta); });
  csv::write_file(dir / ("rho" + suffix + ".csv"),
                  [&](std::ostream& s) { csv::write_smoothing(s, t.rho); });
  csv::write_file(dir / ("spread" + suffix + ".csv"),
                  [&](std::ostream& s) { csv::write_diagnostics(s, spread(t.rho)); });
}

json replicate_json(const ReplicateReport& r) {
  json j = {
      {"replicate", r.replicate},
      {"empirical_rate", rate_json(r.rate)},
      {"rate_points", r.rate.points},
      {"degenerate", r.degenerate()},
      {"bound_violations", r.bound_violations},
      {"bayes_residual_max", r.bayes_residual_max},
      {"posterior_gap_violations", r.posterior_gap.violations},
      {"posterior_gap_min_margin", r.posterior_gap.min_margin},
      {"jensen_violations", r.jensen.violations},
      {"key_bound_violations", r.key_bound.violations},
      {"key_bound_worst_margin", r.key_bound.worst_margin},
      {"spread_max_increase", r.key_bound.max_increase},
  };
  if (r.two_wrong) {
    j["two_wrong"] = {
        {"empirical_rate", rate_json(r.two_wrong->rate)},
        {"triangle_violations", r.two_wrong->triangle_violations},
        {"triangle_excess", r.two_wrong->triangle_excess},
    };
  }
  return j;
}

struct CheckRow {
  std::string name;
  bool pass;
  double value;
  double threshold;
};

}  // namespace

int cmd_rate(const ExperimentConfig& cfg, std::ostream& out) {
  const double lambda_star = theoretical_rate(cfg.generator).lambda_star;
  const double constant = likelihood_ratio_constant(cfg.beta, cfg.nu);
  out << "lambda_star=" << significant12(lambda_star) << " C=" << significant12(constant) << '\n';
  return kOk;
}

int cmd_simulate(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& out,
                 std::ostream&) {
  prepare_dir(out_dir);
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    auto rng = replicate_stream(cfg.seed, r);
    const Record record = simulate_record(cfg, rng);
    const std::string id = std::to_string(r);
    csv::write_file(out_dir / ("signal_" + id + ".csv"),
                    [&](std::ostream& s) { csv::write_signal(s, record.path); });
    csv::write_file(out_dir / ("observations_" + id + ".csv"),
                    [&](std::ostream& s) { csv::write_observations(s, record.obs); });
  }
  out << "wrote " << cfg.replicates << " signal/observation pairs to " << out_dir.string() << '\n';
  return kOk;
}

int cmd_stability(const ExperimentConfig& cfg, const fs::path& out_dir, bool trajectories,
                  std::ostream& out, std::ostream& err) {
  prepare_dir(out_dir);
  StabilityReport report;
  try {
    report = run_stability(cfg);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    err << "stability run failed: " << e.what() << '\n';
    return kCheckFailed;
  }

  json replicates = json::array();
  std::vector<std::size_t> degenerate;
  std::size_t two_wrong_violations = 0;
  for (const auto& r : report.replicates) {
    csv::write_file(out_dir / ("replicate_" + std::to_string(r.replicate) + ".csv"),
                    [&](std::ostream& s) { csv::write_replicate(s, r); });
    replicates.push_back(replicate_json(r));
    if (r.degenerate()) degenerate.push_back(r.replicate);
    if (r.two_wrong) two_wrong_violations += r.two_wrong->triangle_violations;
  }
  if (trajectories) {
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
      auto rng = replicate_stream(cfg.seed, r);
      const Record record = simulate_record(cfg, rng);
      write_trajectories(out_dir, "_" + std::to_string(r), trajectories_for(cfg, record.obs));
    }
  }

  const bool pass = report.total_violations() == 0;
  json aggregate = {
      {"total_violations", report.total_violations()},
      {"max_violations", report.max_violations()},
      {"degenerate_replicates", degenerate},
      {"triangle_violations", two_wrong_violations},
  };
  if (const auto rates = report.rate_summary()) {
    aggregate["rate_min"] = (*rates)[0];
    aggregate["rate_median"] = (*rates)[1];
    aggregate["rate_max"] = (*rates)[2];
  } else {
    aggregate["rate_min"] = aggregate["rate_median"] = aggregate["rate_max"] = nullptr;
  }
  const json summary = {
      {"config", config_to_json(cfg)},
      {"lambda_star", report.lambda_star},
      {"C", report.constant},
      {"replicates", replicates},
      {"aggregate", aggregate},
      {"pass", pass},
  };
  csv::write_file(out_dir / "summary.json", [&](std::ostream& s) { s << summary.dump(2) << '\n'; });

  out << "lambda_star=" << significant12(report.lambda_star)
      << " C=" << significant12(report.constant) << " replicates=" << cfg.replicates
      << " violations=" << report.total_violations();
  if (!degenerate.empty()) out << " degenerate=" << degenerate.size();
  out << (pass ? " PASS" : " FAIL") << '\n';
  return pass ? kOk : kCheckFailed;
}

int cmd_filter(const ExperimentConfig& cfg, const fs::path& observations, const fs::path& out_dir,
               std::ostream& out, std::ostream& err) {
  std::ifstream in(observations);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + observations.string());
  const ObservationGrid obs = csv::read_observations(in);
  prepare_dir(out_dir);
  try {
    write_trajectories(out_dir, "", trajectories_for(cfg, obs));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    err << "filter failed: " << e.what() << '\n';
    return kCheckFailed;
  }
  out << "filtered " << obs.n_steps() << " increments into " << out_dir.string() << '\n';
  return kOk;
}

int cmd_verify(const ExperimentConfig& base, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = base;
  if (!cfg.beta2) cfg.beta2 = cfg.nu;
  std::vector<CheckRow> rows;

  try {
    auto rng = replicate_stream(cfg.seed, 0);
    const Record record = simulate_record(cfg, rng);
    const ObservationGrid& obs = record.obs;
    const double horizon = obs.horizon();

    // Constant sensor: the filter reduces to the Kolmogorov forward flow.
    {
      const auto d = static_cast<Eigen::Index>(cfg.generator.dim());
      const ObservationModel flat(Vector::Ones(d), cfg.model.sigma);
      const ObservationGrid flat_obs = synthesize_observations(record.path, flat, cfg.step, rng, cfg.noise);
      const FilterTrajectory pi = integrate_filter(cfg.generator, flat, cfg.nu, flat_obs, cfg.scheme);
      double gap = 0.0;
      for (std::size_t k = 0; k < pi.size(); ++k) {
        const Vector exact =
            transition_matrix(cfg.generator, pi.time(k)).transpose() * cfg.nu.weights();
        gap = std::max(gap, (pi.values[k].weights() - exact).cwiseAbs().sum());
      }
      rows.push_back({"constant_h_reduction", gap < 1e-6, gap, 1e-6});
    }

    // Smoothing ODE against the discrete forward-backward smoother.
    {
      const FilterTrajectory pi = integrate_filter(cfg.generator, cfg.model, cfg.nu, obs);
      const SmoothingTrajectory rho = integrate_smoothing(cfg.generator, pi);
      const std::size_t stride = std::max<std::size_t>(1, obs.n_steps() / 500);
      std::vector<std::size_t> idx;
      for (std::size_t k = 0; k <= obs.n_steps(); k += stride) idx.push_back(k);
      const auto oracle = discrete_smoothing(cfg.generator, cfg.model, cfg.nu, obs, idx);
      double gap = 0.0;
      for (std::size_t n = 0; n < idx.size(); ++n) {
        gap = std::max(gap, (oracle[n] - rho.matrices[idx[n]]).cwiseAbs().maxCoeff());
      }
      rows.push_back({"smoothing_oracle", gap < 1e-3, gap, 1e-3});
    }

    // Split-Bayes against Euler on the same record.
    {
      const FilterTrajectory split =
          integrate_filter(cfg.generator, cfg.model, cfg.nu, obs, IntegratorScheme::SplitBayes);
      const FilterTrajectory euler =
          integrate_filter(cfg.generator, cfg.model, cfg.nu, obs, IntegratorScheme::EulerProjected);
      double gap = 0.0;
      for (std::size_t k = 0; k < split.size(); ++k) {
        gap = std::max(gap, (split.values[k].weights() - euler.values[k].weights()).cwiseAbs().maxCoeff());
      }
      const double hmax = cfg.model.h.cwiseAbs().maxCoeff();
      const double limit = 10.0 * cfg.step * horizon *
                           (cfg.generator.inf_norm() + hmax * hmax / (cfg.model.sigma * cfg.model.sigma));
      rows.push_back({"scheme_agreement", gap < limit, gap, limit});
    }

    const StabilityReport report = run_stability(cfg);
    double bayes = 0.0, gap_margin = INFINITY, jensen = 0.0, key_margin = INFINITY;
    double increase = -INFINITY, triangle = -INFINITY;
    std::size_t gap_bad = 0, jensen_bad = 0, key = 0, triangle_bad = 0;
    for (const auto& r : report.replicates) {
      bayes = std::max(bayes, r.bayes_residual_max);
      gap_bad += r.posterior_gap.violations;
      gap_margin = std::min(gap_margin, r.posterior_gap.min_margin);
      jensen_bad += r.jensen.violations;
      jensen = std::max(jensen, r.jensen.worst_ratio);
      key += r.key_bound.violations;
      key_margin = std::min(key_margin, r.key_bound.worst_margin);
      increase = std::max(increase, r.key_bound.max_increase);
      triangle_bad += r.two_wrong->triangle_violations;
      triangle = std::max(triangle, r.two_wrong->triangle_excess);
    }
    rows.push_back({"bayes_reconstruction", bayes < 5e-3, bayes, 5e-3});
    rows.push_back({"posterior_gap", gap_bad == 0, gap_margin, 0.0});
    rows.push_back({"jensen", jensen_bad == 0, jensen, 1.0 + 1e-12});
    rows.push_back({"key_bound", key == 0, key_margin, 0.0});
    rows.push_back({"spread_monotone", increase <= 1e-10, increase, 1e-10});
    rows.push_back({"stability_bound", report.total_violations() == 0,
                    static_cast<double>(report.total_violations()), 0.0});
    rows.push_back({"triangle", triangle_bad == 0, triangle, kTriangleTolerance});
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    err << "verify aborted: " << e.what() << '\n';
    return kCheckFailed;
  }

  bool all = true;
  out << std::left << std::setw(24) << "check" << std::setw(8) << "result" << std::setw(16)
      << "value" << "threshold\n";
  for (const auto& row : rows) {
    all = all && row.pass;
    out << std::left << std::setw(24) << row.name << std::setw(8) << (row.pass ? "PASS" : "FAIL")
        << std::setw(16) << short_real(row.value) << short_real(row.threshold) << '\n';
  }
  out << (all ? "all checks passed" : "some checks FAILED") << '\n';
  return all ? kOk : kCheckFailed;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wonham filter stability laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string observations;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  std::optional<int> threads;
  bool trajectories = false;

  auto common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--config", config_path, "experiment configuration (JSON)")->required();
    if (with_out) sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override run.seed");
    sub->add_option("--replicates", replicates, "override run.replicates")->check(CLI::PositiveNumber);
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* rate = app.add_subcommand("rate", "print lambda_star and C(beta, nu)");
  common(rate, false);
  auto* simulate = app.add_subcommand("simulate", "sample signal paths and observation records");
  common(simulate, true);
  auto* stability = app.add_subcommand("stability", "paired-filter stability experiment");
  common(stability, true);
  stability->add_flag("--trajectories", trajectories, "also write filter and smoothing CSVs");
  auto* filter = app.add_subcommand("filter", "run the filters on a recorded observation CSV");
  common(filter, true);
  filter->add_option("--observations", observations, "observation CSV (k,t_k,delta_y)")->required();
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  common(verify, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << e.what() << '\n';
    return kConfigError;
  }

  std::optional<ExperimentConfig> cfg;
  try {
    cfg = load_config(config_path);
    if (seed) cfg->seed = *seed;
    if (replicates) cfg->replicates = *replicates;
    cfg->validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) {
      err << "I/O error: " << e.detail() << '\n';
      return kIoError;
    }
    err << "config error: " << e.detail() << '\n';
    return kConfigError;
  }
  if (threads) omp_set_num_threads(*threads);

  try {
    if (*rate) return cmd_rate(*cfg, out);
    if (*simulate) return cmd_simulate(*cfg, out_dir, out, err);
    if (*stability) return cmd_stability(*cfg, out_dir, trajectories, out, err);
    if (*filter) return cmd_filter(*cfg, observations, out_dir, out, err);
    return cmd_verify(*cfg, out, err);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) {
      err << "I/O error: " << e.what() << '\n';
      return kIoError;
    }
    err << e.what() << '\n';
    return kCheckFailed;
  }
}

}  // namespace wonham::cli
