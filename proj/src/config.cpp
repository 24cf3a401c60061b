#include "wonham/config.hpp"

#include <fstream>
#include <sstream>

namespace wonham {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::Config, field + ": " + what);
}

const json& member(const json& obj, const std::string& parent, const char* key) {
  const std::string field = parent.empty() ? key : parent + "." + key;
  if (!obj.is_object()) fail(parent.empty() ? "<root>" : parent, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(field, "missing required field");
  return *it;
}

double number(const json& value, const std::string& field) {
  if (!value.is_number()) fail(field, "expected a number");
  return value.get<double>();
}

double number_or(const json& obj, const std::string& parent, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  return number(obj.at(key), parent + "." + key);
}

std::vector<double> real_vector(const json& value, const std::string& field) {
  if (!value.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(number(value[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

ProbabilitySimplex simplex(const json& value, const std::string& field, std::size_t d) {
  const auto weights = real_vector(value, field);
  if (weights.size() != d) {
    fail(field, "expected " + std::to_string(d) + " entries, got " + std::to_string(weights.size()));
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!(weights[i] > 0.0)) {
      fail(field + "[" + std::to_string(i) + "]",
           "initial laws must be strictly positive (got " + std::to_string(weights[i]) + ")");
    }
  }
  return ProbabilitySimplex(std::span<const double>(weights));
}

GeneratorMatrix generator(const json& value) {
  if (!value.is_array() || value.empty()) fail("generator", "expected a square matrix");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < value.size(); ++i) {
    rows.push_back(real_vector(value[i], "generator[" + std::to_string(i) + "]"));
    if (rows.back().size() != value.size()) {
      fail("generator[" + std::to_string(i) + "]",
           "expected " + std::to_string(value.size()) + " entries");
    }
  }
  try {
    return make_generator(rows);
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, e.detail());
  }
}

std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, locate(text, e.byte) + ": " + e.what());
  }

  const json& version = member(doc, "", "schema_version");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
    fail("schema_version", "expected " + std::to_string(kSchemaVersion));
  }

  GeneratorMatrix gen = generator(member(doc, "", "generator"));
  const std::size_t d = gen.dim();

  const json& initial = member(doc, "", "initial");
  ProbabilitySimplex nu = simplex(member(initial, "initial", "nu"), "initial.nu", d);
  ProbabilitySimplex beta = simplex(member(initial, "initial", "beta"), "initial.beta", d);
  std::optional<ProbabilitySimplex> beta2;
  if (initial.contains("beta2")) beta2 = simplex(initial.at("beta2"), "initial.beta2", d);

  const json& obs = member(doc, "", "observation");
  const auto h = real_vector(member(obs, "observation", "h"), "observation.h");
  if (h.size() != d) fail("observation.h", "expected " + std::to_string(d) + " entries");
  const double sigma = number(member(obs, "observation", "sigma"), "observation.sigma");
  if (!(sigma > 0.0)) fail("observation.sigma", "must be > 0");
  bool noise_off = false;
  if (obs.contains("noise_off")) {
    if (!obs.at("noise_off").is_boolean()) fail("observation.noise_off", "expected a boolean");
    noise_off = obs.at("noise_off").get<bool>();
  }

  const json& run = member(doc, "", "run");
  const double horizon = number(member(run, "run", "T"), "run.T");
  const double step = number(member(run, "run", "dt"), "run.dt");
  if (!(horizon > 0.0)) fail("run.T", "must be > 0");
  if (!(step > 0.0)) fail("run.dt", "must be > 0");
  try {
    grid_steps(horizon, step);
  } catch (const Error& e) {
    fail("run.dt", e.detail());
  }
  std::size_t replicates = 1;
  if (run.contains("replicates")) {
    const json& r = run.at("replicates");
    if (!r.is_number_unsigned() || r.get<std::uint64_t>() < 1) {
      fail("run.replicates", "expected an integer >= 1");
    }
    replicates = r.get<std::size_t>();
  }
  std::uint64_t seed = 0;
  if (run.contains("seed")) {
    if (!run.at("seed").is_number_unsigned()) fail("run.seed", "expected an unsigned 64-bit integer");
    seed = run.at("seed").get<std::uint64_t>();
  }
  IntegratorScheme scheme = IntegratorScheme::SplitBayes;
  if (run.contains("scheme")) {
    if (!run.at("scheme").is_string()) fail("run.scheme", "expected a string");
    try {
      scheme = parse_scheme(run.at("scheme").get<std::string>());
    } catch (const Error& e) {
      fail("run.scheme", e.detail());
    }
  }

  ExperimentConfig cfg{
      .generator = std::move(gen),
      .nu = std::move(nu),
      .beta = std::move(beta),
      .beta2 = std::move(beta2),
      .model = ObservationModel(Eigen::Map<const Vector>(h.data(), static_cast<Eigen::Index>(d)),
                                sigma),
      .horizon = horizon,
      .step = step,
      .replicates = replicates,
      .seed = seed,
      .scheme = scheme,
      .noise = noise_off ? NoiseMode::Off : NoiseMode::On,
      .slack = Slack{},
      .posterior_slack = 1.05,
      .window_begin = 0.2 * horizon,
      .window_end = 0.8 * horizon,
  };

  if (doc.contains("checks")) {
    const json& checks = doc.at("checks");
    if (!checks.is_object()) fail("checks", "expected an object");
    cfg.slack.mult = number_or(checks, "checks", "slack_mult", cfg.slack.mult);
    cfg.slack.add = number_or(checks, "checks", "slack_add", cfg.slack.add);
    cfg.posterior_slack = number_or(checks, "checks", "posterior_slack", cfg.posterior_slack);
    if (checks.contains("window")) {
      const auto w = real_vector(checks.at("window"), "checks.window");
      if (w.size() != 2) fail("checks.window", "expected [t0, t1]");
      cfg.window_begin = w[0];
      cfg.window_end = w[1];
    }
  }

  try {
    cfg.validate();
  } catch (const Error& e) {
    fail("config", e.detail());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  using nlohmann::json;
  auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  json gen = json::array();
  for (Eigen::Index i = 0; i < cfg.generator.rates().rows(); ++i) {
    gen.push_back(vec(cfg.generator.rates().row(i).transpose()));
  }
  json initial = {{"nu", vec(cfg.nu.weights())}, {"beta", vec(cfg.beta.weights())}};
  if (cfg.beta2) initial["beta2"] = vec(cfg.beta2->weights());
  return json{
      {"schema_version", kSchemaVersion},
      {"generator", gen},
      {"initial", initial},
      {"observation",
       {{"h", vec(cfg.model.h)},
        {"sigma", cfg.model.sigma},
        {"noise_off", cfg.noise == NoiseMode::Off}}},
      {"run",
       {{"T", cfg.horizon},
        {"dt", cfg.step},
        {"replicates", cfg.replicates},
        {"seed", cfg.seed},
        {"scheme", std::string(to_string(cfg.scheme))}}},
      {"checks",
       {{"slack_mult", cfg.slack.mult},
        {"slack_add", cfg.slack.add},
        {"posterior_slack", cfg.posterior_slack},
        {"window", {cfg.window_begin, cfg.window_end}}}},
  };
}

}  // namespace wonham
