#include "adaptmc/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace adaptmc {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> errs)
    : std::runtime_error([&errs] {
        std::ostringstream os;
        os << "configuration invalid:";
        for (const auto& e : errs) os << "\n  - " << e;
        return os.str();
      }()),
      errors(std::move(errs)) {}

namespace {

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

Matrix to_matrix(const std::vector<std::vector<double>>& m) {
  const Eigen::Index rows = static_cast<Eigen::Index>(m.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(m[0].size()) : 0;
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      out(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return out;
}

struct Validator {
  std::vector<std::string> errors;

  void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) errors.push_back(field + ": " + message);
  }
};

void parse_target(const json& j, TargetConfig& t, Validator& v) {
  t.kind = j.value("kind", "");
  v.require(t.kind == "gaussian" || t.kind == "gaussian_mixture", "target.kind",
            "must be 'gaussian' or 'gaussian_mixture'");
  if (t.kind == "gaussian") {
    t.weights = {1.0};
    if (j.contains("mean")) t.means = {j.at("mean").get<std::vector<double>>()};
    if (j.contains("cov")) {
      t.covs = {j.at("cov").get<std::vector<std::vector<double>>>()};
    }
    v.require(!t.means.empty(), "target.mean", "required");
    v.require(!t.covs.empty(), "target.cov", "required");
  } else if (t.kind == "gaussian_mixture") {
    if (j.contains("weights")) t.weights = j.at("weights").get<std::vector<double>>();
    if (j.contains("means")) {
      t.means = j.at("means").get<std::vector<std::vector<double>>>();
    }
    if (j.contains("covs")) {
      t.covs = j.at("covs").get<std::vector<std::vector<std::vector<double>>>>();
    }
    v.require(!t.weights.empty(), "target.weights", "required");
    v.require(t.weights.size() == t.means.size() && t.weights.size() == t.covs.size(),
              "target", "weights/means/covs must have equal length");
    double sum = 0.0;
    bool positive = true;
    for (double w : t.weights) {
      sum += w;
      positive = positive && w > 0.0;
    }
    v.require(positive, "target.weights", "must be strictly positive");
    v.require(t.weights.empty() || std::abs(sum - 1.0) <= 1e-12, "target.weights",
              "must sum to 1 within 1e-12");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  Validator v;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("json parse error: ") + e.what()});
  }
  ExperimentConfig cfg;

  if (j.contains("target")) {
    parse_target(j.at("target"), cfg.target, v);
  } else {
    v.errors.push_back("target: required block missing");
  }

  if (j.contains("algorithm")) {
    const json& a = j.at("algorithm");
    cfg.algorithm_kind = a.value("kind", "");
    if (cfg.algorithm_kind == "nsrwm") {
      cfg.nsrwm.lambda = a.value("lambda", 0.0);
      v.require(cfg.nsrwm.lambda >= 0.0, "algorithm.lambda", "must be nonnegative");
      if (a.contains("x0")) cfg.nsrwm.x0 = a.at("x0").get<std::vector<double>>();
      if (a.contains("mu0")) cfg.nsrwm.mu0 = a.at("mu0").get<std::vector<double>>();
      if (a.contains("gamma0")) {
        cfg.nsrwm.gamma0 = a.at("gamma0").get<std::vector<std::vector<double>>>();
      }
    } else if (cfg.algorithm_kind == "em_imh") {
      auto& e = cfg.em_imh;
      e.iota = a.value("iota", 0.1);
      v.require(e.iota > 0.0 && e.iota < 1.0, "algorithm.iota", "iota out of (0,1)");
      if (a.contains("x0")) e.x0 = a.at("x0").get<std::vector<double>>();
      if (a.contains("init_weights")) {
        e.init_weights = a.at("init_weights").get<std::vector<double>>();
      }
      if (a.contains("init_means")) {
        e.init_means = a.at("init_means").get<std::vector<std::vector<double>>>();
      }
      if (a.contains("init_covs")) {
        e.init_covs = a.at("init_covs").get<std::vector<std::vector<std::vector<double>>>>();
      }
      if (a.contains("safeguard_mean")) {
        e.safeguard_mean = a.at("safeguard_mean").get<std::vector<double>>();
      }
      if (a.contains("safeguard_cov")) {
        e.safeguard_cov = a.at("safeguard_cov").get<std::vector<std::vector<double>>>();
      }
      v.require(!e.init_weights.empty(), "algorithm.init_weights", "required");
      v.require(e.init_weights.size() == e.init_means.size() &&
                    e.init_weights.size() == e.init_covs.size(),
                "algorithm", "init_weights/init_means/init_covs must have equal length");
    } else {
      v.errors.push_back("algorithm.kind: must be 'nsrwm' or 'em_imh'");
    }
  } else {
    v.errors.push_back("algorithm: required block missing");
  }

  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    cfg.schedule.c0 = s.value("c0", 0.5);
    cfg.schedule.alpha = s.value("alpha", 0.7);
    cfg.schedule.shift = s.value("shift", 0L);
    v.require(cfg.schedule.c0 > 0.0, "schedule.c0", "must be positive");
    v.require(cfg.schedule.alpha > 0.5 && cfg.schedule.alpha <= 1.0, "schedule.alpha",
              "must lie in (1/2, 1] (stepsize summability condition)");
    v.require(cfg.schedule.shift >= 0, "schedule.shift", "must be nonnegative");
  }

  if (j.contains("coverage")) {
    const json& c = j.at("coverage");
    cfg.coverage.M0 = c.value("M0", -1.0);
    cfg.coverage.M1 = c.value("M1", -1.0);
    cfg.coverage.eps0 = c.value("eps0", -1.0);
    cfg.coverage.f0 = c.value("f0", -1.0);
  }

  if (j.contains("run")) {
    const json& r = j.at("run");
    cfg.run.steps = r.value("steps", 1000L);
    cfg.run.burn_in = r.value("burn_in", 0L);
    cfg.run.seed = r.value("seed", std::uint64_t{1});
    cfg.run.replicates = r.value("replicates", 1);
    cfg.run.trace_cadence = r.value("trace_cadence", 1L);
    cfg.run.theta_cadence = r.value("theta_cadence", 1000L);
    v.require(cfg.run.steps >= 1, "run.steps", "must be positive");
    v.require(cfg.run.burn_in >= 0 && cfg.run.burn_in < cfg.run.steps, "run.burn_in",
              "must lie in [0, steps)");
    v.require(cfg.run.replicates >= 1, "run.replicates", "must be positive");
    v.require(cfg.run.trace_cadence >= 1, "run.trace_cadence", "must be positive");
    v.require(cfg.run.theta_cadence >= 1, "run.theta_cadence", "must be positive");
  }

  if (j.contains("diagnostics")) {
    const json& d = j.at("diagnostics");
    if (d.contains("functions")) {
      cfg.diagnostics.functions = d.at("functions").get<std::vector<std::string>>();
    }
    cfg.diagnostics.required_lln = d.value("required_lln", false);
    cfg.diagnostics.batch_count = d.value("batch_count", 30);
    static const std::vector<std::string> known = {"const", "x1",   "x2",
                                                   "x1sq",  "x1x2", "tanh_x1"};
    for (const auto& f : cfg.diagnostics.functions) {
      v.require(std::find(known.begin(), known.end(), f) != known.end(),
                "diagnostics.functions", "unknown function id '" + f + "'");
    }
    v.require(cfg.diagnostics.batch_count >= 2, "diagnostics.batch_count",
              "must be at least 2");
  }

  cfg.output_dir = j.value("output_dir", "out");

  // Cross-field checks that need constructed objects: run them only when the
  // blocks above parsed cleanly.
  if (v.errors.empty()) {
    try {
      const TargetModel t = make_target(cfg.target);
      if (cfg.algorithm_kind == "nsrwm") {
        (void)make_algorithm_nsrwm(cfg, t);
      } else {
        (void)make_algorithm_em_imh(cfg, t);
      }
      (void)make_schedule(cfg);
    } catch (const std::exception& e) {
      v.errors.push_back(std::string("cross-field: ") + e.what());
    }
  }

  if (!v.errors.empty()) throw ConfigError(v.errors);
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json j;
  json t;
  t["kind"] = cfg.target.kind;
  if (cfg.target.kind == "gaussian") {
    t["mean"] = cfg.target.means[0];
    t["cov"] = cfg.target.covs[0];
  } else {
    t["weights"] = cfg.target.weights;
    t["means"] = cfg.target.means;
    t["covs"] = cfg.target.covs;
  }
  j["target"] = t;
  json a;
  a["kind"] = cfg.algorithm_kind;
  if (cfg.algorithm_kind == "nsrwm") {
    a["lambda"] = cfg.nsrwm.lambda;
    a["x0"] = cfg.nsrwm.x0;
    a["mu0"] = cfg.nsrwm.mu0;
    a["gamma0"] = cfg.nsrwm.gamma0;
  } else {
    a["iota"] = cfg.em_imh.iota;
    a["x0"] = cfg.em_imh.x0;
    a["init_weights"] = cfg.em_imh.init_weights;
    a["init_means"] = cfg.em_imh.init_means;
    a["init_covs"] = cfg.em_imh.init_covs;
    if (!cfg.em_imh.safeguard_mean.empty()) {
      a["safeguard_mean"] = cfg.em_imh.safeguard_mean;
      a["safeguard_cov"] = cfg.em_imh.safeguard_cov;
    }
  }
  j["algorithm"] = a;
  j["schedule"] = {{"c0", cfg.schedule.c0},
                   {"alpha", cfg.schedule.alpha},
                   {"shift", cfg.schedule.shift}};
  j["coverage"] = {{"M0", cfg.coverage.M0},
                   {"M1", cfg.coverage.M1},
                   {"eps0", cfg.coverage.eps0},
                   {"f0", cfg.coverage.f0}};
  j["run"] = {{"steps", cfg.run.steps},
              {"burn_in", cfg.run.burn_in},
              {"seed", cfg.run.seed},
              {"replicates", cfg.run.replicates},
              {"trace_cadence", cfg.run.trace_cadence},
              {"theta_cadence", cfg.run.theta_cadence}};
  j["diagnostics"] = {{"functions", cfg.diagnostics.functions},
                      {"required_lln", cfg.diagnostics.required_lln},
                      {"batch_count", cfg.diagnostics.batch_count}};
  j["output_dir"] = cfg.output_dir;
  return j.dump(2);
}

TargetModel make_target(const TargetConfig& cfg) {
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  for (const auto& m : cfg.means) means.push_back(to_vector(m));
  for (const auto& c : cfg.covs) covs.push_back(to_matrix(c));
  return TargetModel::gaussian_mixture(cfg.weights, means, covs);
}

NsrwmAlgorithm make_algorithm_nsrwm(const ExperimentConfig& cfg, const TargetModel& t) {
  const Vector x0 = cfg.nsrwm.x0.empty() ? Vector::Zero(t.dim()) : to_vector(cfg.nsrwm.x0);
  const Vector mu0 = cfg.nsrwm.mu0.empty() ? Vector::Zero(t.dim()) : to_vector(cfg.nsrwm.mu0);
  const Matrix gamma0 = cfg.nsrwm.gamma0.empty()
                            ? Matrix::Identity(t.dim(), t.dim()).eval()
                            : to_matrix(cfg.nsrwm.gamma0);
  NsrwmAlgorithm alg = make_nsrwm_algorithm(t, x0, mu0, gamma0, cfg.nsrwm.lambda);
  if (cfg.coverage.M0 > 0.0) alg.coverage.M0 = cfg.coverage.M0;
  if (cfg.coverage.M1 > 0.0) alg.coverage.M1 = cfg.coverage.M1;
  if (cfg.coverage.eps0 > 0.0) alg.coverage.eps0 = cfg.coverage.eps0;
  if (!alg.in_coverage(0, alg.theta0)) {
    throw std::invalid_argument("theta0 outside K_0 under the configured coverage");
  }
  return alg;
}

EmImhAlgorithm make_algorithm_em_imh(const ExperimentConfig& cfg, const TargetModel& t) {
  const auto& e = cfg.em_imh;
  const Vector x0 = e.x0.empty() ? Vector::Zero(t.dim()) : to_vector(e.x0);
  MixtureXi xi0;
  xi0.weights = e.init_weights;
  for (const auto& m : e.init_means) xi0.means.push_back(to_vector(m));
  for (const auto& c : e.init_covs) xi0.covs.push_back(to_matrix(c));
  FactoredGaussian safeguard;
  if (!e.safeguard_mean.empty()) {
    safeguard = factorize(to_vector(e.safeguard_mean), to_matrix(e.safeguard_cov));
  } else {
    // Default safeguard: wide Gaussian, covariance 25x the largest initial
    // component scale, centered at the initial component-mean average.
    Vector center = Vector::Zero(t.dim());
    double scale = 0.0;
    for (std::size_t jx = 0; jx < xi0.component_count(); ++jx) {
      center += xi0.means[jx] / static_cast<double>(xi0.component_count());
      scale = std::max(scale, eigen_bounds(xi0.covs[jx]).second);
    }
    safeguard = factorize(center, 25.0 * scale * Matrix::Identity(t.dim(), t.dim()));
  }
  EmImhAlgorithm alg = make_em_imh_algorithm(t, x0, xi0, safeguard, e.iota);
  if (cfg.coverage.M0 > 0.0) alg.coverage.M0 = cfg.coverage.M0;
  if (cfg.coverage.M1 > 0.0) alg.coverage.M1 = cfg.coverage.M1;
  if (cfg.coverage.eps0 > 0.0) alg.coverage.eps0 = cfg.coverage.eps0;
  if (cfg.coverage.f0 > 0.0) alg.coverage.f0 = cfg.coverage.f0;
  if (!alg.in_coverage(0, alg.theta0)) {
    throw std::invalid_argument("theta0 outside K_0 under the configured coverage");
  }
  return alg;
}

StepsizeSchedule make_schedule(const ExperimentConfig& cfg) {
  return StepsizeSchedule(cfg.schedule.c0, cfg.schedule.alpha, cfg.schedule.shift);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  // FNV-1a over the canonical serialization; stable across runs.
  const std::string s = serialize_config(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace adaptmc
