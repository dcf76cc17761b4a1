#pragma once

#include "adaptmc/controller.hpp"

#include <variant>

namespace adaptmc {

struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> errs);
  std::vector<std::string> errors;
};

struct TargetConfig {
  std::string kind;  // "gaussian" | "gaussian_mixture"
  std::vector<double> weights;
  std::vector<std::vector<double>> means;
  std::vector<std::vector<std::vector<double>>> covs;
};

struct NsrwmConfig {
  double lambda = 0.0;  // 0 -> 2.38^2 / n_x
  std::vector<double> x0;
  std::vector<double> mu0;
  std::vector<std::vector<double>> gamma0;
};

struct EmImhConfig {
  double iota = 0.1;
  std::vector<double> x0;
  std::vector<double> init_weights;
  std::vector<std::vector<double>> init_means;
  std::vector<std::vector<std::vector<double>>> init_covs;
  // Empty mean/cov -> default safeguard N(mu0_mean, 25 * scale of init covs).
  std::vector<double> safeguard_mean;
  std::vector<std::vector<double>> safeguard_cov;
};

struct ScheduleConfig {
  double c0 = 0.5;
  double alpha = 0.7;
  long shift = 0;
};

struct CoverageOverrides {
  // Negative values mean "use the derived default".
  double M0 = -1.0;
  double M1 = -1.0;
  double eps0 = -1.0;
  double f0 = -1.0;
};

struct RunConfig {
  long steps = 1000;
  long burn_in = 0;
  std::uint64_t seed = 1;
  int replicates = 1;
  long trace_cadence = 1;
  long theta_cadence = 1000;
};

struct DiagnosticsConfig {
  std::vector<std::string> functions{"x1"};
  // When true, the LLN band check |S_n - pi(f)| < 5 sigma_bm / sqrt(n) is a
  // hard requirement and its failure makes run_experiment exit nonzero.
  bool required_lln = false;
  int batch_count = 30;
};

struct ExperimentConfig {
  TargetConfig target;
  std::string algorithm_kind;  // "nsrwm" | "em_imh"
  NsrwmConfig nsrwm;
  EmImhConfig em_imh;
  ScheduleConfig schedule;
  CoverageOverrides coverage;
  RunConfig run;
  DiagnosticsConfig diagnostics;
  std::string output_dir = "out";
};

// Parses and validates; throws ConfigError carrying the complete list of
// violations (not just the first).
ExperimentConfig parse_config(const std::string& text);

std::string serialize_config(const ExperimentConfig& cfg);

TargetModel make_target(const TargetConfig& cfg);
NsrwmAlgorithm make_algorithm_nsrwm(const ExperimentConfig& cfg, const TargetModel& t);
EmImhAlgorithm make_algorithm_em_imh(const ExperimentConfig& cfg, const TargetModel& t);
StepsizeSchedule make_schedule(const ExperimentConfig& cfg);

std::uint64_t config_hash(const ExperimentConfig& cfg);

// Executes the configured runs and writes traces, theta sidecars, reports and
// a manifest under output_dir. Returns 0 on success, 1 when a required
// diagnostic fails, 3 on I/O error.
int run_experiment(const ExperimentConfig& cfg);

}  // namespace adaptmc
