#include "adaptmc/config.hpp"
#include "adaptmc/diagnostics.hpp"
#include "adaptmc/trace_io.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <thread>

namespace adaptmc {

namespace {

void put_double(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

}  // namespace

void write_trace_csv(std::ostream& os, const RunTrace& trace, Eigen::Index dim,
                     long cadence) {
  os << "k";
  for (Eigen::Index i = 0; i < dim; ++i) os << ",x" << i;
  os << ",accepted,log_accept,kappa,nu,reinit,floors_active\n";
  for (const auto& r : trace.records) {
    if (r.k % cadence != 0 && !r.reinit && !r.theta_exit) continue;
    os << r.k;
    for (Eigen::Index i = 0; i < dim; ++i) {
      os << ',';
      put_double(os, r.x[i]);
    }
    os << ',' << (r.accepted ? 1 : 0) << ',';
    put_double(os, r.log_accept);
    os << ',' << r.kappa << ',' << r.nu << ',' << (r.reinit ? 1 : 0) << ','
       << (r.floors_active ? 1 : 0) << '\n';
  }
}

void write_theta_csv(std::ostream& os, const RunTrace& trace) {
  const std::size_t p = trace.theta_snapshots.empty()
                            ? trace.final_theta.size()
                            : trace.theta_snapshots[0].second.size();
  os << "k";
  for (std::size_t i = 0; i < p; ++i) os << ",t" << i;
  os << '\n';
  for (const auto& [k, theta] : trace.theta_snapshots) {
    os << k;
    for (double v : theta) {
      os << ',';
      put_double(os, v);
    }
    os << '\n';
  }
}

namespace {

using nlohmann::json;

RunTrace run_one(const ExperimentConfig& cfg, const TargetModel& t, std::uint64_t seed) {
  const StepsizeSchedule schedule = make_schedule(cfg);
  if (cfg.algorithm_kind == "nsrwm") {
    const NsrwmAlgorithm alg = make_algorithm_nsrwm(cfg, t);
    return run(alg, schedule, cfg.run.steps, seed, cfg.run.theta_cadence);
  }
  const EmImhAlgorithm alg = make_algorithm_em_imh(cfg, t);
  return run(alg, schedule, cfg.run.steps, seed, cfg.run.theta_cadence);
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const TargetModel t = make_target(cfg.target);
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) {
    std::cerr << "I/O error: cannot create " << cfg.output_dir << ": " << ec.message()
              << "\n";
    return 3;
  }

  const std::uint64_t hash = config_hash(cfg);
  char tag[32];
  std::snprintf(tag, sizeof(tag), "%016llx", static_cast<unsigned long long>(hash));

  json manifest;
  manifest["config_hash"] = std::string(tag);
  manifest["base_seed"] = cfg.run.seed;
  manifest["replicates"] = cfg.run.replicates;
  manifest["artifacts"] = json::array();
  json reports = json::array();
  bool required_failed = false;

  const int total = cfg.run.replicates;
  const int chunk = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  try {
    for (int base = 0; base < total; base += chunk) {
      const int count = std::min(chunk, total - base);
      std::vector<RunTrace> traces(static_cast<std::size_t>(count));
      std::vector<std::future<void>> futures;
      for (int i = 0; i < count; ++i) {
        futures.push_back(std::async(std::launch::async, [&, i] {
          traces[static_cast<std::size_t>(i)] =
              run_one(cfg, t, cfg.run.seed + static_cast<std::uint64_t>(base + i));
        }));
      }
      for (auto& f : futures) f.get();

      // All file writes happen here, on the calling thread.
      for (int i = 0; i < count; ++i) {
        const int r = base + i;
        const RunTrace& trace = traces[static_cast<std::size_t>(i)];
        const std::string stem =
            cfg.output_dir + "/" + tag + "_s" + std::to_string(cfg.run.seed + r);
        {
          std::ofstream os(stem + "_trace.csv");
          if (!os) return 3;
          write_trace_csv(os, trace, t.dim(), cfg.run.trace_cadence);
        }
        {
          std::ofstream os(stem + "_theta.csv");
          if (!os) return 3;
          write_theta_csv(os, trace);
        }
        manifest["artifacts"].push_back(stem + "_trace.csv");
        manifest["artifacts"].push_back(stem + "_theta.csv");

        json rep;
        rep["replicate"] = r;
        rep["seed"] = cfg.run.seed + static_cast<std::uint64_t>(r);
        rep["acceptance_rate"] = trace.acceptance_rate;
        rep["total_reinits"] = trace.total_reinits;
        rep["final_kappa"] = trace.final_kappa;
        rep["functions"] = json::array();
        for (const auto& fid : cfg.diagnostics.functions) {
          const double pi_f = exact_pi_f(t, fid);
          const ErgodicReport er = ergodic_average(trace, fid, cfg.run.burn_in, pi_f);
          json fj;
          fj["id"] = fid;
          fj["final_average"] = er.final_average;
          fj["pi_f"] = pi_f;
          fj["error"] = er.error;
          const auto values = trace.function_values(test_function(fid), cfg.run.burn_in);
          if (static_cast<int>(values.size()) >= 2 * cfg.diagnostics.batch_count) {
            const double bm = batch_means_variance(values, cfg.diagnostics.batch_count);
            const double band =
                5.0 * std::sqrt(bm) / std::sqrt(static_cast<double>(values.size()));
            fj["sigma_bm"] = std::sqrt(bm);
            fj["lln_band"] = band;
            fj["lln_pass"] = std::abs(er.error) < band;
            if (cfg.diagnostics.required_lln && !(std::abs(er.error) < band)) {
              required_failed = true;
            }
          }
          fj["running"] = json::array();
          for (const auto& [k, avg] : er.running) {
            fj["running"].push_back({k, avg});
          }
          rep["functions"].push_back(fj);
        }
        reports.push_back(rep);
      }
    }

    {
      const std::string path = cfg.output_dir + "/" + tag + "_ergodic.json";
      std::ofstream os(path);
      if (!os) return 3;
      os << reports.dump(2) << '\n';
      manifest["artifacts"].push_back(path);
    }
    {
      const std::string path = cfg.output_dir + "/" + tag + "_config.json";
      std::ofstream os(path);
      if (!os) return 3;
      os << serialize_config(cfg) << '\n';
      manifest["artifacts"].push_back(path);
    }
    {
      std::ofstream os(cfg.output_dir + "/" + tag + "_manifest.json");
      if (!os) return 3;
      os << manifest.dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  }
  return required_failed ? 1 : 0;
}

}  // namespace adaptmc
