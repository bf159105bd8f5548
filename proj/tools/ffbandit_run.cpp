// Runs a configured regret experiment and writes per-step and summary CSVs.
//
//   ffbandit_run --config exp.json --out results.csv [--seed N] [--trials N]
//                [--algorithms OFUL,FF-OFUL] [--workers N] [--bounds PATH] [--quiet]
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "ffbandit/config.hpp"
#include "ffbandit/harness.hpp"
#include "ffbandit/theory.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::filesystem::path summary_path(const std::filesystem::path& out) {
  auto p = out;
  p.replace_filename(out.stem().string() + "_summary.csv");
  return p;
}

void write_bounds(const std::filesystem::path& path, const ffbandit::ExperimentConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t,oful_bound,ff_bound,ff_discovery,ff_exploration,ff_restricted\n";
  out << std::setprecision(10);
  ffbandit::BoundInputs in;
  in.ambient_dim = cfg.dim;
  in.sparsity = cfg.sparsity + cfg.noise_features;
  in.noise_scale = cfg.reward.noise_scale;
  in.theta_bound = cfg.theta_bound;
  in.action_bound = cfg.action_bound;
  in.delta = cfg.delta;
  in.reveal_prob = std::clamp(cfg.reveal_prob, 1e-12, 1.0 - 1e-12);
  for (std::size_t t = 4; t <= cfg.horizon; t *= 2) {
    in.horizon = t;
    in.ridge = cfg.ridge_for("OFUL");
    const double oful = ffbandit::oful_bound(in);
    in.ridge = cfg.ridge_for("FF-OFUL");
    const auto ff = ffbandit::ff_bound(in);
    out << t << ',' << oful << ',' << ff.total() << ',' << ff.discovery << ','
        << ff.exploration << ',' << ff.restricted << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature-feedback linear bandit experiment runner"};
  std::string config_path;
  std::string out_path = "regret.csv";
  std::string bounds_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string algorithms;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  bool quiet = false;

  app.add_option("--config", config_path, "Experiment config (JSON)")->required();
  app.add_option("--out", out_path, "Per-step records CSV");
  app.add_option("--seed", seed, "Override base_seed");
  app.add_option("--trials", trials, "Override trial count");
  app.add_option("--algorithms", algorithms, "Comma-separated subset of configured algorithms");
  app.add_option("--workers", workers, "Worker threads");
  app.add_option("--bounds", bounds_path, "Also write analytical regret envelopes here");
  app.add_flag("--quiet", quiet, "Suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  ffbandit::ExperimentConfig cfg;
  try {
    cfg = ffbandit::load_config(config_path);
    if (seed) cfg.base_seed = *seed;
    if (trials) cfg.trials = *trials;
    if (!algorithms.empty()) {
      const auto keep = split_csv(algorithms);
      for (const auto& name : keep) {
        if (std::find(cfg.algorithms.begin(), cfg.algorithms.end(), name) ==
            cfg.algorithms.end()) {
          throw ffbandit::ConfigError("--algorithms", "\"" + name + "\" is not configured");
        }
      }
      std::erase_if(cfg.algorithms, [&](const std::string& a) {
        return std::find(keep.begin(), keep.end(), a) == keep.end();
      });
    }
    cfg.validate();
  } catch (const ffbandit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    if (!quiet) {
      std::cerr << "running " << ffbandit::to_string(cfg.scenario) << ": " << cfg.trials
                << " trials, T=" << cfg.horizon << ", " << workers << " worker(s)\n";
    }
    const auto records = ffbandit::run_experiment(cfg, workers);
    const auto summary = ffbandit::aggregate(records);

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    ffbandit::write_records_csv(out, records);
    std::ofstream sum(summary_path(out_path));
    if (!sum) throw std::runtime_error("cannot write " + summary_path(out_path).string());
    ffbandit::write_summary_csv(sum, summary);
    if (!bounds_path.empty()) write_bounds(bounds_path, cfg);

    if (!quiet) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                        start).count();
      std::size_t last_t = 0;
      for (const auto& row : summary) last_t = std::max(last_t, row.t);
      for (const auto& row : summary) {
        if (row.t != last_t) continue;
        std::cerr << "  " << std::left << std::setw(16) << row.algorithm
                  << " mean R_T = " << std::fixed << std::setprecision(2)
                  << row.mean_cum_regret << " +/- " << row.ci95_halfwidth << '\n';
      }
      std::cerr << "wrote " << out_path << " and " << summary_path(out_path).string()
                << " in " << std::setprecision(1) << secs << " s\n";
    }
  } catch (const ffbandit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
