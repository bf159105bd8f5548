#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffbandit/config.hpp"
#include "ffbandit/dataset.hpp"
#include "ffbandit/environment.hpp"

namespace ffbandit {

class EmptyInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One logged step of one algorithm in one trial.
struct RegretRecord {
  std::size_t trial = 0;
  std::size_t t = 0;  // 1-based step
  std::string algorithm;
  std::size_t action_index = 0;
  bool explored = false;
  double instant_regret = 0.0;
  double cumulative_regret = 0.0;
  std::size_t discovered_count = 0;

  friend bool operator==(const RegretRecord&, const RegretRecord&) = default;
};

struct SummaryRow {
  std::string algorithm;
  std::size_t t = 0;
  double mean_cum_regret = 0.0;
  double stderr_ = 0.0;
  double ci95_halfwidth = 0.0;
  std::size_t trials = 0;
};

/// The generated world for one trial, shared read-only by every algorithm.
struct World {
  ActionPool pool;
  std::shared_ptr<const GroundTruth> truth;
  FeedbackOracle oracle;
  std::uint64_t noise_seed = 0;
  std::uint64_t feedback_seed = 0;
};

/// Dataset files loaded once and reused across trials.
struct LoadedDataset {
  std::vector<SparseVector> rows;
  std::vector<Category> categories;
  std::vector<std::string> labels;
  SparseVector ground_truth;
};

LoadedDataset load_dataset(const DatasetPaths& paths);

/// Steps are logged every step up to this horizon, then every kSparseCadence.
inline constexpr std::size_t kDenseLogHorizon = std::size_t{1} << 13;
inline constexpr std::size_t kSparseCadence = 32;

/// An algorithm as run by the harness: a tag plus its policy settings.
struct AlgorithmSpec {
  std::string tag;
  PolicyConfig policy;
};

std::vector<AlgorithmSpec> expand_algorithms(const ExperimentConfig& config);

World build_world(const ExperimentConfig& config, std::size_t trial_index,
                  const LoadedDataset* dataset = nullptr);

/// Called after every step with the policy state and the step's outcome.
using StepObserver = std::function<void(const PolicyState&, const StepOutcome&)>;

/// Runs one policy for `horizon` steps against a fresh copy of the world.
std::vector<RegretRecord> run_algorithm(const World& world, const AlgorithmSpec& spec,
                                        const ExperimentConfig& config,
                                        std::size_t trial_index,
                                        const StepObserver& observer = {});

/// Every configured algorithm on the same world; records ordered by
/// (algorithm, t).
std::vector<RegretRecord> run_trial(const ExperimentConfig& config,
                                    std::size_t trial_index,
                                    const LoadedDataset* dataset = nullptr);

/// All trials on up to `workers` threads; output sorted by (trial, algorithm, t)
/// and identical for any worker count.
std::vector<RegretRecord> run_experiment(const ExperimentConfig& config,
                                         std::size_t workers = 1);

/// Mean cumulative regret, standard error and 95% normal half-width across
/// trials for every (algorithm, t).
std::vector<SummaryRow> aggregate(const std::vector<RegretRecord>& records);

/// Restricted OFUL on random j-subsets of the support, plus full OFUL.
std::vector<SummaryRow> subset_sweep(const ExperimentConfig& config,
                                     std::size_t workers = 1);

void write_records_csv(std::ostream& out, const std::vector<RegretRecord>& records);
std::vector<RegretRecord> read_records_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace ffbandit
