#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffbandit/environment.hpp"
#include "ffbandit/policies.hpp"

namespace ffbandit {

/// Configuration problem, tagged with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Scenario { kSynthSparse, kSynthDense, kEtcSweep, kSubsetSweep, kDataset };

std::string to_string(Scenario s);

/// How the hidden weight vector is chosen for dataset runs.
enum class ThetaMode {
  kFile,          // read from the ground-truth file
  kRandomAction,  // a random pool row, scaled to norm S
  kCategory,      // one-vs-rest centroid direction on a category's annotations
};

struct DatasetPaths {
  std::filesystem::path matrix;
  std::filesystem::path annotations;
  std::filesystem::path ground_truth;
  std::filesystem::path labels;
  ThetaMode theta_mode = ThetaMode::kRandomAction;
  std::string category;  // empty: pick one at random per trial
};

struct ExperimentConfig {
  Scenario scenario = Scenario::kSynthSparse;
  std::vector<std::string> algorithms{"OFUL", "FF-OFUL"};
  std::size_t horizon = 4096;
  std::size_t trials = 100;
  std::uint64_t base_seed = 1;

  std::size_t dim = 40;
  std::size_t sparsity = 5;
  std::size_t n_actions = 1000;
  std::size_t action_nnz = 20;

  double reveal_prob = 0.1;
  std::size_t noise_features = 0;  // k'

  RewardModel reward{};
  std::map<std::string, double> ridge{{"OFUL", 0.03125}};
  double default_ridge = 1.0;
  double delta = 0.1;
  double theta_bound = 1.0;
  double action_bound = 1.0;
  bool replacement = true;

  std::vector<std::size_t> etc_budgets{64, 256, 1024, 4096};
  std::vector<std::size_t> subset_sizes{2, 4, 6, 8, 10};

  DatasetPaths dataset;

  double ridge_for(const std::string& algorithm) const;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// Parses the JSON config text. Unknown keys are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace ffbandit
