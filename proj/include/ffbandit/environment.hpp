#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ffbandit/linalg.hpp"
#include "ffbandit/random.hpp"

namespace ffbandit {

class InvalidAction : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class EmptyPool : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A policy's pick: an index into ActionPool::actions().
struct Choice {
  std::size_t action_index = 0;
  bool explored = false;
};

/// The selectable actions. Without replacement, a played index is removed.
class ActionPool {
 public:
  ActionPool() = default;
  ActionPool(std::vector<SparseVector> actions, bool replacement);

  std::size_t size() const { return actions_.size(); }
  std::size_t dim() const { return dim_; }
  bool replacement() const { return replacement_; }
  double norm_bound() const { return norm_bound_; }

  const std::vector<SparseVector>& actions() const { return actions_; }
  const SparseVector& action(std::size_t i) const { return actions_[i]; }

  /// Currently selectable indices, ascending.
  const std::vector<std::size_t>& available() const { return available_; }
  bool is_available(std::size_t i) const;
  bool exhausted() const { return available_.empty(); }

  /// Marks `i` as played. Throws InvalidAction if it is not available.
  void consume(std::size_t i);

  std::size_t random_available(RandomSource& rng) const;

 private:
  std::vector<SparseVector> actions_;
  std::size_t dim_ = 0;
  bool replacement_ = true;
  double norm_bound_ = 0.0;
  std::vector<std::size_t> available_;
  std::vector<char> mask_;
};

/// The hidden weight vector and its support.
class GroundTruth {
 public:
  GroundTruth() = default;
  explicit GroundTruth(SparseVector theta_star);

  const SparseVector& theta_star() const { return theta_; }
  const FeatureSet& support() const { return support_; }
  std::size_t sparsity() const { return support_.size(); }
  double norm() const { return theta_.norm(); }
  const std::vector<double>& dense() const { return dense_; }

  double mean_reward(const SparseVector& x) const { return x.dot(dense_); }

 private:
  SparseVector theta_;
  FeatureSet support_;
  std::vector<double> dense_;
};

/// Simulated user marking relevant features present in the played action.
class FeedbackOracle {
 public:
  FeedbackOracle() = default;
  FeedbackOracle(FeatureSet relevant, FeatureSet noise_features, double reveal_prob);

  const FeatureSet& relevant() const { return relevant_; }
  const FeatureSet& noise_features() const { return noise_; }
  double reveal_prob() const { return reveal_prob_; }

  /// Features that can be reported: relevant plus noise.
  bool markable(std::size_t j) const { return markable_.contains(j); }

 private:
  FeatureSet relevant_;
  FeatureSet noise_;
  FeatureSet markable_;
  double reveal_prob_ = 0.0;
};

enum class RewardKind { kLinearGaussian, kLogisticBinary };

struct RewardModel {
  RewardKind kind = RewardKind::kLinearGaussian;
  double noise_scale = 0.1;
};

struct StepOutcome {
  double reward = 0.0;
  FeatureSet revealed;
  double instantaneous_regret = 0.0;
  double optimal_value = 0.0;

  friend bool operator==(const StepOutcome&, const StepOutcome&) = default;
};

double sigmoid(double z);

/// Maps a mean and one pre-drawn variate to a reward. `variate` is a standard
/// normal for the linear model and a uniform [0,1) for the logistic model.
double realize_reward(const RewardModel& model, double mean, double variate);

double draw_reward(const RewardModel& model, const GroundTruth& truth,
                   const SparseVector& x, RandomSource& rng);

/// Each markable index in supp(x) is reported when coin(j) < p.
template <typename Coin>
FeatureSet draw_feedback(const FeedbackOracle& oracle, const SparseVector& x,
                         Coin&& coin) {
  FeatureSet out;
  if (oracle.reveal_prob() <= 0.0) return out;
  for (const auto& e : x.entries()) {
    if (oracle.markable(e.index) && coin(e.index) < oracle.reveal_prob()) {
      out.insert(e.index);
    }
  }
  return out;
}

FeatureSet draw_feedback(const FeedbackOracle& oracle, const SparseVector& x,
                         RandomSource& rng);

/// Plays `choice` against the pool using sequential draws from `rng`.
StepOutcome env_step(ActionPool& pool, const GroundTruth& truth,
                     const RewardModel& model, const FeedbackOracle& oracle,
                     const Choice& choice, RandomSource& rng);

/// Unit-norm nonnegative sparse actions with `action_nnz` random positions.
std::vector<SparseVector> synth_actions(std::size_t n_actions, std::size_t dim,
                                        std::size_t action_nnz, RandomSource& rng);

/// Gaussian `sparsity_k`-sparse weight vector scaled to norm `norm`.
SparseVector synth_theta(std::size_t dim, std::size_t sparsity_k, RandomSource& rng,
                         double norm = 1.0);

std::pair<ActionPool, GroundTruth> synth_generate(std::size_t n_actions, std::size_t dim,
                                                  std::size_t sparsity_k,
                                                  std::size_t action_nnz,
                                                  RandomSource& rng,
                                                  bool replacement = true);

/// Picks `count` distinct indices of [0, dim) outside `exclude`.
FeatureSet sample_noise_features(std::size_t dim, std::size_t count,
                                 const FeatureSet& exclude, RandomSource& rng);

/// One simulated world for one algorithm run. Reward noise is keyed by step
/// and feedback coins by (step, feature), so two environments built from the
/// same world and seeds produce the same randomness for the same plays.
class Environment {
 public:
  Environment(ActionPool pool, std::shared_ptr<const GroundTruth> truth,
              RewardModel model, FeedbackOracle oracle, std::uint64_t noise_seed,
              std::uint64_t feedback_seed);

  const ActionPool& pool() const { return pool_; }
  const GroundTruth& truth() const { return *truth_; }
  const FeedbackOracle& oracle() const { return oracle_; }
  const RewardModel& model() const { return model_; }
  std::size_t steps() const { return step_; }

  double mean_reward(std::size_t action_index) const { return means_[action_index]; }
  double optimal_value() const;

  StepOutcome step(const Choice& choice);

 private:
  ActionPool pool_;
  std::shared_ptr<const GroundTruth> truth_;
  RewardModel model_;
  FeedbackOracle oracle_;
  std::uint64_t noise_seed_;
  std::uint64_t feedback_seed_;
  std::vector<double> means_;
  double fixed_optimum_ = 0.0;
  std::size_t step_ = 0;
};

}  // namespace ffbandit
