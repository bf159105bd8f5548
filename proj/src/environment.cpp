#include "ffbandit/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ffbandit {

ActionPool::ActionPool(std::vector<SparseVector> actions, bool replacement)
    : actions_(std::move(actions)), replacement_(replacement) {
  if (!actions_.empty()) dim_ = actions_.front().dim();
  for (const auto& a : actions_) {
    if (a.dim() != dim_) throw InvalidParameter("actions have mismatched dimensions");
    norm_bound_ = std::max(norm_bound_, a.norm());
  }
  available_.resize(actions_.size());
  std::iota(available_.begin(), available_.end(), std::size_t{0});
  mask_.assign(actions_.size(), 1);
}

bool ActionPool::is_available(std::size_t i) const {
  return i < mask_.size() && mask_[i] != 0;
}

void ActionPool::consume(std::size_t i) {
  if (!is_available(i)) {
    throw InvalidAction("action " + std::to_string(i) + " is not available");
  }
  if (replacement_) return;
  mask_[i] = 0;
  available_.erase(std::lower_bound(available_.begin(), available_.end(), i));
}

std::size_t ActionPool::random_available(RandomSource& rng) const {
  if (available_.empty()) throw EmptyPool("no available actions");
  return available_[rng.index(available_.size())];
}

GroundTruth::GroundTruth(SparseVector theta_star) : theta_(std::move(theta_star)) {
  std::vector<std::size_t> idx;
  idx.reserve(theta_.nnz());
  for (const auto& e : theta_.entries()) idx.push_back(e.index);
  support_ = FeatureSet(std::move(idx));
  dense_.assign(theta_.dim(), 0.0);
  for (const auto& e : theta_.entries()) dense_[e.index] = e.value;
}

FeedbackOracle::FeedbackOracle(FeatureSet relevant, FeatureSet noise_features,
                               double reveal_prob)
    : relevant_(std::move(relevant)),
      noise_(std::move(noise_features)),
      reveal_prob_(reveal_prob) {
  if (!(reveal_prob >= 0.0 && reveal_prob <= 1.0)) {
    throw InvalidParameter("reveal probability must lie in [0, 1]");
  }
  for (auto j : noise_.indices()) {
    if (relevant_.contains(j)) {
      throw InvalidParameter("noise feature " + std::to_string(j) + " is relevant");
    }
  }
  markable_ = relevant_;
  markable_.merge(noise_);
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double realize_reward(const RewardModel& model, double mean, double variate) {
  switch (model.kind) {
    case RewardKind::kLinearGaussian:
      return mean + model.noise_scale * variate;
    case RewardKind::kLogisticBinary:
      return variate < sigmoid(mean) ? 1.0 : 0.0;
  }
  return mean;
}

double draw_reward(const RewardModel& model, const GroundTruth& truth,
                   const SparseVector& x, RandomSource& rng) {
  const double mean = truth.mean_reward(x);
  const double variate =
      model.kind == RewardKind::kLinearGaussian ? rng.normal() : rng.uniform();
  return realize_reward(model, mean, variate);
}

FeatureSet draw_feedback(const FeedbackOracle& oracle, const SparseVector& x,
                         RandomSource& rng) {
  return draw_feedback(oracle, x, [&rng](std::size_t) { return rng.uniform(); });
}

StepOutcome env_step(ActionPool& pool, const GroundTruth& truth,
                     const RewardModel& model, const FeedbackOracle& oracle,
                     const Choice& choice, RandomSource& rng) {
  if (!pool.is_available(choice.action_index)) {
    throw InvalidAction("action " + std::to_string(choice.action_index) +
                        " is not available");
  }
  StepOutcome out;
  out.optimal_value = -std::numeric_limits<double>::infinity();
  for (auto i : pool.available()) {
    out.optimal_value = std::max(out.optimal_value, truth.mean_reward(pool.action(i)));
  }
  const SparseVector& x = pool.action(choice.action_index);
  out.instantaneous_regret = out.optimal_value - truth.mean_reward(x);
  out.reward = draw_reward(model, truth, x, rng);
  out.revealed = draw_feedback(oracle, x, rng);
  pool.consume(choice.action_index);
  return out;
}

std::vector<SparseVector> synth_actions(std::size_t n_actions, std::size_t dim,
                                        std::size_t action_nnz, RandomSource& rng) {
  if (dim == 0 || action_nnz == 0 || action_nnz > dim) {
    throw InvalidParameter("action_nnz must lie in [1, dim]");
  }
  std::vector<std::size_t> positions(dim);
  std::vector<SparseVector> out;
  out.reserve(n_actions);
  for (std::size_t n = 0; n < n_actions; ++n) {
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    // partial Fisher-Yates
    std::vector<Entry> entries;
    entries.reserve(action_nnz);
    double sq = 0.0;
    for (std::size_t i = 0; i < action_nnz; ++i) {
      std::swap(positions[i], positions[i + rng.index(dim - i)]);
      double v = std::abs(rng.normal());
      while (v == 0.0) v = std::abs(rng.normal());
      entries.push_back({positions[i], v});
      sq += v * v;
    }
    const double scale = 1.0 / std::sqrt(sq);
    for (auto& e : entries) e.value *= scale;
    out.emplace_back(dim, std::move(entries));
  }
  return out;
}

SparseVector synth_theta(std::size_t dim, std::size_t sparsity_k, RandomSource& rng,
                         double norm) {
  if (sparsity_k == 0 || sparsity_k > dim) {
    throw InvalidParameter("sparsity_k must lie in [1, dim]");
  }
  if (!(norm > 0.0)) throw InvalidParameter("theta norm must be positive");
  std::vector<std::size_t> positions(dim);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  std::vector<Entry> entries;
  double sq = 0.0;
  for (std::size_t i = 0; i < sparsity_k; ++i) {
    std::swap(positions[i], positions[i + rng.index(dim - i)]);
    double v = rng.normal();
    while (v == 0.0) v = rng.normal();
    entries.push_back({positions[i], v});
    sq += v * v;
  }
  const double scale = norm / std::sqrt(sq);
  for (auto& e : entries) e.value *= scale;
  return SparseVector(dim, std::move(entries));
}

std::pair<ActionPool, GroundTruth> synth_generate(std::size_t n_actions, std::size_t dim,
                                                  std::size_t sparsity_k,
                                                  std::size_t action_nnz,
                                                  RandomSource& rng, bool replacement) {
  if (n_actions == 0) throw InvalidParameter("n_actions must be positive");
  auto actions = synth_actions(n_actions, dim, action_nnz, rng);
  auto theta = synth_theta(dim, sparsity_k, rng);
  return {ActionPool(std::move(actions), replacement), GroundTruth(std::move(theta))};
}

FeatureSet sample_noise_features(std::size_t dim, std::size_t count,
                                 const FeatureSet& exclude, RandomSource& rng) {
  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j < dim; ++j) {
    if (!exclude.contains(j)) candidates.push_back(j);
  }
  if (count > candidates.size()) {
    throw InvalidParameter("not enough irrelevant features for the noise set");
  }
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(candidates[i], candidates[i + rng.index(candidates.size() - i)]);
  }
  candidates.resize(count);
  return FeatureSet(std::move(candidates));
}

Environment::Environment(ActionPool pool, std::shared_ptr<const GroundTruth> truth,
                         RewardModel model, FeedbackOracle oracle,
                         std::uint64_t noise_seed, std::uint64_t feedback_seed)
    : pool_(std::move(pool)),
      truth_(std::move(truth)),
      model_(model),
      oracle_(std::move(oracle)),
      noise_seed_(noise_seed),
      feedback_seed_(feedback_seed) {
  means_.reserve(pool_.size());
  for (const auto& a : pool_.actions()) means_.push_back(truth_->mean_reward(a));
  fixed_optimum_ = means_.empty() ? 0.0 : *std::max_element(means_.begin(), means_.end());
}

double Environment::optimal_value() const {
  if (pool_.replacement()) return fixed_optimum_;
  double best = -std::numeric_limits<double>::infinity();
  for (auto i : pool_.available()) best = std::max(best, means_[i]);
  return best;
}

StepOutcome Environment::step(const Choice& choice) {
  if (!pool_.is_available(choice.action_index)) {
    throw InvalidAction("action " + std::to_string(choice.action_index) +
                        " is not available");
  }
  const std::uint64_t t = step_++;
  StepOutcome out;
  out.optimal_value = optimal_value();
  const double mean = means_[choice.action_index];
  out.instantaneous_regret = out.optimal_value - mean;
  const double variate = model_.kind == RewardKind::kLinearGaussian
                             ? keyed_normal(noise_seed_, t)
                             : keyed_uniform(noise_seed_, t);
  out.reward = realize_reward(model_, mean, variate);
  out.revealed = draw_feedback(oracle_, pool_.action(choice.action_index),
                               [this, t](std::size_t j) {
                                 return keyed_uniform(feedback_seed_, t, j);
                               });
  pool_.consume(choice.action_index);
  return out;
}

}  // namespace ffbandit
