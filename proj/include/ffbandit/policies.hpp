#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ffbandit/environment.hpp"
#include "ffbandit/linalg.hpp"
#include "ffbandit/random.hpp"

namespace ffbandit {

class BootstrapTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Constants of the confidence ellipsoid: R (noise), S (bound on |theta*|),
/// ridge lambda and failure probability delta.
struct ConfidenceParams {
  double noise_scale = 0.1;
  double theta_bound = 1.0;
  double ridge = 1.0;
  double delta = 0.1;

  void validate() const;
};

enum class PolicyKind { kOful, kFfOful, kFfEpochOful, kEtc, kRandom };

std::string_view to_string(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view name);

/// sqrt(beta) = R sqrt(2 ln(1/delta) + logdet - m ln(lambda)) + sqrt(lambda) S.
double confidence_radius(const DesignState& design, const ConfidenceParams& params);

/// max over the ellipsoid of <x_r, theta> = <estimate, x_r> + radius |x_r|_{V^-1}.
double ucb_score(const DesignState& design, double radius, const SparseVector& x);
double ucb_score(const DesignState& design, double radius, const LocalEntries& x_r);

/// True when |estimate - theta_r|_{gram} <= radius.
bool in_confidence_set(const DesignState& design, double radius,
                       const Eigen::VectorXd& theta_restricted);

/// Argmax of ucb_score over the available actions; ties go to the lowest index.
Choice select_ucb(const ActionPool& pool, const DesignState& design,
                  const ConfidenceParams& params);

/// Same scan over precomputed restrictions of every pool action.
Choice select_ucb(const ActionPool& pool, const DesignState& design, double radius,
                  const std::vector<LocalEntries>& restricted);

/// min(1, 1/sqrt(t)).
double ff_schedule(std::size_t t);

/// sqrt(2 ln(2/delta1)).
double epoch_constant(double delta1);

/// min(1, c / sqrt(2^floor(log2 t))) with c = epoch_constant(delta1).
double ff_epoch_schedule(std::size_t t, double delta1);

/// delta1 = delta3 = delta/(3M), delta2 = delta/3, M = ceil(log2(T/2)) >= 1.
struct EpochDeltas {
  double delta1;
  double delta2;
  double delta3;
  std::size_t epochs;
};
EpochDeltas epoch_deltas(double delta, std::size_t horizon);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kFfOful;
  ConfidenceParams params;
  /// T0 for explore-then-commit.
  std::size_t etc_budget = 0;
  /// Horizon used to size the epoch schedule.
  std::size_t horizon = 0;
  /// Fixed feature set for OFUL (default: all features) or a pre-seeded
  /// discovered set for the feedback-driven policies.
  std::optional<FeatureSet> features;
};

/// Mutable state of one policy over one run.
class PolicyState {
 public:
  PolicyState(PolicyConfig config, std::size_t dim);

  PolicyKind kind() const { return config_.kind; }
  const ConfidenceParams& params() const { return config_.params; }
  const FeatureSet& discovered() const { return discovered_; }
  const DesignState& design() const { return design_; }
  const History& history() const { return history_; }
  std::size_t step_count() const { return history_.size(); }
  std::optional<double> epoch_c() const { return epoch_c_; }
  std::size_t recomputes() const { return recomputes_; }

  /// Whether the next step is still in the initial random-play phase.
  bool bootstrapping() const;

  /// Current confidence radius of the design.
  double radius() const;

  /// Exploration probability the policy will use on its next step.
  double exploration_rate() const;

  Choice choose(const ActionPool& pool, RandomSource& rng);

  /// Appends (x, reward) to the history and folds in the revealed features.
  void observe(const SparseVector& x, double reward, const FeatureSet& revealed);

  friend void apply_feedback(PolicyState& state, const FeatureSet& revealed);
  friend Choice ff_oful_step(PolicyState& state, const ActionPool& pool, RandomSource& rng);
  friend Choice etc_step(PolicyState& state, const ActionPool& pool, RandomSource& rng);

 private:
  Choice exploit(const ActionPool& pool);
  void rebuild_design();
  const std::vector<LocalEntries>& restricted(const ActionPool& pool);

  PolicyConfig config_;
  std::size_t dim_;
  FeatureSet discovered_;
  DesignState design_;
  History history_;
  bool features_fixed_ = false;
  std::optional<double> epoch_c_;
  std::size_t recomputes_ = 0;

  std::vector<LocalEntries> restricted_;
  const ActionPool* restricted_pool_ = nullptr;
  bool restricted_stale_ = true;
};

/// Feedback-driven exploration step: random with probability min(1, 1/sqrt(t)),
/// otherwise UCB on the discovered features.
Choice ff_oful_step(PolicyState& state, const ActionPool& pool, RandomSource& rng);

/// Random for the first T0 steps, then UCB on the features found so far.
Choice etc_step(PolicyState& state, const ActionPool& pool, RandomSource& rng);

/// Folds the latest observation into the design: rank-one when nothing new
/// was revealed, full recompute over the history when the feature set grows.
void apply_feedback(PolicyState& state, const FeatureSet& revealed);

struct BootstrapResult {
  FeatureSet discovered;
  History history;
  std::vector<StepOutcome> outcomes;
};

/// Default cap: 10 * ceil(1/p) * d (10 * d when p is 0).
std::size_t default_bootstrap_cap(double reveal_prob, std::size_t dim);

/// Plays random actions until some feature is revealed.
BootstrapResult bootstrap(Environment& env, RandomSource& rng,
                          std::optional<std::size_t> step_cap = std::nullopt);

}  // namespace ffbandit
