#include "ffbandit/policies.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace ffbandit {

void ConfidenceParams::validate() const {
  if (!(noise_scale >= 0.0)) throw InvalidParameter("noise_scale must be non-negative");
  if (!(theta_bound > 0.0)) throw InvalidParameter("theta_bound must be positive");
  if (!(ridge > 0.0)) throw InvalidParameter("ridge must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidParameter("delta must lie in (0, 1]");
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kOful: return "OFUL";
    case PolicyKind::kFfOful: return "FF-OFUL";
    case PolicyKind::kFfEpochOful: return "FF-EPOCH-OFUL";
    case PolicyKind::kEtc: return "ETC";
    case PolicyKind::kRandom: return "RANDOM";
  }
  return "?";
}

PolicyKind parse_policy_kind(std::string_view name) {
  for (auto k : {PolicyKind::kOful, PolicyKind::kFfOful, PolicyKind::kFfEpochOful,
                 PolicyKind::kEtc, PolicyKind::kRandom}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidParameter("unknown algorithm \"" + std::string(name) + "\"");
}

double confidence_radius(const DesignState& design, const ConfidenceParams& params) {
  const double m = static_cast<double>(design.dim());
  const double inner = 2.0 * std::log(1.0 / params.delta) + design.logdet -
                       m * std::log(design.ridge);
  return params.noise_scale * std::sqrt(std::max(inner, 0.0)) +
         std::sqrt(design.ridge) * params.theta_bound;
}

double ucb_score(const DesignState& design, double radius, const SparseVector& x) {
  return ucb_score(design, radius, restrict_to(x, design.features));
}

double ucb_score(const DesignState& design, double radius, const LocalEntries& x_r) {
  return predicted(design, x_r) + radius * inv_norm(design, x_r);
}

bool in_confidence_set(const DesignState& design, double radius,
                       const Eigen::VectorXd& theta_restricted) {
  const Eigen::VectorXd diff = design.estimate - theta_restricted;
  return diff.dot(design.gram * diff) <= radius * radius;
}

Choice select_ucb(const ActionPool& pool, const DesignState& design,
                  const ConfidenceParams& params) {
  if (pool.exhausted()) throw EmptyPool("cannot select from an empty pool");
  const double radius = confidence_radius(design, params);
  Choice best{pool.available().front(), false};
  double best_score = -std::numeric_limits<double>::infinity();
  for (auto i : pool.available()) {
    const double s = ucb_score(design, radius, pool.action(i));
    if (s > best_score) {
      best_score = s;
      best.action_index = i;
    }
  }
  return best;
}

Choice select_ucb(const ActionPool& pool, const DesignState& design, double radius,
                  const std::vector<LocalEntries>& restricted) {
  if (pool.exhausted()) throw EmptyPool("cannot select from an empty pool");
  Choice best{pool.available().front(), false};
  double best_score = -std::numeric_limits<double>::infinity();
  for (auto i : pool.available()) {
    const double s = ucb_score(design, radius, restricted[i]);
    if (s > best_score) {
      best_score = s;
      best.action_index = i;
    }
  }
  return best;
}

double ff_schedule(std::size_t t) {
  if (t <= 1) return 1.0;
  return std::min(1.0, 1.0 / std::sqrt(static_cast<double>(t)));
}

double epoch_constant(double delta1) {
  if (!(delta1 > 0.0 && delta1 < 1.0)) throw InvalidParameter("delta1 must lie in (0, 1)");
  return std::sqrt(2.0 * std::log(2.0 / delta1));
}

namespace {

double epoch_rate(std::size_t t, double c) {
  const int s = std::bit_width(std::max<std::size_t>(t, 1)) - 1;  // floor(log2 t)
  return std::min(1.0, c / std::sqrt(std::ldexp(1.0, s)));
}

}  // namespace

double ff_epoch_schedule(std::size_t t, double delta1) {
  return epoch_rate(t, epoch_constant(delta1));
}

EpochDeltas epoch_deltas(double delta, std::size_t horizon) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidParameter("delta must lie in (0, 1)");
  const double half = static_cast<double>(horizon) / 2.0;
  const double m = half > 2.0 ? std::ceil(std::log2(half)) : 1.0;
  const double epochs = std::max(1.0, m);
  return {delta / (3.0 * epochs), delta / 3.0, delta / (3.0 * epochs),
          static_cast<std::size_t>(epochs)};
}

PolicyState::PolicyState(PolicyConfig config, std::size_t dim)
    : config_(std::move(config)), dim_(dim) {
  config_.params.validate();
  switch (config_.kind) {
    case PolicyKind::kOful:
      discovered_ = config_.features.value_or(FeatureSet::range(dim));
      features_fixed_ = true;
      break;
    case PolicyKind::kFfEpochOful: {
      if (config_.horizon == 0) {
        throw InvalidParameter("the epoch schedule needs a positive horizon");
      }
      epoch_c_ = epoch_constant(epoch_deltas(config_.params.delta, config_.horizon).delta1);
      discovered_ = config_.features.value_or(FeatureSet{});
      break;
    }
    case PolicyKind::kEtc:
      discovered_ = config_.features.value_or(FeatureSet{});
      features_fixed_ = config_.etc_budget == 0;
      break;
    case PolicyKind::kFfOful:
    case PolicyKind::kRandom:
      discovered_ = config_.features.value_or(FeatureSet{});
      break;
  }
  for (auto j : discovered_.indices()) {
    if (j >= dim) throw InvalidParameter("feature index out of range");
  }
  design_ = new_design_state(discovered_, config_.params.ridge);
}

bool PolicyState::bootstrapping() const {
  return (config_.kind == PolicyKind::kFfOful || config_.kind == PolicyKind::kFfEpochOful) &&
         discovered_.empty();
}

double PolicyState::radius() const { return confidence_radius(design_, config_.params); }

double PolicyState::exploration_rate() const {
  const std::size_t t = step_count() + 1;
  switch (config_.kind) {
    case PolicyKind::kOful: return 0.0;
    case PolicyKind::kRandom: return 1.0;
    case PolicyKind::kEtc: return t <= config_.etc_budget ? 1.0 : 0.0;
    case PolicyKind::kFfOful: return bootstrapping() ? 1.0 : ff_schedule(t);
    case PolicyKind::kFfEpochOful: return bootstrapping() ? 1.0 : epoch_rate(t, *epoch_c_);
  }
  return 1.0;
}

Choice PolicyState::choose(const ActionPool& pool, RandomSource& rng) {
  switch (config_.kind) {
    case PolicyKind::kOful:
      if (pool.exhausted()) throw EmptyPool("cannot select from an empty pool");
      return exploit(pool);
    case PolicyKind::kFfOful:
    case PolicyKind::kFfEpochOful:
      return ff_oful_step(*this, pool, rng);
    case PolicyKind::kEtc:
      return etc_step(*this, pool, rng);
    case PolicyKind::kRandom:
      return {pool.random_available(rng), true};
  }
  return {};
}

void PolicyState::observe(const SparseVector& x, double reward, const FeatureSet& revealed) {
  history_.push_back({x, reward});
  apply_feedback(*this, revealed);
}

Choice PolicyState::exploit(const ActionPool& pool) {
  return select_ucb(pool, design_, radius(), restricted(pool));
}

void PolicyState::rebuild_design() {
  design_ = recompute(history_, discovered_, config_.params.ridge);
  restricted_stale_ = true;
  ++recomputes_;
}

const std::vector<LocalEntries>& PolicyState::restricted(const ActionPool& pool) {
  if (restricted_stale_ || restricted_pool_ != &pool ||
      restricted_.size() != pool.size()) {
    restricted_.clear();
    restricted_.reserve(pool.size());
    for (const auto& a : pool.actions()) restricted_.push_back(restrict_to(a, discovered_));
    restricted_pool_ = &pool;
    restricted_stale_ = false;
  }
  return restricted_;
}

Choice ff_oful_step(PolicyState& state, const ActionPool& pool, RandomSource& rng) {
  if (pool.exhausted()) throw EmptyPool("cannot select from an empty pool");
  if (rng.bernoulli(state.exploration_rate())) {
    return {pool.random_available(rng), true};
  }
  return state.exploit(pool);
}

Choice etc_step(PolicyState& state, const ActionPool& pool, RandomSource& rng) {
  if (pool.exhausted()) throw EmptyPool("cannot select from an empty pool");
  if (state.step_count() < state.config_.etc_budget) {
    return {pool.random_available(rng), true};
  }
  state.features_fixed_ = true;
  return state.exploit(pool);
}

void apply_feedback(PolicyState& state, const FeatureSet& revealed) {
  if (state.config_.kind == PolicyKind::kRandom) {
    state.discovered_.merge(revealed);
    return;
  }
  const bool grows = !state.features_fixed_ && !state.discovered_.includes(revealed);
  if (grows) {
    state.discovered_.merge(revealed);
    state.rebuild_design();
    return;
  }
  if (state.history_.empty()) return;
  const Observation& last = state.history_.back();
  rank_one_update(state.design_, last.action, last.reward);
}

std::size_t default_bootstrap_cap(double reveal_prob, std::size_t dim) {
  const double inv = reveal_prob > 0.0 ? std::ceil(1.0 / reveal_prob) : 1.0;
  return static_cast<std::size_t>(10.0 * inv) * std::max<std::size_t>(dim, 1);
}

BootstrapResult bootstrap(Environment& env, RandomSource& rng,
                          std::optional<std::size_t> step_cap) {
  const std::size_t cap =
      step_cap.value_or(default_bootstrap_cap(env.oracle().reveal_prob(), env.pool().dim()));
  BootstrapResult out;
  while (out.discovered.empty()) {
    if (out.history.size() >= cap) {
      throw BootstrapTimeout("no feature revealed after " + std::to_string(cap) +
                             " random plays");
    }
    const std::size_t i = env.pool().random_available(rng);
    const SparseVector& x = env.pool().action(i);
    StepOutcome o = env.step({i, true});
    out.history.push_back({x, o.reward});
    out.discovered = o.revealed;
    out.outcomes.push_back(std::move(o));
  }
  return out;
}

}  // namespace ffbandit
