#pragma once

#include <cstddef>
#include <utility>

namespace ffbandit {

/// Problem constants shared by the regret-bound calculators.
struct BoundInputs {
  std::size_t horizon = 1;      // T (or t)
  std::size_t ambient_dim = 1;  // d
  std::size_t sparsity = 1;     // k
  double noise_scale = 0.1;     // R
  double theta_bound = 1.0;     // S
  double action_bound = 1.0;    // L
  double ridge = 1.0;           // lambda
  double delta = 0.1;
  double reveal_prob = 0.1;     // p
};

/// High-probability OFUL regret bound in ambient dimension d after t steps.
double oful_bound(const BoundInputs& in);

struct FfBound {
  double discovery;    // exploring until every relevant feature is seen
  double exploration;  // residual random plays after discovery
  double restricted;   // OFUL on the k discovered features
  double total() const { return discovery + exploration + restricted; }
};

/// Feature-feedback regret bound after T >= 4 steps (M = log2(T/2) epochs,
/// with the restricted OFUL term evaluated at n = T/2).
FfBound ff_bound(const BoundInputs& in);

/// min(1, k (1-p)^n): chance some relevant feature is still unseen after n
/// random plays in which every relevant feature is present.
double prob_undiscovered(std::size_t k, double p, std::size_t n_random);

/// Number of dyadic epochs after which all k features are seen with
/// probability >= 1 - delta2 (clamped at 0).
int s_observed(std::size_t k, double p, double delta1, double delta2);

/// (lower, upper) on the number of random pulls in an epoch of length T_s,
/// holding with probability >= 1 - delta1. upper == 3 * lower.
std::pair<double, double> random_pull_bounds(std::size_t epoch_len, double delta1);

}  // namespace ffbandit
