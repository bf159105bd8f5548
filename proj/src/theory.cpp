#include "ffbandit/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ffbandit/linalg.hpp"

namespace ffbandit {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidParameter(what);
}

void check_common(const BoundInputs& in) {
  require(in.horizon >= 1, "horizon must be positive");
  require(in.noise_scale >= 0.0, "noise_scale must be non-negative");
  require(in.theta_bound > 0.0, "theta_bound must be positive");
  require(in.action_bound > 0.0, "action_bound must be positive");
  require(in.ridge > 0.0, "ridge must be positive");
  require(in.delta > 0.0 && in.delta < 1.0, "delta must lie in (0, 1)");
}

// 4 sqrt(t d ln(lambda + n L / d)) (sqrt(lambda) S + R sqrt(2 ln(1/delta') + d ln(1 + t L / (lambda d))))
double oful_shape(double t, double n, double d, double log_inv_delta, const BoundInputs& in) {
  const double lam = in.ridge;
  const double L = in.action_bound;
  // ln(lambda + nL/d) goes negative for lambda < 1 and tiny n; floor it at 0.
  const double lead = 4.0 * std::sqrt(t * d * std::max(0.0, std::log(lam + n * L / d)));
  const double width = std::sqrt(lam) * in.theta_bound +
                       in.noise_scale *
                           std::sqrt(2.0 * log_inv_delta + d * std::log1p(t * L / (lam * d)));
  return lead * width;
}

}  // namespace

double oful_bound(const BoundInputs& in) {
  check_common(in);
  require(in.ambient_dim >= 1, "ambient_dim must be positive");
  const double t = static_cast<double>(in.horizon);
  return oful_shape(t, t, static_cast<double>(in.ambient_dim), std::log(1.0 / in.delta), in);
}

FfBound ff_bound(const BoundInputs& in) {
  check_common(in);
  require(in.horizon >= 4, "the feature-feedback bound needs T >= 4");
  require(in.sparsity >= 1, "sparsity must be positive");
  require(in.reveal_prob > 0.0 && in.reveal_prob < 1.0, "reveal_prob must lie in (0, 1)");
  const double T = static_cast<double>(in.horizon);
  const double k = static_cast<double>(in.sparsity);
  const double SL = in.theta_bound * in.action_bound;
  const double M = std::log2(T / 2.0);
  const double log6M = std::log(6.0 * M / in.delta);

  FfBound b{};
  const double ratio = std::log(3.0 * k / in.delta) / std::log(1.0 / (1.0 - in.reveal_prob));
  b.discovery = 8.0 * SL / log6M * ratio * ratio;
  b.exploration = M * 3.0 * SL * std::sqrt(T * log6M);
  // t -> T/2 and d -> k in the OFUL shape; the radius uses delta/(3M).
  b.restricted = M * oful_shape(T / 2.0, T / 2.0, k, std::log(3.0 * M / in.delta), in);
  return b;
}

double prob_undiscovered(std::size_t k, double p, std::size_t n_random) {
  require(k >= 1, "k must be positive");
  require(p > 0.0 && p < 1.0, "p must lie in (0, 1)");
  const double v = static_cast<double>(k) *
                   std::exp(static_cast<double>(n_random) * std::log1p(-p));
  return std::min(1.0, v);
}

int s_observed(std::size_t k, double p, double delta1, double delta2) {
  require(k >= 1, "k must be positive");
  require(p > 0.0 && p < 1.0, "p must lie in (0, 1)");
  require(delta1 > 0.0 && delta1 < 1.0, "delta1 must lie in (0, 1)");
  require(delta2 > 0.0 && delta2 < 1.0, "delta2 must lie in (0, 1)");
  const double ratio = std::log(static_cast<double>(k) / delta2) / -std::log1p(-p);
  const double arg = ratio * ratio / std::log(2.0 / delta1);
  if (!(arg > 1.0)) return 0;
  return static_cast<int>(std::ceil(std::log2(arg)));
}

std::pair<double, double> random_pull_bounds(std::size_t epoch_len, double delta1) {
  require(epoch_len >= 1, "epoch length must be positive");
  require(delta1 > 0.0 && delta1 < 1.0, "delta1 must lie in (0, 1)");
  const double lower =
      std::sqrt(static_cast<double>(epoch_len) / 2.0 * std::log(2.0 / delta1));
  return {lower, 3.0 * lower};
}

}  // namespace ffbandit
