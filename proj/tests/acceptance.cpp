// Acceptance suite: reproduces the headline experiments at desk scale and the
// statistical properties of the core, printing one PASS/FAIL line each.
//
//   ffbandit_acceptance [--only N] [--workers N]
//
// Exit status is non-zero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "CLI11.hpp"
#include "ffbandit/harness.hpp"
#include "ffbandit/theory.hpp"

namespace {

using namespace ffbandit;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::size_t g_workers = 1;

// Synthetic sparse setup shared by several criteria.
ExperimentConfig sparse_setup() {
  ExperimentConfig c;
  c.scenario = Scenario::kSynthSparse;
  c.algorithms = {"OFUL", "FF-OFUL"};
  c.horizon = 1 << 12;
  c.trials = 20;
  c.dim = 40;
  c.sparsity = 5;
  c.n_actions = 1000;
  c.reveal_prob = 0.1;
  c.ridge = {{"OFUL", 1.0 / 32.0}};
  c.default_ridge = 1.0;
  return c;
}

using Summary = std::map<std::string, std::map<std::size_t, SummaryRow>>;

Summary summarize(const std::vector<RegretRecord>& records) {
  Summary s;
  for (auto& row : aggregate(records)) s[row.algorithm][row.t] = row;
  return s;
}

double final_mean(const Summary& s, const std::string& alg) {
  return s.at(alg).rbegin()->second.mean_cum_regret;
}

// Records of criterion 1 are reused by 9 and 10.
const std::vector<RegretRecord>& sparse_records() {
  static const auto records = run_experiment(sparse_setup(), g_workers);
  return records;
}

Verdict sparse_reproduction() {
  const auto s = summarize(sparse_records());
  const double oful = final_mean(s, "OFUL");
  const double ff = final_mean(s, "FF-OFUL");
  return {ff <= 0.7 * oful,
          fmt("FF-OFUL %.2f vs OFUL %.2f (ratio %.3f, need <= 0.7)", ff, oful, ff / oful)};
}

Verdict dense_reproduction() {
  auto c = sparse_setup();
  c.scenario = Scenario::kSynthDense;
  c.sparsity = c.dim;
  const auto s = summarize(run_experiment(c, g_workers));
  const double oful = final_mean(s, "OFUL");
  const double ff = final_mean(s, "FF-OFUL");
  return {ff <= 1.5 * oful,
          fmt("FF-OFUL %.2f vs OFUL %.2f (ratio %.3f, need <= 1.5)", ff, oful, ff / oful)};
}

Verdict etc_sweep() {
  auto c = sparse_setup();
  c.scenario = Scenario::kEtcSweep;
  c.algorithms = {"FF-OFUL", "ETC"};
  c.horizon = 1 << 13;
  c.trials = 100;
  c.etc_budgets = {64, 256, 1024, 4096};
  const auto s = summarize(run_experiment(c, g_workers));
  const double ff = final_mean(s, "FF-OFUL");
  double best = 1e300;
  std::string best_tag;
  std::ostringstream etc;
  for (auto t0 : c.etc_budgets) {
    const std::string tag = "ETC[T0=" + std::to_string(t0) + "]";
    const double v = final_mean(s, tag);
    etc << ' ' << t0 << ':' << fmt("%.1f", v);
    if (v < best) {
      best = v;
      best_tag = tag;
    }
  }
  const double smallest = final_mean(s, "ETC[T0=64]");
  const double largest = final_mean(s, "ETC[T0=4096]");
  const bool pass = ff <= best && ff < smallest && ff < largest;
  return {pass, fmt("FF-OFUL %.2f; best %s %.2f; ETC", ff, best_tag.c_str(), best) + etc.str()};
}

Verdict subset_trend() {
  ExperimentConfig c = sparse_setup();
  c.scenario = Scenario::kSubsetSweep;
  c.sparsity = 10;
  c.horizon = 1 << 8;
  c.trials = 100;
  c.subset_sizes = {2, 4, 6, 8, 10};
  Summary s;
  for (auto& row : subset_sweep(c, g_workers)) s[row.algorithm][row.t] = row;
  std::vector<double> mean, se;
  std::ostringstream d;
  for (auto j : c.subset_sizes) {
    const auto& row = s.at("OFUL[j=" + std::to_string(j) + "]").rbegin()->second;
    mean.push_back(row.mean_cum_regret);
    se.push_back(row.stderr_);
    d << fmt(" j=%zu:%.2f", j, row.mean_cum_regret);
  }
  int inversions = 0;
  bool pass = true;
  for (std::size_t i = 0; i + 1 < mean.size(); ++i) {
    if (mean[i + 1] < mean[i]) continue;
    ++inversions;
    if (mean[i + 1] - mean[i] > std::max(se[i], se[i + 1])) pass = false;
  }
  pass = pass && inversions <= 1;
  return {pass, fmt("%d inversion(s);", inversions) + d.str()};
}

Verdict oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  ffbandit::RandomSource rng(2024);
  double worst = 0.0;
  for (std::size_t m : {1u, 5u, 10u, 25u, 50u}) {
    const std::size_t d = m + 20;
    FeatureSet f;
    while (f.size() < m) f.insert(rng.index(d));
    auto state = new_design_state(f, 1.0);
    History h;
    for (int i = 0; i < 1000; ++i) {
      std::vector<Entry> e;
      for (int j = 0; j < 8; ++j) e.push_back({rng.index(d), rng.normal()});
      SparseVector x(d, e);
      const double y = rng.normal();
      rank_one_update(state, x, y);
      h.push_back({x, y});
    }
    const auto ref = recompute(h, f, 1.0);
    worst = std::max({worst, (state.gram - ref.gram).cwiseAbs().maxCoeff(),
                      (state.gram_inv - ref.gram_inv).cwiseAbs().maxCoeff(),
                      (state.estimate - ref.estimate).cwiseAbs().maxCoeff(),
                      std::abs(state.logdet - ref.logdet)});
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 1e-8 && secs < 10.0,
          fmt("max abs deviation %.2e over m in {1..50}, %.2f s", worst, secs)};
}

Verdict confidence_coverage() {
  const double R = 0.1;
  const int runs = 200;
  int covered = 0;
  for (int run = 0; run < runs; ++run) {
    ffbandit::RandomSource gen(derive_seed(7, Stream::kPool, run));
    auto [pool, truth] = synth_generate(100, 5, 5, 3, gen);
    auto shared = std::make_shared<const GroundTruth>(truth);
    Environment env(pool, shared, {RewardKind::kLinearGaussian, R},
                    FeedbackOracle(truth.support(), {}, 0.0),
                    derive_seed(7, Stream::kRewardNoise, run), 0);
    PolicyConfig pc;
    pc.kind = PolicyKind::kOful;
    pc.params.noise_scale = R;
    pc.params.theta_bound = truth.norm();
    pc.params.ridge = 1.0;
    pc.params.delta = 0.1;
    PolicyState policy(pc, 5);
    const Eigen::VectorXd theta = truth.theta_star().to_dense();
    bool inside = true;
    for (int t = 0; t < 200 && inside; ++t) {
      const auto c = policy.choose(env.pool(), gen);
      const auto o = env.step(c);
      policy.observe(env.pool().action(c.action_index), o.reward, o.revealed);
      inside = in_confidence_set(policy.design(), policy.radius(), theta);
    }
    covered += inside;
  }
  const double frac = static_cast<double>(covered) / runs;
  return {frac >= 0.85, fmt("theta* inside C_t for all t in %d/%d runs (%.3f, need >= 0.85)",
                            covered, runs, frac)};
}

Verdict norm_monotonicity() {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> nd;
  int violations = 0;
  double worst = -1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index n = 1 + trial % 10;
    auto psd = [&](double shift) {
      Eigen::MatrixXd a(n, n);
      for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(gen);
      return Eigen::MatrixXd(a * a.transpose() + shift * Eigen::MatrixXd::Identity(n, n));
    };
    const Eigen::MatrixXd w = psd(0.05), q = psd(0.0);
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = nd(gen);
    const double lhs = std::sqrt(x.dot((w + q).ldlt().solve(x)));
    const double rhs = std::sqrt(x.dot(w.ldlt().solve(x)));
    worst = std::max(worst, lhs - rhs);
    if (lhs > rhs + 1e-10) ++violations;
  }
  return {violations == 0,
          fmt("%d violations in 1000 triples (max lhs - rhs %.2e)", violations, worst)};
}

Verdict discovery_bound() {
  const std::size_t k = 5;
  const double p = 0.1;
  const int runs = 10000;
  FeedbackOracle oracle(FeatureSet::range(k), {}, p);
  std::vector<Entry> e;
  for (std::size_t j = 0; j < k + 5; ++j) e.push_back({j, 1.0});
  const SparseVector x(k + 5, e);
  ffbandit::RandomSource rng(31337);
  bool pass = true;
  std::ostringstream d;
  for (int n : {10, 44, 100}) {
    int undiscovered = 0;
    for (int r = 0; r < runs; ++r) {
      FeatureSet seen;
      for (int i = 0; i < n && seen.size() < k; ++i) seen.merge(draw_feedback(oracle, x, rng));
      undiscovered += seen.size() < k;
    }
    const double bound = prob_undiscovered(k, p, n);
    const double sigma = std::sqrt(bound * (1 - bound) / runs);
    const double freq = static_cast<double>(undiscovered) / runs;
    pass = pass && freq <= bound + 3 * sigma;
    d << fmt(" n=%d: %.4f <= %.4f;", n, freq, bound + 3 * sigma);
  }
  const double point = prob_undiscovered(k, p, 44);
  pass = pass && std::abs(point - 0.0484) < 2e-4;
  d << fmt(" k(1-p)^44 = %.5f", point);
  return {pass, d.str()};
}

Verdict bound_dominance() {
  const auto c = sparse_setup();
  BoundInputs in;
  in.ambient_dim = c.dim;
  in.sparsity = c.sparsity;
  in.noise_scale = c.reward.noise_scale;
  in.theta_bound = c.theta_bound;
  in.action_bound = c.action_bound;
  in.ridge = c.ridge_for("FF-OFUL");
  in.delta = c.delta;
  in.reveal_prob = c.reveal_prob;
  int checks = 0, violations = 0;
  double tightest = 0.0;
  for (const auto& r : sparse_records()) {
    if (r.algorithm != "FF-OFUL" || r.t < 4 || (r.t & (r.t - 1)) != 0) continue;
    in.horizon = r.t;
    const double b = ff_bound(in).total();
    ++checks;
    violations += r.cumulative_regret > b;
    tightest = std::max(tightest, r.cumulative_regret / b);
  }
  return {violations == 0 && checks > 0,
          fmt("%d violations over %d (trial, dyadic t) checkpoints; max regret/bound %.3f",
              violations, checks, tightest)};
}

Verdict sublinearity() {
  const auto s = summarize(sparse_records());
  const auto& ff = s.at("FF-OFUL");
  const double early = ff.at(1 << 8).mean_cum_regret / (1 << 8);
  const double late = ff.at(1 << 12).mean_cum_regret / (1 << 12);
  return {late <= 0.5 * early,
          fmt("R_t/t: %.4f at 2^8, %.4f at 2^12 (ratio %.3f, need <= 0.5)", early, late,
              late / early)};
}

Verdict noisy_feedback() {
  auto c = sparse_setup();
  c.noise_features = 20;
  const auto s = summarize(run_experiment(c, g_workers));
  const double oful = final_mean(s, "OFUL");
  const double ff = final_mean(s, "FF-OFUL");

  // Re-run FF-OFUL on every trial and check the discovered set after each step.
  const auto spec = expand_algorithms(c)[1];
  std::size_t escapes = 0;
  for (std::size_t trial = 0; trial < c.trials; ++trial) {
    const World w = build_world(c, trial);
    run_algorithm(w, spec, c, trial, [&](const PolicyState& p, const StepOutcome&) {
      for (auto j : p.discovered().indices()) {
        escapes += !(w.oracle.relevant().contains(j) || w.oracle.noise_features().contains(j));
      }
    });
  }
  return {ff <= 0.9 * oful && escapes == 0,
          fmt("FF-OFUL %.2f vs OFUL %.2f (ratio %.3f, need <= 0.9); %zu stray features",
              ff, oful, ff / oful, escapes)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::vector<int> only;
  g_workers = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--only", only, "Run only these criterion numbers");
  app.add_option("--workers", g_workers, "Worker threads for experiment runs");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "sparse synthetic: FF-OFUL <= 0.7 x OFUL", sparse_reproduction},
      {2, "dense synthetic: FF-OFUL <= 1.5 x OFUL", dense_reproduction},
      {3, "ETC sweep: FF-OFUL <= best ETC, < smallest and largest T0", etc_sweep},
      {4, "subset sweep: regret decreasing in j", subset_trend},
      {5, "rank-one updates match recompute within 1e-8", oracle_equivalence},
      {6, "confidence coverage >= 85%", confidence_coverage},
      {7, "norm monotonicity under PSD addition", norm_monotonicity},
      {8, "discovery probability bound", discovery_bound},
      {9, "FF-OFUL regret below its bound", bound_dominance},
      {10, "sublinear FF-OFUL average regret", sublinearity},
      {11, "noisy feedback: FF-OFUL <= 0.9 x OFUL", noisy_feedback},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !v.pass;
    std::printf("%s criterion %2d: %s -- %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", c.id,
                c.name, v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
