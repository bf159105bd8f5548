#include "ffbandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace ffbandit {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t trial_seed(const ExperimentConfig& config, std::size_t trial_index) {
  return config.base_seed + trial_index;
}

ConfidenceParams params_for(const ExperimentConfig& config, const std::string& name) {
  ConfidenceParams p;
  p.noise_scale = config.reward.noise_scale;
  p.theta_bound = config.theta_bound;
  p.ridge = config.ridge_for(name);
  p.delta = config.delta;
  return p;
}

std::vector<std::size_t> pick_subset(const std::vector<std::size_t>& from, std::size_t j,
                                     RandomSource& rng) {
  std::vector<std::size_t> pool = from;
  for (std::size_t i = 0; i < j; ++i) std::swap(pool[i], pool[i + rng.index(pool.size() - i)]);
  pool.resize(j);
  return pool;
}

SparseVector category_direction(const LoadedDataset& data, const Category& cat,
                                double norm) {
  const std::size_t dim = data.rows.empty() ? 0 : data.rows.front().dim();
  std::vector<double> in_sum(dim, 0.0), out_sum(dim, 0.0);
  std::size_t n_in = 0, n_out = 0;
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    const bool member = r < data.labels.size() && data.labels[r] == cat.name;
    auto& acc = member ? in_sum : out_sum;
    (member ? n_in : n_out) += 1;
    for (const auto& e : data.rows[r].entries()) acc[e.index] += e.value;
  }
  std::vector<Entry> entries;
  double sq = 0.0;
  for (auto j : cat.features.indices()) {
    const double v = (n_in ? in_sum[j] / static_cast<double>(n_in) : 0.0) -
                     (n_out ? out_sum[j] / static_cast<double>(n_out) : 0.0);
    if (v != 0.0) {
      entries.push_back({j, v});
      sq += v * v;
    }
  }
  if (sq == 0.0) {
    throw InvalidParameter("category \"" + cat.name + "\" has an empty direction");
  }
  SparseVector theta(dim, std::move(entries));
  return theta.scaled(norm / std::sqrt(sq));
}

}  // namespace

LoadedDataset load_dataset(const DatasetPaths& paths) {
  LoadedDataset out;
  out.rows = read_sparse_matrix(paths.matrix);
  const std::size_t dim = out.rows.empty() ? 0 : out.rows.front().dim();
  if (!paths.annotations.empty()) out.categories = read_annotations(paths.annotations, dim);
  if (!paths.labels.empty()) {
    out.labels = read_labels(paths.labels);
    if (out.labels.size() != out.rows.size()) {
      throw ParseError(paths.labels.string() + ": " + std::to_string(out.labels.size()) +
                       " labels for " + std::to_string(out.rows.size()) + " rows");
    }
  }
  if (!paths.ground_truth.empty()) out.ground_truth = read_ground_truth(paths.ground_truth, dim);
  return out;
}

std::vector<AlgorithmSpec> expand_algorithms(const ExperimentConfig& config) {
  std::vector<AlgorithmSpec> out;
  if (config.scenario == Scenario::kSubsetSweep) {
    for (auto j : config.subset_sizes) {
      AlgorithmSpec spec{"OFUL[j=" + std::to_string(j) + "]", {}};
      spec.policy.kind = PolicyKind::kOful;
      spec.policy.params = params_for(config, "OFUL");
      out.push_back(std::move(spec));
    }
    AlgorithmSpec full{"OFUL[full]", {}};
    full.policy.kind = PolicyKind::kOful;
    full.policy.params = params_for(config, "OFUL");
    out.push_back(std::move(full));
    return out;
  }
  for (const auto& name : config.algorithms) {
    const PolicyKind kind = parse_policy_kind(name);
    PolicyConfig pc;
    pc.kind = kind;
    pc.params = params_for(config, name);
    pc.horizon = config.horizon;
    if (kind == PolicyKind::kEtc) {
      for (auto t0 : config.etc_budgets) {
        PolicyConfig etc = pc;
        etc.etc_budget = t0;
        out.push_back({"ETC[T0=" + std::to_string(t0) + "]", std::move(etc)});
      }
    } else {
      out.push_back({name, std::move(pc)});
    }
  }
  return out;
}

World build_world(const ExperimentConfig& config, std::size_t trial_index,
                  const LoadedDataset* dataset) {
  const std::uint64_t seed = trial_seed(config, trial_index);
  RandomSource pool_rng(derive_seed(seed, Stream::kPool));
  RandomSource theta_rng(derive_seed(seed, Stream::kTheta));

  World w;
  SparseVector theta;
  if (config.scenario == Scenario::kDataset) {
    if (dataset == nullptr) throw InvalidParameter("dataset scenario needs loaded data");
    if (dataset->rows.empty()) throw InvalidParameter("dataset has no rows");
    if (!config.replacement && config.horizon > dataset->rows.size()) {
      throw ConfigError("horizon", "exceeds the number of dataset rows");
    }
    w.pool = ActionPool(dataset->rows, config.replacement);
    switch (config.dataset.theta_mode) {
      case ThetaMode::kFile:
        theta = dataset->ground_truth;
        break;
      case ThetaMode::kRandomAction: {
        const auto& row = dataset->rows[theta_rng.index(dataset->rows.size())];
        if (row.nnz() == 0) throw InvalidParameter("picked an empty row as theta*");
        theta = row.scaled(config.theta_bound / row.norm());
        break;
      }
      case ThetaMode::kCategory: {
        const auto& cats = dataset->categories;
        if (cats.empty()) throw InvalidParameter("no categories in the annotation file");
        const Category* cat = &cats[theta_rng.index(cats.size())];
        if (!config.dataset.category.empty()) {
          auto it = std::find_if(cats.begin(), cats.end(), [&](const Category& c) {
            return c.name == config.dataset.category;
          });
          if (it == cats.end()) {
            throw ConfigError("dataset.category",
                              "no category \"" + config.dataset.category + "\"");
          }
          cat = &*it;
        }
        theta = category_direction(*dataset, *cat, config.theta_bound);
        break;
      }
    }
  } else {
    w.pool = ActionPool(
        synth_actions(config.n_actions, config.dim, config.action_nnz, pool_rng),
        config.replacement);
    theta = synth_theta(config.dim, config.sparsity, theta_rng, config.theta_bound);
  }
  auto truth = std::make_shared<const GroundTruth>(std::move(theta));
  FeatureSet noise;
  if (config.noise_features > 0) {
    noise = sample_noise_features(truth->theta_star().dim(), config.noise_features,
                                  truth->support(), theta_rng);
  }
  w.oracle = FeedbackOracle(truth->support(), std::move(noise), config.reveal_prob);
  w.truth = std::move(truth);
  w.noise_seed = derive_seed(seed, Stream::kRewardNoise);
  w.feedback_seed = derive_seed(seed, Stream::kFeedback);
  return w;
}

std::vector<RegretRecord> run_algorithm(const World& world, const AlgorithmSpec& spec,
                                        const ExperimentConfig& config,
                                        std::size_t trial_index,
                                        const StepObserver& observer) {
  Environment env(world.pool, world.truth, config.reward, world.oracle, world.noise_seed,
                  world.feedback_seed);
  PolicyState policy(spec.policy, world.pool.dim());
  RandomSource rng(
      derive_seed(trial_seed(config, trial_index), Stream::kPolicy, fnv1a(spec.tag)));

  const std::size_t T = config.horizon;
  const bool dense_log = T <= kDenseLogHorizon;
  std::vector<RegretRecord> out;
  out.reserve(dense_log ? T : T / kSparseCadence + 1);
  double cumulative = 0.0;
  for (std::size_t t = 1; t <= T; ++t) {
    const Choice choice = policy.choose(env.pool(), rng);
    const SparseVector& x = env.pool().action(choice.action_index);
    const StepOutcome outcome = env.step(choice);
    policy.observe(x, outcome.reward, outcome.revealed);
    if (observer) observer(policy, outcome);
    cumulative += outcome.instantaneous_regret;
    if (dense_log || t % kSparseCadence == 0 || t == T) {
      out.push_back({trial_index, t, spec.tag, choice.action_index, choice.explored,
                     outcome.instantaneous_regret, cumulative, policy.discovered().size()});
    }
  }
  return out;
}

std::vector<RegretRecord> run_trial(const ExperimentConfig& config,
                                    std::size_t trial_index,
                                    const LoadedDataset* dataset) {
  config.validate();
  const World world = build_world(config, trial_index, dataset);
  auto specs = expand_algorithms(config);

  if (config.scenario == Scenario::kSubsetSweep) {
    const auto& support = world.truth->support().indices();
    for (std::size_t s = 0; s + 1 < specs.size(); ++s) {
      const std::size_t j = config.subset_sizes[s];
      RandomSource rng(derive_seed(trial_seed(config, trial_index), Stream::kSubset, j));
      specs[s].policy.features = FeatureSet(pick_subset(support, j, rng));
    }
  }

  std::vector<RegretRecord> out;
  for (const auto& spec : specs) {
    auto recs = run_algorithm(world, spec, config, trial_index);
    out.insert(out.end(), std::make_move_iterator(recs.begin()),
               std::make_move_iterator(recs.end()));
  }
  return out;
}

std::vector<RegretRecord> run_experiment(const ExperimentConfig& config,
                                         std::size_t workers) {
  config.validate();
  std::unique_ptr<LoadedDataset> data;
  if (config.scenario == Scenario::kDataset) {
    data = std::make_unique<LoadedDataset>(load_dataset(config.dataset));
  }

  std::vector<std::vector<RegretRecord>> per_trial(config.trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < config.trials; i = next++) {
      try {
        per_trial[i] = run_trial(config, i, data.get());
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.trials;
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, config.trials);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<RegretRecord> out;
  for (auto& recs : per_trial) {
    out.insert(out.end(), std::make_move_iterator(recs.begin()),
               std::make_move_iterator(recs.end()));
  }
  return out;
}

std::vector<SummaryRow> aggregate(const std::vector<RegretRecord>& records) {
  if (records.empty()) throw EmptyInput("no records to aggregate");
  std::vector<std::string> order;
  std::map<std::string, std::map<std::size_t, std::vector<double>>> groups;
  for (const auto& r : records) {
    auto [it, inserted] = groups.try_emplace(r.algorithm);
    if (inserted) order.push_back(r.algorithm);
    it->second[r.t].push_back(r.cumulative_regret);
  }
  std::vector<SummaryRow> out;
  for (const auto& name : order) {
    for (const auto& [t, values] : groups[name]) {
      const double n = static_cast<double>(values.size());
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= n;
      double se = 0.0;
      if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
      }
      out.push_back({name, t, mean, se, 1.96 * se, values.size()});
    }
  }
  return out;
}

std::vector<SummaryRow> subset_sweep(const ExperimentConfig& config, std::size_t workers) {
  if (config.scenario != Scenario::kSubsetSweep) {
    throw InvalidParameter("subset_sweep needs scenario SUBSET_SWEEP");
  }
  for (auto j : config.subset_sizes) {
    if (j > config.sparsity) {
      throw InvalidParameter("subset size " + std::to_string(j) + " exceeds k = " +
                             std::to_string(config.sparsity));
    }
  }
  return aggregate(run_experiment(config, workers));
}

void write_records_csv(std::ostream& out, const std::vector<RegretRecord>& records) {
  out << "trial,algorithm,t,action_index,explored,instant_regret,cumulative_regret,"
         "discovered_count\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : records) {
    out << r.trial << ',' << r.algorithm << ',' << r.t << ',' << r.action_index << ','
        << (r.explored ? 1 : 0) << ',' << r.instant_regret << ',' << r.cumulative_regret
        << ',' << r.discovered_count << '\n';
  }
}

std::vector<RegretRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line.rfind("trial,algorithm,t,action_index,explored,instant_regret,"
                 "cumulative_regret,discovered_count", 0) != 0) {
    throw ParseError("records CSV: unexpected header");
  }
  std::vector<RegretRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 8) {
      throw ParseError("records CSV line " + std::to_string(lineno) + ": expected 8 fields");
    }
    try {
      RegretRecord r;
      r.trial = std::stoull(f[0]);
      r.algorithm = f[1];
      r.t = std::stoull(f[2]);
      r.action_index = std::stoull(f[3]);
      r.explored = f[4] == "1";
      r.instant_regret = std::stod(f[5]);
      r.cumulative_regret = std::stod(f[6]);
      r.discovered_count = std::stoull(f[7]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ParseError("records CSV line " + std::to_string(lineno) + ": bad number");
    }
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "algorithm,t,mean_cum_regret,stderr,ci95_halfwidth\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : rows) {
    out << r.algorithm << ',' << r.t << ',' << r.mean_cum_regret << ',' << r.stderr_ << ','
        << r.ci95_halfwidth << '\n';
  }
}

}  // namespace ffbandit
