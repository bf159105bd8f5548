#include "ffbandit/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ffbandit {

using json = nlohmann::json;

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::kSynthSparse: return "SYNTH_SPARSE";
    case Scenario::kSynthDense: return "SYNTH_DENSE";
    case Scenario::kEtcSweep: return "ETC_SWEEP";
    case Scenario::kSubsetSweep: return "SUBSET_SWEEP";
    case Scenario::kDataset: return "DATASET";
  }
  return "?";
}

namespace {

Scenario parse_scenario(const std::string& name, const std::string& field) {
  for (auto s : {Scenario::kSynthSparse, Scenario::kSynthDense, Scenario::kEtcSweep,
                 Scenario::kSubsetSweep, Scenario::kDataset}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError(field, "unknown scenario \"" + name + "\"");
}

// Reads typed fields from one JSON object and rejects keys it was not asked for.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where(), "expected an object");
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    const json* v = raw(key);
    if (v == nullptr) return;
    try {
      out = v->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key), std::string("wrong type (") + e.what() + ")");
    }
  }

  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.contains(key)) throw ConfigError(field(key), "unknown key");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

double ExperimentConfig::ridge_for(const std::string& algorithm) const {
  auto it = ridge.find(algorithm);
  return it == ridge.end() ? default_ridge : it->second;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials", "must be at least 1");
  if (horizon < 1) throw ConfigError("horizon", "must be at least 1");
  if (!replacement && scenario != Scenario::kDataset && horizon > n_actions) {
    throw ConfigError("horizon", "exceeds n_actions under sampling without replacement");
  }
  if (scenario != Scenario::kDataset) {
    if (dim < 1) throw ConfigError("dims.d", "must be positive");
    if (sparsity < 1 || sparsity > dim) throw ConfigError("dims.k", "must lie in [1, d]");
    if (n_actions < 1) throw ConfigError("dims.n_actions", "must be positive");
    if (action_nnz < 1 || action_nnz > dim) {
      throw ConfigError("dims.action_nnz", "must lie in [1, d]");
    }
    if (scenario == Scenario::kSynthDense && sparsity != dim) {
      throw ConfigError("dims.k", "SYNTH_DENSE requires k == d");
    }
    if (noise_features + sparsity > dim) {
      throw ConfigError("oracle.noise_features", "k + k' exceeds d");
    }
  }
  if (!(reveal_prob >= 0.0 && reveal_prob <= 1.0)) {
    throw ConfigError("oracle.reveal_prob", "must lie in [0, 1]");
  }
  if (!(reward.noise_scale >= 0.0)) throw ConfigError("reward.noise_scale", "must be >= 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta", "must lie in (0, 1)");
  if (!(theta_bound > 0.0)) throw ConfigError("theta_bound", "must be positive");
  if (!(action_bound > 0.0)) throw ConfigError("action_bound", "must be positive");
  if (!(default_ridge > 0.0)) throw ConfigError("ridge.default", "must be positive");
  for (const auto& [name, value] : ridge) {
    if (!(value > 0.0)) throw ConfigError("ridge." + name, "must be positive");
  }
  if (scenario != Scenario::kSubsetSweep) {
    if (algorithms.empty()) throw ConfigError("algorithms", "must not be empty");
    for (std::size_t i = 0; i < algorithms.size(); ++i) {
      try {
        parse_policy_kind(algorithms[i]);
      } catch (const InvalidParameter& e) {
        throw ConfigError("algorithms[" + std::to_string(i) + "]", e.what());
      }
      if (algorithms[i] == "ETC" && etc_budgets.empty()) {
        throw ConfigError("etc_budgets", "ETC needs at least one T0");
      }
    }
  }
  if (scenario == Scenario::kSubsetSweep) {
    if (subset_sizes.empty()) throw ConfigError("subset_sizes", "must not be empty");
    for (std::size_t i = 0; i < subset_sizes.size(); ++i) {
      if (subset_sizes[i] > sparsity) {
        throw ConfigError("subset_sizes[" + std::to_string(i) + "]", "exceeds k");
      }
    }
  }
  if (scenario == Scenario::kDataset) {
    if (dataset.matrix.empty()) throw ConfigError("dataset.matrix", "required");
    if (dataset.theta_mode == ThetaMode::kFile && dataset.ground_truth.empty()) {
      throw ConfigError("dataset.ground_truth", "required when theta_mode is \"file\"");
    }
    if (dataset.theta_mode == ThetaMode::kCategory &&
        (dataset.labels.empty() || dataset.annotations.empty())) {
      throw ConfigError("dataset.labels",
                        "theta_mode \"category\" needs both labels and annotations");
    }
  }
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  ObjectReader root(doc, "");

  std::string scenario = to_string(cfg.scenario);
  root.get("scenario", scenario);
  cfg.scenario = parse_scenario(scenario, "scenario");

  root.get("algorithms", cfg.algorithms);
  root.get("horizon", cfg.horizon);
  root.get("trials", cfg.trials);
  root.get("base_seed", cfg.base_seed);

  bool k_given = false;
  if (const json* dims = root.raw("dims")) {
    ObjectReader r(*dims, "dims");
    r.get("d", cfg.dim);
    k_given = r.has("k");
    r.get("k", cfg.sparsity);
    r.get("n_actions", cfg.n_actions);
    r.get("action_nnz", cfg.action_nnz);
    r.finish();
  }
  if (cfg.scenario == Scenario::kSynthDense && !k_given) cfg.sparsity = cfg.dim;

  if (const json* oracle = root.raw("oracle")) {
    ObjectReader r(*oracle, "oracle");
    r.get("reveal_prob", cfg.reveal_prob);
    r.get("noise_features", cfg.noise_features);
    r.finish();
  }

  if (const json* reward = root.raw("reward")) {
    ObjectReader r(*reward, "reward");
    std::string model = "linear";
    r.get("model", model);
    if (model == "linear") {
      cfg.reward.kind = RewardKind::kLinearGaussian;
    } else if (model == "logistic") {
      cfg.reward.kind = RewardKind::kLogisticBinary;
    } else {
      throw ConfigError("reward.model", "expected \"linear\" or \"logistic\"");
    }
    r.get("noise_scale", cfg.reward.noise_scale);
    r.finish();
  }

  if (const json* ridge = root.raw("ridge")) {
    if (ridge->is_number()) {
      cfg.default_ridge = ridge->get<double>();
      cfg.ridge.clear();
    } else if (ridge->is_object()) {
      cfg.ridge.clear();
      for (const auto& [name, value] : ridge->items()) {
        if (!value.is_number()) throw ConfigError("ridge." + name, "expected a number");
        if (name == "default") {
          cfg.default_ridge = value.get<double>();
          continue;
        }
        try {
          parse_policy_kind(name);
        } catch (const InvalidParameter&) {
          throw ConfigError("ridge." + name, "unknown key");
        }
        cfg.ridge[name] = value.get<double>();
      }
    } else {
      throw ConfigError("ridge", "expected a number or an object");
    }
  }

  root.get("delta", cfg.delta);
  root.get("theta_bound", cfg.theta_bound);
  root.get("action_bound", cfg.action_bound);
  root.get("replacement", cfg.replacement);
  root.get("etc_budgets", cfg.etc_budgets);
  root.get("subset_sizes", cfg.subset_sizes);

  if (const json* ds = root.raw("dataset")) {
    ObjectReader r(*ds, "dataset");
    std::string matrix, annotations, ground_truth, labels, mode = "random_action";
    r.get("matrix", matrix);
    r.get("annotations", annotations);
    r.get("ground_truth", ground_truth);
    r.get("labels", labels);
    r.get("theta_mode", mode);
    r.get("category", cfg.dataset.category);
    r.finish();
    cfg.dataset.matrix = matrix;
    cfg.dataset.annotations = annotations;
    cfg.dataset.ground_truth = ground_truth;
    cfg.dataset.labels = labels;
    if (mode == "file") {
      cfg.dataset.theta_mode = ThetaMode::kFile;
    } else if (mode == "random_action") {
      cfg.dataset.theta_mode = ThetaMode::kRandomAction;
    } else if (mode == "category") {
      cfg.dataset.theta_mode = ThetaMode::kCategory;
    } else {
      throw ConfigError("dataset.theta_mode",
                        "expected \"file\", \"random_action\" or \"category\"");
    }
  }

  root.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace ffbandit
