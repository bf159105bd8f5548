#include "ffbandit/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace ffbandit {

SparseVector::SparseVector(std::size_t dim, std::vector<Entry> entries)
    : dim_(dim) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.index < b.index; });
  for (const auto& e : entries) {
    if (e.index >= dim_) {
      throw InvalidParameter("sparse index " + std::to_string(e.index) +
                             " out of range for dimension " +
                             std::to_string(dim_));
    }
    if (!entries_.empty() && entries_.back().index == e.index) {
      entries_.back().value += e.value;
    } else {
      entries_.push_back(e);
    }
  }
  std::erase_if(entries_, [](const Entry& e) { return e.value == 0.0; });
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) entries.push_back({i, dense[i]});
  }
  return SparseVector(dense.size(), std::move(entries));
}

double SparseVector::norm() const {
  double sq = 0.0;
  for (const auto& e : entries_) sq += e.value * e.value;
  return std::sqrt(sq);
}

double SparseVector::dot(const SparseVector& other) const {
  double acc = 0.0;
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() && b != other.entries_.end()) {
    if (a->index < b->index) {
      ++a;
    } else if (b->index < a->index) {
      ++b;
    } else {
      acc += a->value * b->value;
      ++a;
      ++b;
    }
  }
  return acc;
}

double SparseVector::dot(std::span<const double> dense) const {
  double acc = 0.0;
  for (const auto& e : entries_) acc += e.value * dense[e.index];
  return acc;
}

double SparseVector::at(std::size_t index) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), index,
      [](const Entry& e, std::size_t i) { return e.index < i; });
  return (it != entries_.end() && it->index == index) ? it->value : 0.0;
}

Eigen::VectorXd SparseVector::to_dense() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
  for (const auto& e : entries_) out[static_cast<Eigen::Index>(e.index)] = e.value;
  return out;
}

SparseVector SparseVector::scaled(double factor) const {
  SparseVector out(dim_);
  if (factor == 0.0) return out;
  out.entries_ = entries_;
  for (auto& e : out.entries_) e.value *= factor;
  return out;
}

FeatureSet::FeatureSet(std::initializer_list<std::size_t> indices)
    : FeatureSet(std::vector<std::size_t>(indices)) {}

FeatureSet::FeatureSet(std::vector<std::size_t> indices)
    : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

FeatureSet FeatureSet::range(std::size_t count) {
  FeatureSet out;
  out.indices_.resize(count);
  for (std::size_t i = 0; i < count; ++i) out.indices_[i] = i;
  return out;
}

bool FeatureSet::contains(std::size_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

bool FeatureSet::includes(const FeatureSet& other) const {
  return std::includes(indices_.begin(), indices_.end(), other.indices_.begin(),
                       other.indices_.end());
}

std::size_t FeatureSet::merge(const FeatureSet& other) {
  const std::size_t before = indices_.size();
  std::vector<std::size_t> merged;
  merged.reserve(before + other.size());
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(),
                 other.indices_.end(), std::back_inserter(merged));
  indices_ = std::move(merged);
  return indices_.size() - before;
}

void FeatureSet::insert(std::size_t index) {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), index);
  if (it == indices_.end() || *it != index) indices_.insert(it, index);
}

std::ptrdiff_t FeatureSet::position(std::size_t index) const {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), index);
  if (it == indices_.end() || *it != index) return -1;
  return it - indices_.begin();
}

LocalEntries restrict_to(const SparseVector& x, const FeatureSet& features) {
  LocalEntries out;
  const auto& idx = features.indices();
  auto f = idx.begin();
  for (const auto& e : x.entries()) {
    f = std::lower_bound(f, idx.end(), e.index);
    if (f == idx.end()) break;
    if (*f == e.index) out.emplace_back(static_cast<int>(f - idx.begin()), e.value);
  }
  return out;
}

DesignState new_design_state(FeatureSet features, double ridge) {
  if (!(ridge > 0.0) || !std::isfinite(ridge)) {
    throw InvalidParameter("ridge must be positive, got " + std::to_string(ridge));
  }
  DesignState s;
  const auto m = static_cast<Eigen::Index>(features.size());
  s.features = std::move(features);
  s.ridge = ridge;
  s.gram = Eigen::MatrixXd::Identity(m, m) * ridge;
  s.gram_inv = Eigen::MatrixXd::Identity(m, m) / ridge;
  s.logdet = static_cast<double>(m) * std::log(ridge);
  s.moment = Eigen::VectorXd::Zero(m);
  s.estimate = Eigen::VectorXd::Zero(m);
  return s;
}

void rank_one_update(DesignState& state, const SparseVector& x, double y) {
  rank_one_update(state, restrict_to(x, state.features), y);
}

void rank_one_update(DesignState& state, const LocalEntries& x_r, double y) {
  if (x_r.empty()) return;
  const auto m = static_cast<Eigen::Index>(state.dim());

  // u = gram_inv * x_r
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
  for (const auto& [i, v] : x_r) u += v * state.gram_inv.col(i);
  double quad = 0.0;
  for (const auto& [i, v] : x_r) quad += v * u[i];

  for (const auto& [i, vi] : x_r) {
    for (const auto& [j, vj] : x_r) state.gram(i, j) += vi * vj;
    state.moment[i] += y * vi;
  }
  state.gram_inv.noalias() -= (u * u.transpose()) / (1.0 + quad);
  state.logdet += std::log1p(quad);

  if (++state.updates_since_refresh >= kRefreshInterval) {
    refresh(state);
  } else {
    state.estimate.noalias() = state.gram_inv * state.moment;
  }
}

void refresh(DesignState& state) {
  state.updates_since_refresh = 0;
  const auto m = state.gram.rows();
  if (m == 0) {
    state.logdet = 0.0;
    return;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(state.gram);
  state.gram_inv = llt.solve(Eigen::MatrixXd::Identity(m, m));
  state.gram_inv = 0.5 * (state.gram_inv + state.gram_inv.transpose()).eval();
  state.logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  state.estimate.noalias() = state.gram_inv * state.moment;
}

DesignState recompute(const History& history, FeatureSet features, double ridge) {
  DesignState s = new_design_state(std::move(features), ridge);
  for (const auto& obs : history) {
    const LocalEntries x_r = restrict_to(obs.action, s.features);
    for (const auto& [i, vi] : x_r) {
      s.moment[i] += obs.reward * vi;
      for (const auto& [j, vj] : x_r) {
        s.gram(i, j) += vi * vj;
      }
    }
  }
  refresh(s);
  return s;
}

double inv_norm(const DesignState& state, const SparseVector& x) {
  return inv_norm(state, restrict_to(x, state.features));
}

double inv_norm(const DesignState& state, const LocalEntries& x_r) {
  double quad = 0.0;
  for (const auto& [i, vi] : x_r) {
    for (const auto& [j, vj] : x_r) quad += vi * vj * state.gram_inv(i, j);
  }
  return std::sqrt(std::max(quad, 0.0));
}

double predicted(const DesignState& state, const LocalEntries& x_r) {
  double acc = 0.0;
  for (const auto& [i, v] : x_r) acc += v * state.estimate[i];
  return acc;
}

}  // namespace ffbandit
