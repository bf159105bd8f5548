#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ffbandit {

/// Raised when a numeric parameter is outside its admissible range.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One stored coordinate of a sparse vector.
struct Entry {
  std::size_t index;
  double value;

  friend bool operator==(const Entry&, const Entry&) = default;
};

/// A d-dimensional vector stored as strictly increasing (index, value) pairs
/// with no explicit zeros.
class SparseVector {
 public:
  SparseVector() = default;
  explicit SparseVector(std::size_t dim) : dim_(dim) {}

  /// Builds from unordered pairs. Duplicate indices are summed and zeros
  /// dropped. Throws InvalidParameter for out-of-range indices.
  SparseVector(std::size_t dim, std::vector<Entry> entries);

  static SparseVector from_dense(std::span<const double> dense);

  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  double norm() const;
  double dot(const SparseVector& other) const;
  double dot(std::span<const double> dense) const;
  double at(std::size_t index) const;
  Eigen::VectorXd to_dense() const;

  SparseVector scaled(double factor) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
};

/// An ordered set of global feature indices. Within a run it only grows.
class FeatureSet {
 public:
  FeatureSet() = default;
  FeatureSet(std::initializer_list<std::size_t> indices);
  explicit FeatureSet(std::vector<std::size_t> indices);

  static FeatureSet range(std::size_t count);

  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  const std::vector<std::size_t>& indices() const { return indices_; }

  bool contains(std::size_t index) const;
  bool includes(const FeatureSet& other) const;

  /// Adds every index of `other`; returns the number of indices that were new.
  std::size_t merge(const FeatureSet& other);
  void insert(std::size_t index);

  /// Local position of a global index, or -1 when absent.
  std::ptrdiff_t position(std::size_t index) const;

  friend bool operator==(const FeatureSet&, const FeatureSet&) = default;

 private:
  std::vector<std::size_t> indices_;
};

/// A sparse vector re-expressed in the local coordinates of a FeatureSet.
using LocalEntries = std::vector<std::pair<int, double>>;

LocalEntries restrict_to(const SparseVector& x, const FeatureSet& features);

struct Observation {
  SparseVector action;
  double reward = 0.0;
};

/// Append-only log of (action, reward) pairs in ambient coordinates.
using History = std::vector<Observation>;

/// Ridge-regression state over a feature subset of size m:
/// gram = ridge*I + sum x_r x_r^T, moment = sum y x_r, estimate = gram^-1 moment.
struct DesignState {
  FeatureSet features;
  double ridge = 1.0;
  Eigen::MatrixXd gram;
  Eigen::MatrixXd gram_inv;
  double logdet = 0.0;
  Eigen::VectorXd moment;
  Eigen::VectorXd estimate;
  /// Rank-one updates applied since gram_inv was last refactorized.
  std::size_t updates_since_refresh = 0;

  std::size_t dim() const { return features.size(); }
};

/// Number of Sherman-Morrison updates between full refactorizations.
inline constexpr std::size_t kRefreshInterval = 512;

DesignState new_design_state(FeatureSet features, double ridge);

void rank_one_update(DesignState& state, const SparseVector& x, double y);
void rank_one_update(DesignState& state, const LocalEntries& x_r, double y);

DesignState recompute(const History& history, FeatureSet features, double ridge);

/// sqrt(x_r^T gram_inv x_r).
double inv_norm(const DesignState& state, const SparseVector& x);
double inv_norm(const DesignState& state, const LocalEntries& x_r);

/// <estimate, x_r>.
double predicted(const DesignState& state, const LocalEntries& x_r);

/// Refactorizes gram and overwrites gram_inv, logdet and estimate.
void refresh(DesignState& state);

}  // namespace ffbandit
