#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffbandit/linalg.hpp"

namespace ffbandit {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Category {
  std::string name;
  FeatureSet features;
};

// Matrix file: header "N d", then one "row col value" line per nonzero
// (0-based). Blank lines are skipped.
std::vector<SparseVector> read_sparse_matrix(const std::filesystem::path& path);
void write_sparse_matrix(const std::filesystem::path& path,
                         const std::vector<SparseVector>& rows);

// Annotation file: one "name: j1 j2 ..." line per category.
std::vector<Category> read_annotations(const std::filesystem::path& path,
                                       std::size_t dim);

// Ground-truth file: one "j value" pair per line.
SparseVector read_ground_truth(const std::filesystem::path& path, std::size_t dim);

// Label file: one category name per matrix row.
std::vector<std::string> read_labels(const std::filesystem::path& path);

}  // namespace ffbandit
