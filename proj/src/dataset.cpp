#include "ffbandit/dataset.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace ffbandit {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line,
                       const std::string& what) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " + what);
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

std::vector<SparseVector> read_sparse_matrix(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  std::size_t rows = 0, dim = 0;
  bool have_header = false;
  std::vector<std::vector<Entry>> entries;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    std::istringstream ss(line);
    if (!have_header) {
      if (!(ss >> rows >> dim)) fail(path, lineno, "expected header \"N d\"");
      entries.resize(rows);
      have_header = true;
      continue;
    }
    std::size_t r = 0, c = 0;
    double v = 0.0;
    if (!(ss >> r >> c >> v)) fail(path, lineno, "expected \"row col value\"");
    if (r >= rows || c >= dim) fail(path, lineno, "index out of range");
    entries[r].push_back({c, v});
  }
  if (!have_header) fail(path, lineno, "missing header");
  std::vector<SparseVector> out;
  out.reserve(rows);
  for (auto& e : entries) out.emplace_back(dim, std::move(e));
  return out;
}

void write_sparse_matrix(const std::filesystem::path& path,
                         const std::vector<SparseVector>& rows) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  const std::size_t dim = rows.empty() ? 0 : rows.front().dim();
  out << rows.size() << ' ' << dim << '\n' << std::setprecision(17);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& e : rows[r].entries()) {
      out << r << ' ' << e.index << ' ' << e.value << '\n';
    }
  }
}

std::vector<Category> read_annotations(const std::filesystem::path& path,
                                       std::size_t dim) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<Category> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) fail(path, lineno, "expected \"name: j1 j2 ...\"");
    Category cat;
    std::istringstream name(line.substr(0, colon));
    name >> cat.name;
    if (cat.name.empty()) fail(path, lineno, "empty category name");
    std::istringstream ss(line.substr(colon + 1));
    std::vector<std::size_t> idx;
    std::string tok;
    while (ss >> tok) {
      std::size_t j = 0;
      try {
        std::size_t used = 0;
        j = std::stoul(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        fail(path, lineno, "bad feature index \"" + tok + "\"");
      }
      if (j >= dim) fail(path, lineno, "feature index out of range");
      idx.push_back(j);
    }
    cat.features = FeatureSet(std::move(idx));
    out.push_back(std::move(cat));
  }
  return out;
}

SparseVector read_ground_truth(const std::filesystem::path& path, std::size_t dim) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<Entry> entries;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    std::istringstream ss(line);
    std::size_t j = 0;
    double v = 0.0;
    if (!(ss >> j >> v)) fail(path, lineno, "expected \"j value\"");
    if (j >= dim) fail(path, lineno, "feature index out of range");
    entries.push_back({j, v});
  }
  return SparseVector(dim, std::move(entries));
}

std::vector<std::string> read_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    out.push_back(line);
  }
  return out;
}

}  // namespace ffbandit
