#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace svrg {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One labeled row a_i with label b_i in {-1,+1}. Indices are 0-based and
// strictly increasing.
struct SparseExample {
  std::vector<int> indices;
  std::vector<double> values;
  int label = 1;

  double dot(const std::vector<double>& x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < indices.size(); ++k) s += values[k] * x[indices[k]];
    return s;
  }

  double squared_norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return s;
  }
};

struct SparseDataset {
  std::vector<SparseExample> examples;
  int dim = 0;
  bool bias_added = false;
  bool normalized = false;

  std::size_t n() const { return examples.size(); }
};

// Parses libsvm text: "label idx:val idx:val ..." with 1-based strictly
// increasing indices per line. Labels 0/1 are mapped to -1/+1.
SparseDataset parse_libsvm(std::istream& in);
SparseDataset parse_libsvm_string(const std::string& text);
SparseDataset load_libsvm_file(const std::string& path);

std::string to_libsvm(const SparseDataset& ds);
void save_libsvm_file(const SparseDataset& ds, const std::string& path);

// Row normalization to unit Euclidean norm (all-zero rows pass through),
// then an optional constant bias feature appended at position d. The bias
// column is added after normalization so it is never rescaled.
SparseDataset preprocess(const SparseDataset& ds, bool add_bias, bool normalize);

// Seeded synthetic binary classification instance. labels are
// sign(a_i.w + noise); margin > 0 additionally shifts rows along w so that
// b_i a_i.w >= margin, giving a separable instance.
SparseDataset generate_synthetic(std::size_t n, int d, double margin,
                                 std::uint64_t seed);

// Seeded shuffle-then-split. Requires 0 < test_fraction < 1 and a nonempty
// train part.
std::pair<SparseDataset, SparseDataset> split(const SparseDataset& ds,
                                              double test_fraction,
                                              std::uint64_t seed);

}  // namespace svrg
