#include "svrg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "svrg/rng.hpp"

namespace svrg {

namespace {

bool parse_double(const std::string& tok, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(tok, &pos);
    return pos == tok.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

int map_label(double raw, std::size_t line_no) {
  if (raw == 1.0 || raw == -1.0) return static_cast<int>(raw);
  if (raw == 0.0) return -1;
  throw ParseError(line_no, "unsupported label " + std::to_string(raw));
}

}  // namespace

SparseDataset parse_libsvm(std::istream& in) {
  SparseDataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line

    SparseExample ex;
    double raw_label = 0.0;
    if (!parse_double(tok, raw_label))
      throw ParseError(line_no, "non-numeric label '" + tok + "'");
    ex.label = map_label(raw_label, line_no);

    int prev_index = 0;  // 1-based indices must strictly increase
    while (ls >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw ParseError(line_no, "expected idx:val, got '" + tok + "'");
      int idx = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + colon, idx);
      if (ec != std::errc{} || p != tok.data() + colon || idx < 1)
        throw ParseError(line_no, "bad feature index in '" + tok + "'");
      if (idx <= prev_index)
        throw ParseError(line_no, "non-increasing feature index " + std::to_string(idx));
      double val = 0.0;
      if (!parse_double(tok.substr(colon + 1), val))
        throw ParseError(line_no, "bad feature value in '" + tok + "'");
      ex.indices.push_back(idx - 1);
      ex.values.push_back(val);
      prev_index = idx;
      ds.dim = std::max(ds.dim, idx);
    }
    ds.examples.push_back(std::move(ex));
  }
  if (ds.examples.empty()) throw DataError("empty dataset");
  return ds;
}

SparseDataset parse_libsvm_string(const std::string& text) {
  std::istringstream in(text);
  return parse_libsvm(in);
}

SparseDataset load_libsvm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);
  return parse_libsvm(in);
}

std::string to_libsvm(const SparseDataset& ds) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& ex : ds.examples) {
    out << (ex.label > 0 ? "+1" : "-1");
    for (std::size_t k = 0; k < ex.indices.size(); ++k)
      out << ' ' << (ex.indices[k] + 1) << ':' << ex.values[k];
    out << '\n';
  }
  return out.str();
}

void save_libsvm_file(const SparseDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset file: " + path);
  out << to_libsvm(ds);
}

SparseDataset preprocess(const SparseDataset& ds, bool add_bias, bool normalize) {
  SparseDataset out = ds;
  if (normalize) {
    for (auto& ex : out.examples) {
      const double nrm = std::sqrt(ex.squared_norm());
      if (nrm > 0.0)
        for (auto& v : ex.values) v /= nrm;
    }
    out.normalized = true;
  }
  if (add_bias) {
    for (auto& ex : out.examples) {
      ex.indices.push_back(out.dim);
      ex.values.push_back(1.0);
    }
    out.dim += 1;
    out.bias_added = true;
  }
  return out;
}

SparseDataset generate_synthetic(std::size_t n, int d, double margin,
                                 std::uint64_t seed) {
  if (n < 2 || d < 1) throw DataError("generate_synthetic requires n >= 2 and d >= 1");

  Rng rng = Rng::child(seed, /*stream=*/1ULL);
  std::vector<double> w(static_cast<std::size_t>(d));
  double w_sq = 0.0;
  for (auto& wj : w) {
    wj = rng.normal();
    w_sq += wj * wj;
  }
  if (w_sq == 0.0) {
    w[0] = 1.0;
    w_sq = 1.0;
  }

  SparseDataset ds;
  ds.dim = d;
  ds.examples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    SparseExample ex;
    ex.indices.resize(static_cast<std::size_t>(d));
    ex.values.resize(static_cast<std::size_t>(d));
    std::iota(ex.indices.begin(), ex.indices.end(), 0);
    double t = 0.0;
    for (int j = 0; j < d; ++j) {
      ex.values[static_cast<std::size_t>(j)] = rng.normal();
      t += ex.values[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(j)];
    }
    const double noisy = t + 0.1 * rng.normal();
    ex.label = noisy >= 0.0 ? 1 : -1;
    if (margin > 0.0) {
      // Shift the row along w until b a.w >= margin; keeps the instance
      // separable with at least the requested margin.
      const double bt = ex.label * t;
      if (bt < margin) {
        const double shift = ex.label * (margin - bt) / w_sq;
        for (int j = 0; j < d; ++j)
          ex.values[static_cast<std::size_t>(j)] += shift * w[static_cast<std::size_t>(j)];
      }
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

std::pair<SparseDataset, SparseDataset> split(const SparseDataset& ds,
                                              double test_fraction,
                                              std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw DataError("test_fraction must be in (0,1)");
  const std::size_t n = ds.n();
  const auto n_test = static_cast<std::size_t>(test_fraction * static_cast<double>(n));
  if (n - n_test < 1) throw DataError("split leaves an empty training set");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = Rng::child(seed, /*stream=*/2ULL);
  std::shuffle(perm.begin(), perm.end(), rng.engine());

  SparseDataset train, test;
  train.dim = test.dim = ds.dim;
  train.bias_added = test.bias_added = ds.bias_added;
  train.normalized = test.normalized = ds.normalized;
  for (std::size_t i = 0; i < n; ++i) {
    auto& dst = i < n_test ? test : train;
    dst.examples.push_back(ds.examples[perm[i]]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace svrg
