#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "svrg/dataset.hpp"

using namespace svrg;

TEST_CASE("libsvm parsing basics") {
  const auto ds = parse_libsvm_string("+1 1:0.5 3:2\n-1 2:1\n");
  REQUIRE(ds.n() == 2);
  CHECK(ds.dim == 3);
  CHECK(ds.examples[0].label == 1);
  CHECK(ds.examples[0].indices == std::vector<int>{0, 2});
  CHECK(ds.examples[0].values == std::vector<double>{0.5, 2.0});
  CHECK(ds.examples[1].label == -1);
  CHECK(ds.examples[1].indices == std::vector<int>{1});
}

TEST_CASE("0/1 labels map to -1/+1") {
  const auto ds = parse_libsvm_string("0 1:1\n1 1:1\n");
  CHECK(ds.examples[0].label == -1);
  CHECK(ds.examples[1].label == 1);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_AS(parse_libsvm_string("+1 2:1 1:1\n"), ParseError);  // not increasing
  CHECK_THROWS_AS(parse_libsvm_string("+1 0:1\n"), ParseError);      // 1-based
  CHECK_THROWS_AS(parse_libsvm_string("+2 1:1\n"), ParseError);      // bad label
  CHECK_THROWS_AS(parse_libsvm_string("+1 a:1\n"), ParseError);
  CHECK_THROWS_AS(parse_libsvm_string(""), DataError);  // empty dataset
  try {
    parse_libsvm_string("+1 1:1\n-1 1:1 1:2\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("serialize then reparse round-trips bytes") {
  const auto ds = generate_synthetic(40, 6, 0.0, 7);
  const std::string text = to_libsvm(ds);
  const auto back = parse_libsvm_string(text);
  REQUIRE(back.n() == ds.n());
  CHECK(to_libsvm(back) == text);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    CHECK(back.examples[i].label == ds.examples[i].label);
    CHECK(back.examples[i].indices == ds.examples[i].indices);
    REQUIRE(back.examples[i].values.size() == ds.examples[i].values.size());
    for (std::size_t k = 0; k < ds.examples[i].values.size(); ++k)
      CHECK(back.examples[i].values[k] == ds.examples[i].values[k]);  // 17 digits
  }
}

TEST_CASE("preprocess normalizes rows then appends a unit bias column") {
  const auto raw = parse_libsvm_string("+1 1:3 2:4\n-1 1:2\n");
  const auto ds = preprocess(raw, true, true);
  CHECK(ds.dim == raw.dim + 1);
  CHECK(ds.bias_added);
  CHECK(ds.normalized);
  for (const auto& ex : ds.examples) {
    // unit data part plus bias 1 => squared norm 2
    CHECK(ex.squared_norm() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ex.indices.back() == raw.dim);  // bias at the old dim
    CHECK(ex.values.back() == 1.0);
  }
  const auto plain = preprocess(raw, false, false);
  CHECK(plain.dim == raw.dim);
  CHECK(plain.examples[0].values == raw.examples[0].values);
}

TEST_CASE("normalization leaves all-zero rows untouched") {
  SparseDataset raw;
  raw.dim = 2;
  raw.examples.push_back({{}, {}, 1});
  raw.examples.push_back({{0}, {2.0}, -1});
  const auto ds = preprocess(raw, false, true);
  CHECK(ds.examples[0].values.empty());
  CHECK(ds.examples[1].values[0] == doctest::Approx(1.0));
}

TEST_CASE("synthetic generation is seeded and validates arguments") {
  const auto a = generate_synthetic(30, 5, 0.0, 11);
  const auto b = generate_synthetic(30, 5, 0.0, 11);
  const auto c = generate_synthetic(30, 5, 0.0, 12);
  CHECK(to_libsvm(a) == to_libsvm(b));
  CHECK(to_libsvm(a) != to_libsvm(c));
  CHECK(a.dim == 5);
  for (const auto& ex : a.examples) CHECK((ex.label == 1 || ex.label == -1));
  CHECK_THROWS_AS(generate_synthetic(1, 5, 0.0, 1), DataError);
  CHECK_THROWS_AS(generate_synthetic(10, 0, 0.0, 1), DataError);
}

TEST_CASE("margin produces a separable instance") {
  // some w achieves margin >= 1 on every example, so min_i max-margin > 0;
  // cheap proxy: labels must not be constant-fit-impossible, verified by
  // running the generator's own construction: b_i (a_i . w) >= margin for the
  // planted w is what the generator promises. We verify separability via a
  // perceptron pass.
  const auto ds = generate_synthetic(200, 8, 1.0, 5);
  std::vector<double> w(8, 0.0);
  bool separated = false;
  for (int pass = 0; pass < 2000 && !separated; ++pass) {
    separated = true;
    for (const auto& ex : ds.examples) {
      double s = 0.0;
      for (std::size_t k = 0; k < ex.indices.size(); ++k)
        s += ex.values[k] * w[ex.indices[k]];
      if (ex.label * s <= 0.0) {
        separated = false;
        for (std::size_t k = 0; k < ex.indices.size(); ++k)
          w[ex.indices[k]] += ex.label * ex.values[k];
      }
    }
  }
  CHECK(separated);
}

TEST_CASE("split partitions the dataset deterministically") {
  const auto ds = generate_synthetic(101, 4, 0.0, 3);
  const auto [train, test] = split(ds, 0.25, 9);
  CHECK(test.n() == 25);  // floor(0.25 * 101)
  CHECK(train.n() == 76);
  CHECK(train.dim == ds.dim);

  // union as multiset of serialized rows
  std::multiset<std::string> orig, parts;
  for (const auto& ex : ds.examples) {
    SparseDataset one;
    one.dim = ds.dim;
    one.examples.push_back(ex);
    orig.insert(to_libsvm(one));
  }
  for (const auto* part : {&train, &test})
    for (const auto& ex : part->examples) {
      SparseDataset one;
      one.dim = ds.dim;
      one.examples.push_back(ex);
      parts.insert(to_libsvm(one));
    }
  CHECK(orig == parts);

  const auto [train2, test2] = split(ds, 0.25, 9);
  CHECK(to_libsvm(train2) == to_libsvm(train));
  CHECK(to_libsvm(test2) == to_libsvm(test));

  CHECK_THROWS_AS(split(ds, 0.0, 1), DataError);
  CHECK_THROWS_AS(split(ds, 1.0, 1), DataError);
}
