#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "svrg/dataset.hpp"
#include "svrg/loss.hpp"
#include "svrg/rng.hpp"

using namespace svrg;

namespace {

std::vector<double> random_x(int d, Rng& rng, double scale = 1.0) {
  std::vector<double> x(d);
  for (auto& v : x) v = scale * rng.normal();
  return x;
}

double fd_partial(const LossModel& model, const SparseDataset& ds, std::size_t i,
                  std::vector<double> x, std::size_t j, double h = 1e-6) {
  x[j] += h;
  const double up = example_loss(model, ds, i, x);
  x[j] -= 2 * h;
  const double dn = example_loss(model, ds, i, x);
  return (up - dn) / (2 * h);
}

}  // namespace

TEST_CASE("scalar spot values") {
  SparseDataset ds = parse_libsvm_string("+1 1:1\n-1 1:1\n");
  const auto logi = LossModel::make(LossKind::Logistic, 0.5, 0.0, LossMode::Folded, ds);
  CHECK(scalar_loss(logi, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(scalar_deriv(logi, 0.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(scalar_loss(logi, 1000.0) == doctest::Approx(0.0));
  CHECK(std::isfinite(scalar_loss(logi, -1000.0)));
  CHECK(scalar_loss(logi, -1000.0) == doctest::Approx(1000.0));

  const auto hsvm = LossModel::make(LossKind::Hsvm, 0.5, 0.0, LossMode::Folded, ds);
  CHECK(scalar_loss(hsvm, 2.0) == 0.0);
  CHECK(scalar_loss(hsvm, 0.0) == 1.0);
  CHECK(scalar_loss(hsvm, 1.0) == doctest::Approx(0.125).epsilon(1e-15));  // eps/4
  CHECK(scalar_deriv(hsvm, 1.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(scalar_deriv(hsvm, 2.0) == 0.0);
  CHECK(scalar_deriv(hsvm, -1.0) == -1.0);
}

TEST_CASE("hsvm pieces join continuously at the kinks") {
  SparseDataset ds = parse_libsvm_string("+1 1:1\n-1 1:1\n");
  for (double eps : {0.1, 0.5, 1.0}) {
    const auto m = LossModel::make(LossKind::Hsvm, eps, 0.0, LossMode::Folded, ds);
    for (double kink : {1.0 - eps, 1.0 + eps}) {
      const double h = 1e-9;
      CHECK(scalar_loss(m, kink - h) ==
            doctest::Approx(scalar_loss(m, kink + h)).epsilon(1e-7));
      CHECK(scalar_deriv(m, kink - h) ==
            doctest::Approx(scalar_deriv(m, kink + h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("gradients match central finite differences") {
  const auto raw = generate_synthetic(25, 6, 0.0, 21);
  const auto ds = preprocess(raw, true, true);
  Rng rng(99);
  for (auto kind : {LossKind::Logistic, LossKind::Hsvm}) {
    for (auto mode : {LossMode::Folded, LossMode::Composite}) {
      const auto model = LossModel::make(kind, 0.5, 0.05, mode, ds);
      for (int rep = 0; rep < 20; ++rep) {
        const auto x = random_x(ds.dim, rng);
        const std::size_t i = rng.uniform_index(ds.n());
        if (kind == LossKind::Hsvm) {
          const double tau = margin_of(ds, i, x);
          if (std::abs(tau - 1.5) < 1e-3 || std::abs(tau - 0.5) < 1e-3) continue;
        }
        const auto g = example_gradient(model, ds, i, x);
        for (int j = 0; j < ds.dim; ++j)
          CHECK(g[j] == doctest::Approx(fd_partial(model, ds, i, x, j)).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("folded gradient equals composite gradient plus lambda x") {
  const auto ds = preprocess(generate_synthetic(10, 4, 0.0, 2), true, true);
  const double lam = 0.3;
  const auto folded = LossModel::make(LossKind::Logistic, 0.5, lam, LossMode::Folded, ds);
  const auto comp = LossModel::make(LossKind::Logistic, 0.5, lam, LossMode::Composite, ds);
  Rng rng(4);
  const auto x = random_x(ds.dim, rng);
  const auto gf = example_gradient(folded, ds, 3, x);
  const auto gc = example_gradient(comp, ds, 3, x);
  for (int j = 0; j < ds.dim; ++j)
    CHECK(gf[j] == doctest::Approx(gc[j] + lam * x[j]).epsilon(1e-14));
  // lipschitz constants differ by exactly lambda in folded terms
  CHECK(folded.lip_max == doctest::Approx(comp.lip_max + lam).epsilon(1e-14));
  CHECK(objective(folded, ds, x) == doctest::Approx(objective(comp, ds, x)).epsilon(1e-14));
}

TEST_CASE("batch gradient is the mean of example gradients and counts evals") {
  const auto ds = preprocess(generate_synthetic(12, 5, 0.0, 8), true, true);
  const auto model = LossModel::make(LossKind::Logistic, 0.5, 0.1, LossMode::Folded, ds);
  Rng rng(1);
  const auto x = random_x(ds.dim, rng);
  const std::vector<std::size_t> batch{2, 5, 7, 11};
  EvalCounter counter;
  const auto g = batch_gradient(model, ds, batch, x, &counter);
  CHECK(counter.value() == 4);
  std::vector<double> mean(x.size(), 0.0);
  for (std::size_t i : batch) {
    const auto gi = example_gradient(model, ds, i, x);
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += gi[j] / 4.0;
  }
  for (std::size_t j = 0; j < mean.size(); ++j)
    CHECK(g[j] == doctest::Approx(mean[j]).epsilon(1e-13));

  CHECK_THROWS_AS(batch_gradient(model, ds, std::vector<std::size_t>{}, x),
                  std::invalid_argument);
  const std::vector<std::size_t> shuffled{11, 2, 7, 5};
  CHECK(batch_gradient(model, ds, shuffled, x) == g);  // order-insensitive bytes
}

TEST_CASE("test_error counts ties as errors") {
  const auto ds = parse_libsvm_string("+1 1:1\n-1 1:1\n+1 2:1\n");
  CHECK(test_error(ds, {1.0, 0.0}) == doctest::Approx(2.0 / 3.0));  // tie on row 3
  CHECK(test_error(ds, {1.0, 1.0}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("support-vector predicate") {
  const auto ds = parse_libsvm_string("+1 1:1\n-1 1:1\n");
  const auto hsvm = LossModel::make(LossKind::Hsvm, 0.5, 0.0, LossMode::Composite, ds);
  const auto logi = LossModel::make(LossKind::Logistic, 0.5, 0.0, LossMode::Composite, ds);
  const std::vector<double> x{2.0};  // tau = 2 for row 0 (> 1+eps), -2 for row 1
  CHECK_FALSE(is_support_vector(hsvm, ds, 0, x));
  CHECK(is_support_vector(hsvm, ds, 1, x));
  CHECK(is_support_vector(logi, ds, 0, x));
}

TEST_CASE("prox operators") {
  RegularizerSpec l1{RegularizerSpec::Kind::L1, 2.0, 1.0, {}};
  const auto a = prox(l1, 0.5, {3.0, -0.5, 1.0, -4.0});
  CHECK(a == std::vector<double>{2.0, 0.0, 0.0, -3.0});

  RegularizerSpec l2{RegularizerSpec::Kind::L2, 3.0, 1.0, {}};
  const auto b = prox(l2, 1.0, {4.0, -8.0});
  CHECK(b[0] == doctest::Approx(1.0));
  CHECK(b[1] == doctest::Approx(-2.0));

  RegularizerSpec ball{RegularizerSpec::Kind::Ball2, 0.0, 2.0, {}};
  const auto c = prox(ball, 1.0, {3.0, 4.0});
  CHECK(std::hypot(c[0], c[1]) == doctest::Approx(2.0));
  CHECK(c[0] / c[1] == doctest::Approx(3.0 / 4.0));
  const auto inside = prox(ball, 1.0, {0.5, 0.5});
  CHECK(inside == std::vector<double>{0.5, 0.5});

  RegularizerSpec shifted{RegularizerSpec::Kind::Ball2, 0.0, 1.0, {5.0, 0.0}};
  const auto d = prox(shifted, 1.0, {0.0, 0.0});
  CHECK(d[0] == doctest::Approx(4.0));
  CHECK(d[1] == doctest::Approx(0.0));

  RegularizerSpec none;
  CHECK(prox(none, 0.1, {1.0, 2.0}) == std::vector<double>{1.0, 2.0});

  CHECK(penalty_value(l1, {1.0, -2.0}) == doctest::Approx(6.0));
  CHECK(penalty_value(l2, {2.0, 0.0}) == doctest::Approx(6.0));
  CHECK(penalty_value(ball, {9.0, 9.0}) == 0.0);
}

TEST_CASE("prox L1 matches brute-force grid minimization") {
  RegularizerSpec l1{RegularizerSpec::Kind::L1, 0.7, 1.0, {}};
  const double t = 0.3;
  for (double y : {-2.0, -0.3, 0.0, 0.15, 1.4}) {
    double best = 0.0, best_v = 1e300;
    for (double z = -3.0; z <= 3.0; z += 1e-5) {
      const double v = 0.5 * (z - y) * (z - y) + t * l1.lambda * std::abs(z);
      if (v < best_v) { best_v = v; best = z; }
    }
    const auto p = prox(l1, t, {y});
    CHECK(p[0] == doctest::Approx(best).epsilon(1e-4));
  }
}
