#include "svrg/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace svrg {

double LossModel::curvature() const {
  return kind == LossKind::Logistic ? 0.25 : 1.0 / (2.0 * epsilon);
}

LossModel LossModel::make(LossKind kind, double epsilon, double lambda,
                          LossMode mode, const SparseDataset& ds) {
  if (kind == LossKind::Hsvm && !(epsilon > 0.0))
    throw std::invalid_argument("HSVM threshold must be positive");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");

  LossModel m;
  m.kind = kind;
  m.epsilon = epsilon;
  m.lambda = lambda;
  m.mode = mode;
  m.lip.reserve(ds.n());
  const double c = m.curvature();
  const double fold = mode == LossMode::Folded ? lambda : 0.0;
  double sum = 0.0;
  for (const auto& ex : ds.examples) {
    const double li = c * ex.squared_norm() + fold;
    m.lip.push_back(li);
    m.lip_max = std::max(m.lip_max, li);
    sum += li;
  }
  m.lip_mean = sum / static_cast<double>(ds.n());
  return m;
}

double scalar_loss(const LossModel& model, double tau) {
  if (model.kind == LossKind::Logistic) {
    // log(1+exp(-tau)), overflow-safe for very negative tau
    if (tau < -30.0) return -tau + std::log1p(std::exp(tau));
    return std::log1p(std::exp(-tau));
  }
  const double eps = model.epsilon;
  if (tau > 1.0 + eps) return 0.0;
  if (tau < 1.0 - eps) return 1.0 - tau;
  const double r = 1.0 + eps - tau;
  return r * r / (4.0 * eps);
}

double scalar_deriv(const LossModel& model, double tau) {
  if (model.kind == LossKind::Logistic) return -1.0 / (1.0 + std::exp(tau));
  const double eps = model.epsilon;
  if (tau > 1.0 + eps) return 0.0;
  if (tau < 1.0 - eps) return -1.0;
  return -(1.0 + eps - tau) / (2.0 * eps);
}

double margin_of(const SparseDataset& ds, std::size_t i,
                 const std::vector<double>& x) {
  return ds.examples[i].label * ds.examples[i].dot(x);
}

double example_loss(const LossModel& model, const SparseDataset& ds,
                    std::size_t i, const std::vector<double>& x) {
  double v = scalar_loss(model, margin_of(ds, i, x));
  if (model.mode == LossMode::Folded && model.lambda > 0.0) {
    double sq = 0.0;
    for (double xj : x) sq += xj * xj;
    v += 0.5 * model.lambda * sq;
  }
  return v;
}

std::vector<double> example_gradient(const LossModel& model,
                                     const SparseDataset& ds, std::size_t i,
                                     const std::vector<double>& x,
                                     EvalCounter* counter) {
  if (i >= ds.n()) throw std::out_of_range("example index out of range");
  const auto& ex = ds.examples[i];
  std::vector<double> g(x.size(), 0.0);
  const double dl = scalar_deriv(model, margin_of(ds, i, x));
  for (std::size_t k = 0; k < ex.indices.size(); ++k)
    g[ex.indices[k]] = dl * ex.label * ex.values[k];
  if (model.mode == LossMode::Folded && model.lambda != 0.0)
    for (std::size_t j = 0; j < x.size(); ++j) g[j] += model.lambda * x[j];
  if (counter) counter->add(1);
  return g;
}

std::vector<double> batch_gradient(const LossModel& model,
                                   const SparseDataset& ds,
                                   std::span<const std::size_t> batch,
                                   const std::vector<double>& x,
                                   EvalCounter* counter) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  std::vector<std::size_t> order(batch.begin(), batch.end());
  std::sort(order.begin(), order.end());

  std::vector<double> g(x.size(), 0.0);
  for (std::size_t i : order) {
    if (i >= ds.n()) throw std::out_of_range("batch index out of range");
    const auto& ex = ds.examples[i];
    const double dl = scalar_deriv(model, margin_of(ds, i, x));
    for (std::size_t k = 0; k < ex.indices.size(); ++k)
      g[ex.indices[k]] += dl * ex.label * ex.values[k];
  }
  const double inv = 1.0 / static_cast<double>(order.size());
  for (auto& v : g) v *= inv;
  if (model.mode == LossMode::Folded && model.lambda != 0.0)
    for (std::size_t j = 0; j < x.size(); ++j) g[j] += model.lambda * x[j];
  if (counter) counter->add(static_cast<long long>(order.size()));
  return g;
}

std::vector<double> full_gradient(const LossModel& model,
                                  const SparseDataset& ds,
                                  const std::vector<double>& x,
                                  EvalCounter* counter) {
  std::vector<std::size_t> all(ds.n());
  std::iota(all.begin(), all.end(), 0);
  return batch_gradient(model, ds, all, x, counter);
}

double objective(const LossModel& model, const SparseDataset& ds,
                 const std::vector<double>& x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i)
    sum += scalar_loss(model, margin_of(ds, i, x));
  sum /= static_cast<double>(ds.n());
  if (model.lambda > 0.0) {
    double sq = 0.0;
    for (double xj : x) sq += xj * xj;
    sum += 0.5 * model.lambda * sq;
  }
  return sum;
}

double test_error(const SparseDataset& ds, const std::vector<double>& x) {
  std::size_t wrong = 0;
  for (const auto& ex : ds.examples) {
    const double score = ex.dot(x);
    // ties count as errors
    if (score == 0.0 || (score > 0.0) != (ex.label > 0)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(ds.n());
}

bool is_support_vector(const LossModel& model, const SparseDataset& ds,
                       std::size_t i, const std::vector<double>& x) {
  if (model.kind == LossKind::Logistic) return true;
  return scalar_deriv(model, margin_of(ds, i, x)) != 0.0;
}

std::vector<double> prox(const RegularizerSpec& reg, double step,
                         const std::vector<double>& y) {
  if (step < 0.0) throw std::invalid_argument("prox step must be nonnegative");
  switch (reg.kind) {
    case RegularizerSpec::Kind::None:
      return y;
    case RegularizerSpec::Kind::L2: {
      std::vector<double> out(y.size());
      const double scale = 1.0 / (1.0 + step * reg.lambda);
      for (std::size_t j = 0; j < y.size(); ++j) out[j] = y[j] * scale;
      return out;
    }
    case RegularizerSpec::Kind::L1: {
      std::vector<double> out(y.size());
      const double th = step * reg.lambda;
      for (std::size_t j = 0; j < y.size(); ++j) {
        const double a = std::abs(y[j]) - th;
        out[j] = a > 0.0 ? (y[j] > 0.0 ? a : -a) : 0.0;
      }
      return out;
    }
    case RegularizerSpec::Kind::Ball2: {
      std::vector<double> out = y;
      double sq = 0.0;
      for (std::size_t j = 0; j < y.size(); ++j) {
        const double c = j < reg.center.size() ? reg.center[j] : 0.0;
        sq += (y[j] - c) * (y[j] - c);
      }
      const double nrm = std::sqrt(sq);
      if (nrm > reg.radius) {
        const double scale = reg.radius / nrm;
        for (std::size_t j = 0; j < y.size(); ++j) {
          const double c = j < reg.center.size() ? reg.center[j] : 0.0;
          out[j] = c + (y[j] - c) * scale;
        }
      }
      return out;
    }
  }
  return y;
}

double penalty_value(const RegularizerSpec& reg, const std::vector<double>& x) {
  switch (reg.kind) {
    case RegularizerSpec::Kind::L1: {
      double s = 0.0;
      for (double xj : x) s += std::abs(xj);
      return reg.lambda * s;
    }
    case RegularizerSpec::Kind::L2: {
      double s = 0.0;
      for (double xj : x) s += xj * xj;
      return 0.5 * reg.lambda * s;
    }
    default:
      return 0.0;
  }
}

}  // namespace svrg
