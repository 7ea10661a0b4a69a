#include "svrg/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace svrg {

std::size_t sample_uniform(std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_uniform: n must be positive");
  return rng.uniform_index(n);
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    Rng& rng) {
  if (k < 1 || k > n)
    throw std::invalid_argument("sample_without_replacement: need 1 <= k <= n");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t t = 0; t < k; ++t)
    std::swap(pool[t], pool[t + rng.uniform_index(n - t)]);
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

WeightedSampler::WeightedSampler(const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw std::invalid_argument("WeightedSampler: empty weights");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("WeightedSampler: weights must be finite and nonnegative");
  total_ = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total_ > 0.0))
    throw std::invalid_argument("WeightedSampler: at least one weight must be positive");

  prob_.resize(n);
  for (std::size_t i = 0; i < n; ++i) prob_[i] = weights[i] / total_;

  threshold_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::queue<std::size_t> small, large;
  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = prob_[i] * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.front(), l = large.front();
    small.pop();
    large.pop();
    threshold_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    (scaled[l] < 1.0 ? small : large).push(l);
  }
  while (!large.empty()) {
    threshold_[large.front()] = 1.0;
    alias_[large.front()] = large.front();
    large.pop();
  }
  while (!small.empty()) {
    threshold_[small.front()] = 1.0;
    alias_[small.front()] = small.front();
    small.pop();
  }
}

std::size_t WeightedSampler::sample(Rng& rng) const {
  const std::size_t i = rng.uniform_index(prob_.size());
  return rng.uniform() < threshold_[i] ? i : alias_[i];
}

std::vector<double> adaptive_weights(const LossModel& model,
                                     const SparseDataset& ds,
                                     const std::vector<double>& x,
                                     WeightMode mode) {
  std::vector<double> w(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double tau = margin_of(ds, i, x);
    if (mode == WeightMode::FunctionValue) {
      w[i] = scalar_loss(model, tau);
    } else {
      // ||g_i'(x)|| = |l'(tau)| ||a_i|| in Composite terms
      w[i] = std::abs(scalar_deriv(model, tau)) *
             std::sqrt(ds.examples[i].squared_norm());
    }
    w[i] += 1e-12;
  }
  return w;
}

std::size_t next_batch_size(const BatchSchedule& schedule, std::size_t stage,
                            std::size_t n) {
  switch (schedule.kind) {
    case BatchSchedule::Kind::Full:
      return n;
    case BatchSchedule::Kind::Doubling: {
      double b = static_cast<double>(std::max<std::size_t>(schedule.b0, 1)) *
                 std::pow(2.0, static_cast<double>(stage));
      return b >= static_cast<double>(n) ? n
                                         : static_cast<std::size_t>(b);
    }
    case BatchSchedule::Kind::VarianceBased: {
      const double decay = std::pow(schedule.rho_tilde, 2.0 * static_cast<double>(stage));
      const double lower = static_cast<double>(n) * schedule.s2 /
                           (schedule.s2 + static_cast<double>(n) * schedule.gamma * decay);
      const auto b = static_cast<std::size_t>(std::ceil(lower));
      return std::clamp<std::size_t>(b, 1, n);
    }
  }
  return n;
}

double sg_step_size(double eta, std::size_t n, std::size_t batch_size, double c) {
  if (batch_size < 1 || batch_size > n)
    throw std::invalid_argument("sg_step_size: need 1 <= B <= n");
  const double ratio = static_cast<double>(n - batch_size) /
                       (static_cast<double>(n) * static_cast<double>(batch_size));
  return std::min(eta, c * std::sqrt(ratio));
}

}  // namespace svrg
