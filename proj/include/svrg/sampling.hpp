#pragma once

#include <cstdint>
#include <vector>

#include "svrg/loss.hpp"
#include "svrg/rng.hpp"

namespace svrg {

// Uniform index in [0, n).
std::size_t sample_uniform(std::size_t n, Rng& rng);

// Size-k subset drawn uniformly via partial Fisher-Yates; returned sorted
// ascending so downstream reductions are deterministic.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    Rng& rng);

// Alias-table sampler: O(n) build, O(1) per draw, P(i) = w_i / sum w.
class WeightedSampler {
 public:
  explicit WeightedSampler(const std::vector<double>& weights);

  std::size_t sample(Rng& rng) const;
  double prob(std::size_t i) const { return prob_[i]; }
  double total() const { return total_; }
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;       // normalized probabilities
  std::vector<double> threshold_;  // alias acceptance thresholds
  std::vector<std::size_t> alias_;
  double total_ = 0.0;
};

enum class WeightMode { FunctionValue, GradNorm };

// Snapshot-proportional sampling weights: f_i(x) or ||g_i'(x)|| in Composite
// terms. A 1e-12 floor keeps the sampler valid when many values are exactly
// zero (HSVM non-support examples).
std::vector<double> adaptive_weights(const LossModel& model,
                                     const SparseDataset& ds,
                                     const std::vector<double>& x,
                                     WeightMode mode);

struct BatchSchedule {
  enum class Kind { Full, Doubling, VarianceBased };
  Kind kind = Kind::Full;
  std::size_t b0 = 1;      // Doubling start size
  double gamma = 1.0;      // VarianceBased error budget
  double rho_tilde = 0.9;  // VarianceBased decay target
  double s2 = 1.0;         // sample-variance estimate feeding the bound
};

// Full -> n; Doubling -> min(b0 2^s, n);
// VarianceBased -> min(n, ceil(n S^2 / (S^2 + n gamma rho_tilde^{2s}))).
std::size_t next_batch_size(const BatchSchedule& schedule, std::size_t stage,
                            std::size_t n);

// min(eta, c sqrt((n-B)/(nB))): SG steps shrink as the batch approaches n.
double sg_step_size(double eta, std::size_t n, std::size_t batch_size, double c);

}  // namespace svrg
