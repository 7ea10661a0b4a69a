#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "svrg/loss.hpp"
#include "svrg/rng.hpp"
#include "svrg/sampling.hpp"

namespace svrg {

enum class Variant {
  Plain,
  Nus,
  Mixed,
  Regularized,
  Prox,
  MiniBatch,
  FixedRandom,
  Sg,
  Fg,
};

enum class SnapshotOption { LastIterate, RandomIterate, AverageIterate };
enum class SvSkipping { Off, ExactListOnly, Heuristic };
enum class SamplingWeights { Uniform, Lipschitz, FunctionValue, GradNorm };
enum class RunStatus { Ok, Diverged, PremiseViolated };

std::string to_string(RunStatus s);

struct SvrgConfig {
  Variant variant = Variant::Plain;
  double eta = 0.0;    // <= 0 picks the practical default 1/L
  std::size_t m = 0;   // 0 tracks the snapshot batch size
  BatchSchedule schedule;
  SnapshotOption snapshot_option = SnapshotOption::LastIterate;
  SvSkipping sv_skipping = SvSkipping::Off;
  std::size_t stages = 30;
  std::uint64_t seed = 1;
  std::size_t minibatch = 1;   // M, MiniBatch/FixedRandom total batch
  std::size_t fixed_size = 0;  // M_f
  SamplingWeights weights = SamplingWeights::Lipschitz;
  RegularizerSpec reg;     // Prox variant
  double sg_scale = -1.0;  // c for the SG step rule; < 0 shares eta
  bool diagnostic = false;
  // Re-estimate the variance-based schedule's S^2 on each snapshot batch;
  // costs nothing extra since the batch gradients are computed anyway.
  bool s2_restimate = false;
  double divergence_factor = 1e3;
};

struct TraceRecord {
  std::string variant;
  std::uint64_t seed = 0;
  std::size_t stage = 0;
  long long grad_evals = 0;  // cumulative
  double effective_passes = 0.0;
  double train_objective = 0.0;
  double test_error = 0.0;
  std::size_t batch_size = 0;
  std::optional<double> error_norm;
  double wall_time_ms = 0.0;
  RunStatus status = RunStatus::Ok;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  RunStatus status = RunStatus::Ok;
  std::vector<double> x;
  long long grad_evals = 0;
  long long fixed_evals = 0;       // fixed-set evaluations (Prop. 4 costing)
  long long diagnostic_evals = 0;  // excluded from grad_evals
  double eta = 0.0;                // resolved step size
};

// Alg. 3 skip/pass bookkeeping, usable standalone.
struct SkipCounters {
  std::vector<long long> sk, ps;
  explicit SkipCounters(std::size_t n) : sk(n, 0), ps(n, 0) {}
};

// If sk_i > 0 the evaluation is skipped (returns exact zero, *evaluated set
// to false) and sk_i decremented; otherwise eval() runs and zero results
// schedule 2^max(0, ps_i - 2) future skips.
double maybe_skip_gradient(SkipCounters& c, std::size_t i,
                           const std::function<double()>& eval,
                           bool* evaluated = nullptr);

// Search directions as pure functions over explicit index choices, so tests
// can enumerate expectations exactly.
std::vector<double> svrg_direction(const LossModel& model,
                                   const SparseDataset& ds, std::size_t i,
                                   const std::vector<double>& x,
                                   const std::vector<double>& snapshot,
                                   const std::vector<double>& mu);

std::vector<double> nus_direction(const LossModel& model,
                                  const SparseDataset& ds, std::size_t i,
                                  const std::vector<double>& x,
                                  const std::vector<double>& snapshot,
                                  const std::vector<double>& mu,
                                  double lbar_over_li);

// h'(x) + g-part SVRG direction; lambda comes from the Composite model.
std::vector<double> regularized_direction(const LossModel& model,
                                          const SparseDataset& ds,
                                          std::size_t i,
                                          const std::vector<double>& x,
                                          const std::vector<double>& snapshot,
                                          const std::vector<double>& mu);

// probs[i] = p_i over all n examples; batch drawn with replacement.
std::vector<double> minibatch_direction(const LossModel& model,
                                        const SparseDataset& ds,
                                        std::span<const std::size_t> batch,
                                        const std::vector<double>& probs,
                                        const std::vector<double>& x,
                                        const std::vector<double>& snapshot,
                                        const std::vector<double>& mu);

// fixed: the always-included set; random_batch: with-replacement draws from
// the rest with probs[i]; g_snapshot = g'(x^s) cached from the snapshot pass.
std::vector<double> fixed_random_direction(
    const LossModel& model, const SparseDataset& ds,
    std::span<const std::size_t> fixed, std::span<const std::size_t> random_batch,
    const std::vector<double>& probs, const std::vector<double>& x,
    const std::vector<double>& snapshot, const std::vector<double>& g_snapshot);

class Optimizer {
 public:
  Optimizer(SvrgConfig config, const LossModel& model, const SparseDataset& train,
            const SparseDataset* test = nullptr);

  RunResult run();

  // Resolved defaults (after construction): eta = 1/L, m tracks |B^s|.
  double eta() const { return eta_; }

 private:
  struct StageOutcome {
    std::size_t batch_size = 0;
    std::optional<double> error_norm;
  };

  void validate() const;
  StageOutcome take_snapshot(std::size_t stage);
  void run_inner_loop(std::size_t m_steps);
  void plain_step(std::size_t i, bool nus);
  void mixed_step(std::size_t i);
  void regularized_step(std::size_t i);
  void prox_step(std::size_t i);
  void minibatch_step();
  void fixed_random_step();
  double deriv_snapshot_side(std::size_t i);
  double deriv_iterate_side(std::size_t i, const std::vector<double>& x);
  void apply_direction(const std::vector<double>& nu);

  SvrgConfig cfg_;
  const LossModel& model_;
  const SparseDataset& train_;
  const SparseDataset* test_;

  double eta_ = 0.0;
  double eta_sg_ = 0.0;
  Rng idx_rng_;
  Rng batch_rng_;
  Rng option_rng_;

  std::vector<double> x_, snapshot_, mu_, g_snapshot_;
  std::vector<double> iterate_sum_, random_pick_;
  std::size_t random_pick_t_ = 0;
  std::vector<std::uint8_t> in_batch_;     // Mixed membership
  std::vector<std::uint8_t> nonsupport_;   // exact zero-gradient list at x^s
  SkipCounters skip_;
  std::vector<std::size_t> fixed_set_;     // FixedRandom, sorted by L_i desc
  std::vector<std::size_t> random_pool_;
  std::vector<double> probs_;              // weighted-draw probabilities
  std::optional<WeightedSampler> sampler_;

  long long grad_evals_ = 0;
  long long fixed_evals_ = 0;
  long long diag_evals_ = 0;
};

// Objective used for traces and divergence checks: model objective plus the
// explicit regularizer value for Prox runs.
double trace_objective(const SvrgConfig& cfg, const LossModel& model,
                       const SparseDataset& ds, const std::vector<double>& x);

RunResult run_optimizer(const SvrgConfig& config, const LossModel& model,
                        const SparseDataset& train,
                        const SparseDataset* test = nullptr);

}  // namespace svrg
