#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "svrg/dataset.hpp"

namespace svrg {

enum class LossKind { Logistic, Hsvm };

// Whether the l2 term is folded into each f_i or held out as a separate
// smooth/proximal h. The canonical SVRG path uses Folded; the regularized
// and prox paths use Composite.
enum class LossMode { Folded, Composite };

// Tolerates concurrent increments from parallel gradient reductions.
struct EvalCounter {
  std::atomic<long long> count{0};
  void add(long long k) { count.fetch_add(k, std::memory_order_relaxed); }
  long long value() const { return count.load(std::memory_order_relaxed); }
};

struct LossModel {
  LossKind kind = LossKind::Logistic;
  double epsilon = 0.5;  // HSVM threshold
  double lambda = 0.0;   // l2 strength
  LossMode mode = LossMode::Folded;

  std::vector<double> lip;  // per-example L_i
  double lip_max = 0.0;     // L
  double lip_mean = 0.0;    // Lbar

  // Smoothness constant of the scalar loss: 1/4 logistic, 1/(2 eps) HSVM.
  double curvature() const;
  // Strong-convexity modulus fed to the rate formulas; mu = lambda is a
  // lower bound, the true mu may be larger.
  double strong_convexity() const { return lambda; }

  static LossModel make(LossKind kind, double epsilon, double lambda,
                        LossMode mode, const SparseDataset& ds);
};

double scalar_loss(const LossModel& model, double tau);
double scalar_deriv(const LossModel& model, double tau);

// tau_i = b_i a_i.x
double margin_of(const SparseDataset& ds, std::size_t i,
                 const std::vector<double>& x);

// Per-example loss value; Folded mode includes (lambda/2)||x||^2.
double example_loss(const LossModel& model, const SparseDataset& ds,
                    std::size_t i, const std::vector<double>& x);

// Dense f_i'(x): scalar_deriv(tau) b_i a_i plus, in Folded mode, lambda x.
// Counts one gradient evaluation.
std::vector<double> example_gradient(const LossModel& model,
                                     const SparseDataset& ds, std::size_t i,
                                     const std::vector<double>& x,
                                     EvalCounter* counter = nullptr);

// Mean of example gradients over the batch, summed in ascending index order
// so results are bit-reproducible. Counts |B| evaluations.
std::vector<double> batch_gradient(const LossModel& model,
                                   const SparseDataset& ds,
                                   std::span<const std::size_t> batch,
                                   const std::vector<double>& x,
                                   EvalCounter* counter = nullptr);

std::vector<double> full_gradient(const LossModel& model,
                                  const SparseDataset& ds,
                                  const std::vector<double>& x,
                                  EvalCounter* counter = nullptr);

// (1/n) sum loss(b_i a_i.x) + (lambda/2)||x||^2
double objective(const LossModel& model, const SparseDataset& ds,
                 const std::vector<double>& x);

// Fraction misclassified; ties a_i.x = 0 count as errors.
double test_error(const SparseDataset& ds, const std::vector<double>& x);

// Composite-terms test: g_i'(x) = 0 exactly, i.e. tau > 1 + eps under HSVM.
// Logistic gradients are never exactly zero, so logistic always returns true.
bool is_support_vector(const LossModel& model, const SparseDataset& ds,
                       std::size_t i, const std::vector<double>& x);

struct RegularizerSpec {
  enum class Kind { None, L2, L1, Ball2 };
  Kind kind = Kind::None;
  double lambda = 0.0;         // L1/L2 strength
  double radius = 1.0;         // Ball2
  std::vector<double> center;  // Ball2; empty means origin
};

// prox_{t h}(y). L1: soft threshold; L2: y/(1+t lambda); Ball2: Euclidean
// projection; None: y unchanged.
std::vector<double> prox(const RegularizerSpec& reg, double step,
                         const std::vector<double>& y);

// h(x) for trace reporting: lambda||x||_1 for L1, (lambda/2)||x||^2 for L2,
// 0 for None/Ball2 (indicator value inside the ball).
double penalty_value(const RegularizerSpec& reg, const std::vector<double>& x);

}  // namespace svrg
