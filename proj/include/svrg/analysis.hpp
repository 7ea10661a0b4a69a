#pragma once

#include <span>
#include <string>
#include <vector>

#include "svrg/loss.hpp"

namespace svrg {

// Rate formulas return a value plus a premise flag so callers can annotate
// regimes where the theory is silent (e.g. the practical eta = 1/L default).
struct RateResult {
  double value = 0.0;
  bool ok = false;
  std::string reason;  // empty when ok

  static RateResult good(double v) { return {v, true, {}}; }
  static RateResult violated(double v, std::string why) {
    return {v, false, std::move(why)};
  }
};

struct RateParams {
  double eta = 0.0;
  std::size_t m = 0;
  double mu = 0.0;
  double L = 0.0;
  double Lbar = 0.0;
  double Z = 0.0;
  double sigma2 = 0.0;
  double Lbar_r = 0.0;
  double alpha = 1.0;  // |B^s|/n
};

// rho(a,b) = (1/(1-2 eta a)) (1/(m mu eta) + 2 b eta); premise violated when
// 2 eta a >= 1 or the value is >= 1.
RateResult rho(double a, double b, double eta, std::size_t m, double mu);

// rho(a) = rho(a,a); plain SVRG rate is rho(L,L).
RateResult rho_plain(const RateParams& p);

// Mixed SG/SVRG stage factor rho(L, alpha L).
RateResult rho_mixed(const RateParams& p);

// Additive error term (Z||e|| + eta||e||^2 + (eta sigma^2/2)(1-alpha)) /
// (1 - 2 eta L). With alpha = 1 the variance term vanishes.
RateResult error_term(const RateParams& p, double e_norm, double e_sq_norm);

// rho_M = (1/(M - 2 eta Lbar)) (M/(m mu eta) + 2 Lbar eta); M = 1 reduces to
// rho(Lbar).
RateResult rho_minibatch(std::size_t M, const RateParams& p);

struct FixedRandomRate {
  double zeta = 0.0;
  double kappa = 0.0;
  RateResult rate;
  bool advantage = false;  // L_1 <= n Lbar / M and M_f < (alpha-1)nM/(alpha n - M)
};

// Fixed + random mini-batch rate rho(kappa, zeta) with
// zeta = (n - M_f) Lbar_r / ((M - M_f) n), kappa = max(L_1/n, zeta).
FixedRandomRate rho_fixed_random(std::size_t n, std::size_t M, std::size_t M_f,
                                 double L1, const RateParams& p);

// Prox-SVRG factor 1/(m mu (1-4 eta L) eta) + 4 L eta (m+1)/((1-4 eta L) m);
// premise 4 eta L < 1.
RateResult rho_prox(const RateParams& p);

// (1/(n-1)) sum_i [||f_i'(x)||^2 - ||f'(x)||^2], computed as displayed.
double estimate_S2(const LossModel& model, const SparseDataset& ds,
                   const std::vector<double>& x);
double estimate_S2_from(const std::vector<std::vector<double>>& grads);

// Finite-population correction bound on E||e^s||^2.
double error_norm_bound(double s2, std::size_t n, std::size_t batch_size);

// Stage at which the variance-based schedule crosses |B| = n/2:
// s = log(gamma n / S^2) / (2 log(1/rho_tilde)).
double inflection_stage(double s2, double gamma, std::size_t n, double rho_tilde);

// Ratios of seed-averaged objective gaps between consecutive stages, reported
// only while the mean gap stays above the floating-point floor.
std::vector<double> empirical_contraction(
    const std::vector<std::vector<double>>& gaps_per_seed,
    double floor = 1e-10);

// High-accuracy reference optimum via (proximal) full-gradient descent; the
// f* oracle used by contraction checks.
std::vector<double> reference_solution(const LossModel& model,
                                       const SparseDataset& ds,
                                       const RegularizerSpec& reg = {},
                                       double tol = 1e-12,
                                       std::size_t max_passes = 200000);

}  // namespace svrg
