#include "svrg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace svrg {

RateResult rho(double a, double b, double eta, std::size_t m, double mu) {
  if (!(eta > 0.0) || m < 1 || !(mu > 0.0))
    throw std::invalid_argument("rho: need eta > 0, m >= 1, mu > 0");
  const double denom = 1.0 - 2.0 * eta * a;
  if (denom <= 0.0)
    return RateResult::violated(std::numeric_limits<double>::quiet_NaN(),
                                "2*eta*a >= 1");
  const double v =
      (1.0 / (static_cast<double>(m) * mu * eta) + 2.0 * b * eta) / denom;
  if (v >= 1.0) return RateResult::violated(v, "rho >= 1");
  return RateResult::good(v);
}

RateResult rho_plain(const RateParams& p) { return rho(p.L, p.L, p.eta, p.m, p.mu); }

RateResult rho_mixed(const RateParams& p) {
  return rho(p.L, p.alpha * p.L, p.eta, p.m, p.mu);
}

RateResult error_term(const RateParams& p, double e_norm, double e_sq_norm) {
  const double denom = 1.0 - 2.0 * p.eta * p.L;
  if (denom <= 0.0)
    return RateResult::violated(std::numeric_limits<double>::quiet_NaN(),
                                "2*eta*L >= 1");
  const double v = (p.Z * e_norm + p.eta * e_sq_norm +
                    0.5 * p.eta * p.sigma2 * (1.0 - p.alpha)) /
                   denom;
  return RateResult::good(v);
}

RateResult rho_minibatch(std::size_t M, const RateParams& p) {
  if (M < 1) throw std::invalid_argument("rho_minibatch: M >= 1");
  const double denom = static_cast<double>(M) - 2.0 * p.eta * p.Lbar;
  if (denom <= 0.0)
    return RateResult::violated(std::numeric_limits<double>::quiet_NaN(),
                                "M - 2*eta*Lbar <= 0");
  const double v = (static_cast<double>(M) /
                        (static_cast<double>(p.m) * p.mu * p.eta) +
                    2.0 * p.Lbar * p.eta) /
                   denom;
  if (v >= 1.0) return RateResult::violated(v, "rho_M >= 1");
  return RateResult::good(v);
}

FixedRandomRate rho_fixed_random(std::size_t n, std::size_t M, std::size_t M_f,
                                 double L1, const RateParams& p) {
  if (M_f >= M || M > n)
    throw std::invalid_argument("rho_fixed_random: need M_f < M <= n");
  FixedRandomRate out;
  out.zeta = (static_cast<double>(n - M_f) * p.Lbar_r) /
             (static_cast<double>(M - M_f) * static_cast<double>(n));
  out.kappa = std::max(L1 / static_cast<double>(n), out.zeta);
  out.rate = rho(out.kappa, out.zeta, p.eta, p.m, p.mu);

  const double nd = static_cast<double>(n), Md = static_cast<double>(M);
  const double a = p.Lbar / p.Lbar_r;
  out.advantage = L1 <= nd * p.Lbar / Md &&
                  static_cast<double>(M_f) < (a - 1.0) * nd * Md / (a * nd - Md);
  return out;
}

RateResult rho_prox(const RateParams& p) {
  const double denom = 1.0 - 4.0 * p.eta * p.L;
  if (denom <= 0.0)
    return RateResult::violated(std::numeric_limits<double>::quiet_NaN(),
                                "4*eta*L >= 1");
  const double md = static_cast<double>(p.m);
  const double v = 1.0 / (md * p.mu * denom * p.eta) +
                   4.0 * p.L * p.eta * (md + 1.0) / (denom * md);
  if (v >= 1.0) return RateResult::violated(v, "rho >= 1");
  return RateResult::good(v);
}

double estimate_S2_from(const std::vector<std::vector<double>>& grads) {
  const std::size_t n = grads.size();
  if (n < 2) throw std::invalid_argument("estimate_S2: need n >= 2");
  const std::size_t d = grads[0].size();
  std::vector<double> mean(d, 0.0);
  for (const auto& g : grads)
    for (std::size_t j = 0; j < d; ++j) mean[j] += g[j];
  for (auto& v : mean) v /= static_cast<double>(n);

  double mean_sq = 0.0;
  for (double v : mean) mean_sq += v * v;

  double total = 0.0;
  for (const auto& g : grads) {
    double sq = 0.0;
    for (double v : g) sq += v * v;
    total += sq - mean_sq;
  }
  return total / static_cast<double>(n - 1);
}

double estimate_S2(const LossModel& model, const SparseDataset& ds,
                   const std::vector<double>& x) {
  std::vector<std::vector<double>> grads;
  grads.reserve(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i)
    grads.push_back(example_gradient(model, ds, i, x));
  return estimate_S2_from(grads);
}

double error_norm_bound(double s2, std::size_t n, std::size_t batch_size) {
  if (batch_size < 1 || batch_size > n)
    throw std::invalid_argument("error_norm_bound: need 1 <= B <= n");
  return static_cast<double>(n - batch_size) /
         (static_cast<double>(n) * static_cast<double>(batch_size)) * s2;
}

double inflection_stage(double s2, double gamma, std::size_t n, double rho_tilde) {
  if (!(s2 > 0.0) || !(gamma > 0.0) || !(rho_tilde > 0.0 && rho_tilde < 1.0))
    throw std::invalid_argument("inflection_stage: invalid parameters");
  // The schedule hits B = n/2 when rho_tilde^{2s} = S^2/(gamma n), i.e. at
  // s = log(gamma n / S^2) / (2 log(1/rho_tilde)).
  return std::log(gamma * static_cast<double>(n) / s2) /
         (2.0 * std::log(1.0 / rho_tilde));
}

std::vector<double> empirical_contraction(
    const std::vector<std::vector<double>>& gaps_per_seed, double floor) {
  if (gaps_per_seed.empty()) return {};
  const std::size_t stages = gaps_per_seed[0].size();
  std::vector<double> mean(stages, 0.0);
  for (const auto& seed_gaps : gaps_per_seed) {
    if (seed_gaps.size() != stages)
      throw std::invalid_argument("empirical_contraction: ragged gap traces");
    for (std::size_t s = 0; s < stages; ++s) mean[s] += seed_gaps[s];
  }
  for (auto& v : mean) v /= static_cast<double>(gaps_per_seed.size());

  std::vector<double> ratios;
  for (std::size_t s = 0; s + 1 < stages; ++s) {
    if (mean[s] <= floor) break;
    ratios.push_back(mean[s + 1] / mean[s]);
  }
  return ratios;
}

std::vector<double> reference_solution(const LossModel& model,
                                       const SparseDataset& ds,
                                       const RegularizerSpec& reg, double tol,
                                       std::size_t max_passes) {
  std::vector<double> x(static_cast<std::size_t>(ds.dim), 0.0);
  const double eta = 1.0 / model.lip_max;
  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    std::vector<double> g = full_gradient(model, ds, x);
    if (reg.kind == RegularizerSpec::Kind::None) {
      double gn = 0.0;
      for (double v : g) gn += v * v;
      if (std::sqrt(gn) < tol) break;
      for (std::size_t j = 0; j < x.size(); ++j) x[j] -= eta * g[j];
    } else {
      std::vector<double> y(x.size());
      for (std::size_t j = 0; j < x.size(); ++j) y[j] = x[j] - eta * g[j];
      std::vector<double> next = prox(reg, eta, y);
      double move = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j)
        move += (next[j] - x[j]) * (next[j] - x[j]);
      x = std::move(next);
      if (std::sqrt(move) / eta < tol) break;
    }
  }
  return x;
}

}  // namespace svrg
