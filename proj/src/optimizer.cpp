#include "svrg/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace svrg {

namespace {

const char* variant_cstr(Variant v) {
  switch (v) {
    case Variant::Plain: return "plain";
    case Variant::Nus: return "nus";
    case Variant::Mixed: return "mixed";
    case Variant::Regularized: return "regularized";
    case Variant::Prox: return "prox";
    case Variant::MiniBatch: return "minibatch";
    case Variant::FixedRandom: return "fixedrandom";
    case Variant::Sg: return "sg";
    case Variant::Fg: return "fg";
  }
  return "?";
}

bool uses_snapshot(Variant v) { return v != Variant::Sg && v != Variant::Fg; }

}  // namespace

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::PremiseViolated: return "premise_violated";
  }
  return "?";
}

double maybe_skip_gradient(SkipCounters& c, std::size_t i,
                           const std::function<double()>& eval,
                           bool* evaluated) {
  if (c.sk[i] > 0) {
    --c.sk[i];
    if (evaluated) *evaluated = false;
    return 0.0;
  }
  const double g = eval();
  if (g == 0.0) {
    ++c.ps[i];
    c.sk[i] = 1LL << std::max<long long>(0, c.ps[i] - 2);
  } else {
    c.ps[i] = 0;
  }
  if (evaluated) *evaluated = true;
  return g;
}

// --- pure direction functions ------------------------------------------

namespace {

// nu += scale * (f_i'(at) - f_i'(snapshot)) with the Folded lambda part
// expanded as lambda (at - snapshot).
void add_scaled_diff(std::vector<double>& nu, const LossModel& model,
                     const SparseDataset& ds, std::size_t i,
                     const std::vector<double>& x,
                     const std::vector<double>& snapshot, double scale) {
  const auto& ex = ds.examples[i];
  const double dl_t = scalar_deriv(model, margin_of(ds, i, x));
  const double dl_s = scalar_deriv(model, margin_of(ds, i, snapshot));
  const double diff = scale * (dl_t - dl_s) * ex.label;
  for (std::size_t k = 0; k < ex.indices.size(); ++k)
    nu[ex.indices[k]] += diff * ex.values[k];
  if (model.mode == LossMode::Folded && model.lambda != 0.0) {
    const double c = scale * model.lambda;
    for (std::size_t j = 0; j < nu.size(); ++j) nu[j] += c * (x[j] - snapshot[j]);
  }
}

}  // namespace

std::vector<double> svrg_direction(const LossModel& model,
                                   const SparseDataset& ds, std::size_t i,
                                   const std::vector<double>& x,
                                   const std::vector<double>& snapshot,
                                   const std::vector<double>& mu) {
  std::vector<double> nu = mu;
  add_scaled_diff(nu, model, ds, i, x, snapshot, 1.0);
  return nu;
}

std::vector<double> nus_direction(const LossModel& model,
                                  const SparseDataset& ds, std::size_t i,
                                  const std::vector<double>& x,
                                  const std::vector<double>& snapshot,
                                  const std::vector<double>& mu,
                                  double lbar_over_li) {
  std::vector<double> nu = mu;
  add_scaled_diff(nu, model, ds, i, x, snapshot, lbar_over_li);
  return nu;
}

std::vector<double> regularized_direction(const LossModel& model,
                                          const SparseDataset& ds,
                                          std::size_t i,
                                          const std::vector<double>& x,
                                          const std::vector<double>& snapshot,
                                          const std::vector<double>& mu) {
  std::vector<double> nu = mu;
  if (model.lambda != 0.0)
    for (std::size_t j = 0; j < nu.size(); ++j) nu[j] += model.lambda * x[j];
  add_scaled_diff(nu, model, ds, i, x, snapshot, 1.0);
  return nu;
}

std::vector<double> minibatch_direction(const LossModel& model,
                                        const SparseDataset& ds,
                                        std::span<const std::size_t> batch,
                                        const std::vector<double>& probs,
                                        const std::vector<double>& x,
                                        const std::vector<double>& snapshot,
                                        const std::vector<double>& mu) {
  if (batch.empty()) throw std::invalid_argument("minibatch_direction: empty batch");
  std::vector<double> nu = mu;
  const double n = static_cast<double>(ds.n());
  const double invM = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i : batch)
    add_scaled_diff(nu, model, ds, i, x, snapshot, invM / (n * probs[i]));
  return nu;
}

std::vector<double> fixed_random_direction(
    const LossModel& model, const SparseDataset& ds,
    std::span<const std::size_t> fixed, std::span<const std::size_t> random_batch,
    const std::vector<double>& probs, const std::vector<double>& x,
    const std::vector<double>& snapshot, const std::vector<double>& g_snapshot) {
  std::vector<double> nu = g_snapshot;
  const double n = static_cast<double>(ds.n());
  // h'(x) over the fixed set
  for (std::size_t i : fixed) {
    const auto& ex = ds.examples[i];
    const double dl = scalar_deriv(model, margin_of(ds, i, x)) * ex.label / n;
    for (std::size_t k = 0; k < ex.indices.size(); ++k)
      nu[ex.indices[k]] += dl * ex.values[k];
  }
  if (model.mode == LossMode::Folded && model.lambda != 0.0) {
    const double c = static_cast<double>(fixed.size()) / n * model.lambda;
    for (std::size_t j = 0; j < nu.size(); ++j) nu[j] += c * x[j];
  }
  if (!random_batch.empty()) {
    const double invMr = 1.0 / static_cast<double>(random_batch.size());
    for (std::size_t i : random_batch)
      add_scaled_diff(nu, model, ds, i, x, snapshot, invMr / (n * probs[i]));
  }
  return nu;
}

// --- engine ---------------------------------------------------------------

Optimizer::Optimizer(SvrgConfig config, const LossModel& model,
                     const SparseDataset& train, const SparseDataset* test)
    : cfg_(std::move(config)),
      model_(model),
      train_(train),
      test_(test),
      idx_rng_(Rng::child(cfg_.seed, 10)),
      batch_rng_(Rng::child(cfg_.seed, 11)),
      option_rng_(Rng::child(cfg_.seed, 12)),
      skip_(train.n()) {
  validate();
  eta_ = cfg_.eta > 0.0 ? cfg_.eta : 1.0 / model_.lip_max;

  if (cfg_.variant == Variant::Nus) {
    sampler_.emplace(model_.lip);
  } else if (cfg_.variant == Variant::MiniBatch) {
    if (cfg_.weights == SamplingWeights::Lipschitz)
      sampler_.emplace(model_.lip);
    else if (cfg_.weights == SamplingWeights::Uniform)
      sampler_.emplace(std::vector<double>(train_.n(), 1.0));
    // FunctionValue/GradNorm samplers are rebuilt at every snapshot.
  } else if (cfg_.variant == Variant::FixedRandom) {
    std::vector<std::size_t> order(train_.n());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return model_.lip[a] > model_.lip[b];
    });
    fixed_set_.assign(order.begin(), order.begin() + static_cast<long>(cfg_.fixed_size));
    random_pool_.assign(order.begin() + static_cast<long>(cfg_.fixed_size), order.end());
    std::sort(fixed_set_.begin(), fixed_set_.end());
    std::sort(random_pool_.begin(), random_pool_.end());

    std::vector<double> pool_weights;
    pool_weights.reserve(random_pool_.size());
    for (std::size_t i : random_pool_) pool_weights.push_back(model_.lip[i]);
    sampler_.emplace(pool_weights);
    probs_.assign(train_.n(), 0.0);
    for (std::size_t k = 0; k < random_pool_.size(); ++k)
      probs_[random_pool_[k]] = sampler_->prob(k);
  }
  if (cfg_.variant == Variant::MiniBatch && sampler_) {
    probs_.assign(train_.n(), 0.0);
    for (std::size_t i = 0; i < train_.n(); ++i) probs_[i] = sampler_->prob(i);
  }
}

void Optimizer::validate() const {
  if (cfg_.eta < 0.0 && cfg_.eta != 0.0)
    throw std::invalid_argument("eta must be positive (or 0 for the 1/L default)");
  if (cfg_.stages < 1) throw std::invalid_argument("stages >= 1 required");
  if (cfg_.sv_skipping == SvSkipping::Heuristic && model_.kind != LossKind::Hsvm)
    throw std::invalid_argument("heuristic skipping requires the HSVM loss");
  if (cfg_.snapshot_option == SnapshotOption::AverageIterate &&
      cfg_.variant != Variant::Prox)
    throw std::invalid_argument("AverageIterate is reserved for the Prox variant");
  if (cfg_.variant == Variant::Regularized || cfg_.variant == Variant::Prox) {
    if (model_.mode != LossMode::Composite)
      throw std::invalid_argument("Regularized/Prox variants need a Composite model");
  }
  if (cfg_.variant == Variant::MiniBatch && cfg_.minibatch < 1)
    throw std::invalid_argument("MiniBatch needs M >= 1");
  if (cfg_.variant == Variant::FixedRandom) {
    if (cfg_.fixed_size >= cfg_.minibatch)
      throw std::invalid_argument("FixedRandom needs M_f < M");
    if (cfg_.fixed_size + 1 > train_.n())
      throw std::invalid_argument("FixedRandom needs M_f + 1 <= n");
  }
}

double Optimizer::deriv_snapshot_side(std::size_t i) {
  if (model_.kind == LossKind::Hsvm && cfg_.sv_skipping != SvSkipping::Off &&
      nonsupport_[i])
    return 0.0;  // known-exact zero, no evaluation
  if (cfg_.sv_skipping == SvSkipping::Heuristic) {
    return maybe_skip_gradient(skip_, i, [&] {
      ++grad_evals_;
      return scalar_deriv(model_, margin_of(train_, i, snapshot_));
    });
  }
  ++grad_evals_;
  return scalar_deriv(model_, margin_of(train_, i, snapshot_));
}

double Optimizer::deriv_iterate_side(std::size_t i, const std::vector<double>& x) {
  if (cfg_.sv_skipping == SvSkipping::Heuristic) {
    return maybe_skip_gradient(skip_, i, [&] {
      ++grad_evals_;
      return scalar_deriv(model_, margin_of(train_, i, x));
    });
  }
  ++grad_evals_;
  return scalar_deriv(model_, margin_of(train_, i, x));
}

Optimizer::StageOutcome Optimizer::take_snapshot(std::size_t stage) {
  const std::size_t n = train_.n();
  snapshot_ = x_;
  nonsupport_.assign(n, 0);
  StageOutcome out;

  if (cfg_.variant == Variant::FixedRandom) {
    // g'(x^s) over the non-fixed pool, cached for every inner step.
    g_snapshot_.assign(x_.size(), 0.0);
    for (std::size_t i : random_pool_) {
      const auto& ex = train_.examples[i];
      const double dl = scalar_deriv(model_, margin_of(train_, i, snapshot_));
      ++grad_evals_;
      const double c = dl * ex.label;
      for (std::size_t k = 0; k < ex.indices.size(); ++k)
        g_snapshot_[ex.indices[k]] += c * ex.values[k];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& v : g_snapshot_) v *= inv_n;
    if (model_.mode == LossMode::Folded && model_.lambda != 0.0) {
      const double c = static_cast<double>(random_pool_.size()) * inv_n * model_.lambda;
      for (std::size_t j = 0; j < g_snapshot_.size(); ++j)
        g_snapshot_[j] += c * snapshot_[j];
    }
    out.batch_size = random_pool_.size();
    return out;
  }

  const std::size_t bs = next_batch_size(cfg_.schedule, stage, n);
  out.batch_size = bs;
  std::vector<std::size_t> batch =
      bs == n ? [&] {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        return all;
      }()
              : sample_without_replacement(n, bs, batch_rng_);

  if (cfg_.variant == Variant::Mixed) {
    in_batch_.assign(n, 0);
    for (std::size_t i : batch) in_batch_[i] = 1;
    eta_sg_ = cfg_.sg_scale < 0.0 ? eta_ : sg_step_size(eta_, n, bs, cfg_.sg_scale);
  }

  // mu^s accumulated in ascending index order, mirroring batch_gradient so
  // the Full schedule yields e^s = 0 exactly.
  mu_.assign(x_.size(), 0.0);
  const bool heuristic = cfg_.sv_skipping == SvSkipping::Heuristic;
  const bool restimate = cfg_.s2_restimate &&
                         cfg_.schedule.kind == BatchSchedule::Kind::VarianceBased &&
                         bs >= 2;
  double snap_sq = 0.0;
  if (restimate)
    for (double v : snapshot_) snap_sq += v * v;
  double sum_grad_sq = 0.0;

  for (std::size_t i : batch) {
    double dl;
    double tau = 0.0;
    if (heuristic) {
      dl = maybe_skip_gradient(skip_, i, [&] {
        ++grad_evals_;
        tau = margin_of(train_, i, snapshot_);
        return scalar_deriv(model_, tau);
      });
    } else {
      tau = margin_of(train_, i, snapshot_);
      dl = scalar_deriv(model_, tau);
      ++grad_evals_;
    }
    if (model_.kind == LossKind::Hsvm && cfg_.sv_skipping != SvSkipping::Off &&
        dl == 0.0)
      nonsupport_[i] = 1;
    const auto& ex = train_.examples[i];
    if (restimate) {
      // ||f_i'||^2 with the Folded lambda term; a_i . x^s = tau * b_i
      double sq = dl * dl * ex.squared_norm();
      if (model_.mode == LossMode::Folded && model_.lambda != 0.0)
        sq += 2.0 * dl * model_.lambda * tau + model_.lambda * model_.lambda * snap_sq;
      sum_grad_sq += sq;
    }
    const double c = dl * ex.label;
    for (std::size_t k = 0; k < ex.indices.size(); ++k)
      mu_[ex.indices[k]] += c * ex.values[k];
  }
  const double inv = 1.0 / static_cast<double>(bs);
  for (auto& v : mu_) v *= inv;
  if (model_.mode == LossMode::Folded && model_.lambda != 0.0)
    for (std::size_t j = 0; j < mu_.size(); ++j)
      mu_[j] += model_.lambda * snapshot_[j];

  if (restimate) {
    double mu_sq = 0.0;
    for (double v : mu_) mu_sq += v * v;
    const double est = (sum_grad_sq - static_cast<double>(bs) * mu_sq) /
                       static_cast<double>(bs - 1);
    if (est > 0.0) cfg_.schedule.s2 = est;
  }

  if (cfg_.variant == Variant::MiniBatch &&
      (cfg_.weights == SamplingWeights::FunctionValue ||
       cfg_.weights == SamplingWeights::GradNorm)) {
    const auto mode = cfg_.weights == SamplingWeights::FunctionValue
                          ? WeightMode::FunctionValue
                          : WeightMode::GradNorm;
    sampler_.emplace(adaptive_weights(model_, train_, snapshot_, mode));
    probs_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) probs_[i] = sampler_->prob(i);
  }

  if (cfg_.diagnostic) {
    EvalCounter diag;
    const std::vector<double> full = full_gradient(model_, train_, snapshot_, &diag);
    diag_evals_ += diag.value();
    double sq = 0.0;
    for (std::size_t j = 0; j < mu_.size(); ++j)
      sq += (mu_[j] - full[j]) * (mu_[j] - full[j]);
    out.error_norm = std::sqrt(sq);
  }
  return out;
}

void Optimizer::apply_direction(const std::vector<double>& nu) {
  for (std::size_t j = 0; j < x_.size(); ++j) x_[j] -= eta_ * nu[j];
}

void Optimizer::plain_step(std::size_t i, bool nus) {
  const auto& ex = train_.examples[i];
  const double dl_t = deriv_iterate_side(i, x_);
  const double dl_s = deriv_snapshot_side(i);
  const double scale = nus ? model_.lip_mean / model_.lip[i] : 1.0;

  std::vector<double> nu = mu_;
  const double diff = scale * (dl_t - dl_s) * ex.label;
  for (std::size_t k = 0; k < ex.indices.size(); ++k)
    nu[ex.indices[k]] += diff * ex.values[k];
  if (model_.mode == LossMode::Folded && model_.lambda != 0.0) {
    const double c = scale * model_.lambda;
    for (std::size_t j = 0; j < nu.size(); ++j)
      nu[j] += c * (x_[j] - snapshot_[j]);
  }
  apply_direction(nu);
}

void Optimizer::mixed_step(std::size_t i) {
  if (in_batch_[i]) {
    plain_step(i, false);
    return;
  }
  // classic SG step on f_i alone
  const auto& ex = train_.examples[i];
  const double dl = deriv_iterate_side(i, x_);
  if (model_.mode == LossMode::Folded && model_.lambda != 0.0)
    for (std::size_t j = 0; j < x_.size(); ++j)
      x_[j] -= eta_sg_ * model_.lambda * x_[j];
  const double c = eta_sg_ * dl * ex.label;
  for (std::size_t k = 0; k < ex.indices.size(); ++k)
    x_[ex.indices[k]] -= c * ex.values[k];
}

void Optimizer::regularized_step(std::size_t i) {
  const auto& ex = train_.examples[i];
  const double dl_t = deriv_iterate_side(i, x_);
  const double dl_s = deriv_snapshot_side(i);

  std::vector<double> nu = mu_;
  if (model_.lambda != 0.0)
    for (std::size_t j = 0; j < nu.size(); ++j) nu[j] += model_.lambda * x_[j];
  const double diff = (dl_t - dl_s) * ex.label;
  for (std::size_t k = 0; k < ex.indices.size(); ++k)
    nu[ex.indices[k]] += diff * ex.values[k];
  apply_direction(nu);
}

void Optimizer::prox_step(std::size_t i) {
  const auto& ex = train_.examples[i];
  const double dl_t = deriv_iterate_side(i, x_);
  const double dl_s = deriv_snapshot_side(i);

  std::vector<double> nu = mu_;
  const double diff = (dl_t - dl_s) * ex.label;
  for (std::size_t k = 0; k < ex.indices.size(); ++k)
    nu[ex.indices[k]] += diff * ex.values[k];
  std::vector<double> y(x_.size());
  for (std::size_t j = 0; j < x_.size(); ++j) y[j] = x_[j] - eta_ * nu[j];
  x_ = prox(cfg_.reg, eta_, y);
}

void Optimizer::minibatch_step() {
  const std::size_t M = cfg_.minibatch;
  const double n = static_cast<double>(train_.n());
  std::vector<double> nu = mu_;
  double lambda_coef = 0.0;
  for (std::size_t k = 0; k < M; ++k) {
    const std::size_t i = sampler_->sample(idx_rng_);
    const auto& ex = train_.examples[i];
    const double dl_t = scalar_deriv(model_, margin_of(train_, i, x_));
    const double dl_s = scalar_deriv(model_, margin_of(train_, i, snapshot_));
    grad_evals_ += 2;
    const double scale = 1.0 / (static_cast<double>(M) * n * probs_[i]);
    const double diff = scale * (dl_t - dl_s) * ex.label;
    for (std::size_t j = 0; j < ex.indices.size(); ++j)
      nu[ex.indices[j]] += diff * ex.values[j];
    lambda_coef += scale;
  }
  if (model_.mode == LossMode::Folded && model_.lambda != 0.0) {
    const double c = lambda_coef * model_.lambda;
    for (std::size_t j = 0; j < nu.size(); ++j)
      nu[j] += c * (x_[j] - snapshot_[j]);
  }
  apply_direction(nu);
}

void Optimizer::fixed_random_step() {
  const std::size_t M_r = cfg_.minibatch - cfg_.fixed_size;
  const double n = static_cast<double>(train_.n());
  std::vector<double> nu = g_snapshot_;

  for (std::size_t i : fixed_set_) {
    const auto& ex = train_.examples[i];
    const double dl = scalar_deriv(model_, margin_of(train_, i, x_));
    ++fixed_evals_;
    const double c = dl * ex.label / n;
    for (std::size_t k = 0; k < ex.indices.size(); ++k)
      nu[ex.indices[k]] += c * ex.values[k];
  }
  if (model_.mode == LossMode::Folded && model_.lambda != 0.0) {
    const double c = static_cast<double>(fixed_set_.size()) / n * model_.lambda;
    for (std::size_t j = 0; j < nu.size(); ++j) nu[j] += c * x_[j];
  }

  double lambda_coef = 0.0;
  for (std::size_t k = 0; k < M_r; ++k) {
    const std::size_t i = random_pool_[sampler_->sample(idx_rng_)];
    const auto& ex = train_.examples[i];
    const double dl_t = scalar_deriv(model_, margin_of(train_, i, x_));
    const double dl_s = scalar_deriv(model_, margin_of(train_, i, snapshot_));
    grad_evals_ += 2;
    const double scale = 1.0 / (static_cast<double>(M_r) * n * probs_[i]);
    const double diff = scale * (dl_t - dl_s) * ex.label;
    for (std::size_t j = 0; j < ex.indices.size(); ++j)
      nu[ex.indices[j]] += diff * ex.values[j];
    lambda_coef += scale;
  }
  if (model_.mode == LossMode::Folded && model_.lambda != 0.0) {
    const double c = lambda_coef * model_.lambda;
    for (std::size_t j = 0; j < nu.size(); ++j)
      nu[j] += c * (x_[j] - snapshot_[j]);
  }
  apply_direction(nu);
}

void Optimizer::run_inner_loop(std::size_t m_steps) {
  const bool average = cfg_.snapshot_option == SnapshotOption::AverageIterate;
  const bool random = cfg_.snapshot_option == SnapshotOption::RandomIterate;
  if (average) iterate_sum_.assign(x_.size(), 0.0);
  if (random) random_pick_t_ = 1 + option_rng_.uniform_index(m_steps);

  for (std::size_t t = 1; t <= m_steps; ++t) {
    switch (cfg_.variant) {
      case Variant::Plain:
        plain_step(sample_uniform(train_.n(), idx_rng_), false);
        break;
      case Variant::Nus:
        plain_step(sampler_->sample(idx_rng_), true);
        break;
      case Variant::Mixed:
        mixed_step(sample_uniform(train_.n(), idx_rng_));
        break;
      case Variant::Regularized:
        regularized_step(sample_uniform(train_.n(), idx_rng_));
        break;
      case Variant::Prox:
        prox_step(sample_uniform(train_.n(), idx_rng_));
        break;
      case Variant::MiniBatch:
        minibatch_step();
        break;
      case Variant::FixedRandom:
        fixed_random_step();
        break;
      default:
        throw std::logic_error("inner loop on a baseline variant");
    }
    if (average)
      for (std::size_t j = 0; j < x_.size(); ++j) iterate_sum_[j] += x_[j];
    if (random && t == random_pick_t_) random_pick_ = x_;
  }

  if (average) {
    const double inv = 1.0 / static_cast<double>(m_steps);
    for (std::size_t j = 0; j < x_.size(); ++j) x_[j] = iterate_sum_[j] * inv;
  } else if (random) {
    x_ = random_pick_;
  }
}

double trace_objective(const SvrgConfig& cfg, const LossModel& model,
                       const SparseDataset& ds, const std::vector<double>& x) {
  double obj = objective(model, ds, x);
  if (cfg.variant == Variant::Prox) obj += penalty_value(cfg.reg, x);
  return obj;
}

RunResult Optimizer::run() {
  const std::size_t n = train_.n();
  x_.assign(static_cast<std::size_t>(train_.dim), 0.0);
  grad_evals_ = fixed_evals_ = diag_evals_ = 0;
  skip_ = SkipCounters(n);

  RunResult result;
  result.eta = eta_;
  const double initial_obj = trace_objective(cfg_, model_, train_, x_);

  for (std::size_t s = 0; s < cfg_.stages; ++s) {
    const auto t0 = std::chrono::steady_clock::now();
    StageOutcome outcome;

    if (cfg_.variant == Variant::Sg) {
      const std::size_t m_steps = cfg_.m > 0 ? cfg_.m : n;
      for (std::size_t t = 0; t < m_steps; ++t) {
        const std::size_t i = sample_uniform(n, idx_rng_);
        const auto& ex = train_.examples[i];
        const double dl = scalar_deriv(model_, margin_of(train_, i, x_));
        ++grad_evals_;
        if (model_.mode == LossMode::Folded && model_.lambda != 0.0)
          for (std::size_t j = 0; j < x_.size(); ++j)
            x_[j] -= eta_ * model_.lambda * x_[j];
        const double c = eta_ * dl * ex.label;
        for (std::size_t k = 0; k < ex.indices.size(); ++k)
          x_[ex.indices[k]] -= c * ex.values[k];
      }
    } else if (cfg_.variant == Variant::Fg) {
      EvalCounter counter;
      const std::vector<double> g = full_gradient(model_, train_, x_, &counter);
      grad_evals_ += counter.value();
      for (std::size_t j = 0; j < x_.size(); ++j) x_[j] -= eta_ * g[j];
      outcome.batch_size = n;
    } else {
      outcome = take_snapshot(s);
      const std::size_t m_steps = cfg_.m > 0 ? cfg_.m : outcome.batch_size;
      run_inner_loop(m_steps);
    }

    const auto t1 = std::chrono::steady_clock::now();
    const double obj = trace_objective(cfg_, model_, train_, x_);

    TraceRecord rec;
    rec.variant = variant_cstr(cfg_.variant);
    rec.seed = cfg_.seed;
    rec.stage = s;
    rec.grad_evals = grad_evals_;
    rec.effective_passes = static_cast<double>(grad_evals_) / static_cast<double>(n);
    rec.train_objective = obj;
    rec.test_error = test_error(test_ ? *test_ : train_, x_);
    rec.batch_size = outcome.batch_size;
    rec.error_norm = outcome.error_norm;
    rec.wall_time_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    rec.status = RunStatus::Ok;

    const bool diverged =
        !std::isfinite(obj) || obj > cfg_.divergence_factor * initial_obj;
    if (diverged) rec.status = RunStatus::Diverged;
    result.trace.push_back(std::move(rec));
    if (diverged) {
      result.status = RunStatus::Diverged;
      break;
    }
  }

  result.x = x_;
  result.grad_evals = grad_evals_;
  result.fixed_evals = fixed_evals_;
  result.diagnostic_evals = diag_evals_;
  return result;
}

RunResult run_optimizer(const SvrgConfig& config, const LossModel& model,
                        const SparseDataset& train, const SparseDataset* test) {
  Optimizer opt(config, model, train, test);
  return opt.run();
}

}  // namespace svrg
