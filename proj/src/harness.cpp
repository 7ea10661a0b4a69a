#include "svrg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace svrg {

namespace {

using nlohmann::json;

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument("bad boolean value: " + v);
}

std::vector<std::string> split_csv(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Variant variant_from_name(const std::string& name) {
  if (name == "plain") return Variant::Plain;
  if (name == "nus") return Variant::Nus;
  if (name == "mixed") return Variant::Mixed;
  if (name == "regularized") return Variant::Regularized;
  if (name == "prox") return Variant::Prox;
  if (name == "minibatch" || name == "uniform" || name == "lipschitz" ||
      name == "function" || name == "gradient")
    return Variant::MiniBatch;
  if (name == "fixedrandom") return Variant::FixedRandom;
  if (name == "sg") return Variant::Sg;
  if (name == "fg") return Variant::Fg;
  throw std::invalid_argument("unknown variant: " + name);
}

}  // namespace

void apply_config_line(ExperimentSpec& s, const std::string& key,
                       const std::string& value) {
  if (key == "dataset") s.dataset = value;
  else if (key == "synth_n") s.synth_n = std::stoull(value);
  else if (key == "synth_d") s.synth_d = std::stoi(value);
  else if (key == "synth_margin") s.synth_margin = std::stod(value);
  else if (key == "synth_seed") s.synth_seed = std::stoull(value);
  else if (key == "add_bias") s.add_bias = parse_bool(value);
  else if (key == "normalize") s.normalize = parse_bool(value);
  else if (key == "test_fraction") s.test_fraction = std::stod(value);
  else if (key == "split_seed") s.split_seed = std::stoull(value);
  else if (key == "loss") s.loss = value;
  else if (key == "epsilon") s.epsilon = std::stod(value);
  else if (key == "lambda") s.lambda = std::stod(value);
  else if (key == "variants") s.variants = split_csv(value);
  else if (key == "variant") {
    for (auto& v : split_csv(value)) s.variants.push_back(v);
  } else if (key == "seeds") {
    s.seeds.clear();
    for (auto& v : split_csv(value)) s.seeds.push_back(std::stoull(v));
  }
  else if (key == "eta") s.eta = std::stod(value);
  else if (key == "m") s.m = std::stoull(value);
  else if (key == "schedule") s.schedule = value;
  else if (key == "b0") s.b0 = std::stoull(value);
  else if (key == "gamma") s.gamma = std::stod(value);
  else if (key == "rho_tilde") s.rho_tilde = std::stod(value);
  else if (key == "s2") s.s2 = std::stod(value);
  else if (key == "s2_per_stage") s.s2_per_stage = parse_bool(value);
  else if (key == "stages") s.stages = std::stoull(value);
  else if (key == "sv") s.sv = value;
  else if (key == "snapshot") s.snapshot = value;
  else if (key == "minibatch" || key == "M") s.minibatch = std::stoull(value);
  else if (key == "fixed_size" || key == "Mf") s.fixed_size = std::stoull(value);
  else if (key == "sg_scale") s.sg_scale = std::stod(value);
  else if (key == "reg") s.reg = value;
  else if (key == "reg_lambda") s.reg_lambda = std::stod(value);
  else if (key == "reg_radius") s.reg_radius = std::stod(value);
  else if (key == "diagnostic") s.diagnostic = parse_bool(value);
  else if (key == "out") s.out = value;
  else if (key == "format") s.format = value;
  else if (key == "workers") s.workers = std::stoull(value);
  else throw std::invalid_argument("unknown config key: " + key);
}

ExperimentSpec parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  ExperimentSpec spec;
  spec.variants.clear();
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t\r");
      const auto e = v.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : v.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) apply_config_line(spec, key, value);
  }
  if (spec.variants.empty()) spec.variants = {"plain"};
  return spec;
}

ProblemSetup make_problem(const ExperimentSpec& spec) {
  SparseDataset raw = spec.dataset.empty()
                          ? generate_synthetic(spec.synth_n, spec.synth_d,
                                               spec.synth_margin, spec.synth_seed)
                          : load_libsvm_file(spec.dataset);
  SparseDataset full = preprocess(raw, spec.add_bias, spec.normalize);

  ProblemSetup setup;
  if (spec.test_fraction > 0.0) {
    auto [train, test] = split(full, spec.test_fraction, spec.split_seed);
    setup.train = std::move(train);
    setup.test = std::move(test);
  } else {
    setup.train = std::move(full);
  }

  const LossKind kind = spec.loss == "hsvm" ? LossKind::Hsvm : LossKind::Logistic;
  if (spec.loss != "hsvm" && spec.loss != "logistic")
    throw std::invalid_argument("unknown loss: " + spec.loss);
  setup.lambda = spec.lambda >= 0.0
                     ? spec.lambda
                     : 1.0 / static_cast<double>(setup.train.n());
  setup.folded = LossModel::make(kind, spec.epsilon, setup.lambda,
                                 LossMode::Folded, setup.train);
  setup.composite = LossModel::make(kind, spec.epsilon, setup.lambda,
                                    LossMode::Composite, setup.train);
  return setup;
}

SvrgConfig make_config(const ExperimentSpec& spec, const std::string& variant,
                       std::uint64_t seed, const ProblemSetup& setup) {
  SvrgConfig cfg;
  cfg.variant = variant_from_name(variant);
  cfg.eta = spec.eta;
  cfg.m = spec.m;
  cfg.stages = spec.stages;
  cfg.seed = seed;
  cfg.minibatch = spec.minibatch;
  cfg.fixed_size = spec.fixed_size;
  cfg.sg_scale = spec.sg_scale;
  cfg.diagnostic = spec.diagnostic;
  cfg.s2_restimate = spec.s2_per_stage;

  if (variant == "uniform") cfg.weights = SamplingWeights::Uniform;
  else if (variant == "function") cfg.weights = SamplingWeights::FunctionValue;
  else if (variant == "gradient") cfg.weights = SamplingWeights::GradNorm;
  else cfg.weights = SamplingWeights::Lipschitz;

  if (spec.schedule == "full") cfg.schedule.kind = BatchSchedule::Kind::Full;
  else if (spec.schedule == "grow") {
    cfg.schedule.kind = BatchSchedule::Kind::Doubling;
    cfg.schedule.b0 = spec.b0;
  } else if (spec.schedule == "var") {
    cfg.schedule.kind = BatchSchedule::Kind::VarianceBased;
    cfg.schedule.rho_tilde = spec.rho_tilde;
    std::vector<double> x0(static_cast<std::size_t>(setup.train.dim), 0.0);
    cfg.schedule.s2 =
        spec.s2 > 0.0 ? spec.s2 : estimate_S2(setup.folded, setup.train, x0);
    if (spec.gamma > 0.0) {
      cfg.schedule.gamma = spec.gamma;
    } else {
      // error budget defaults to the initial objective gap
      const std::vector<double> xstar =
          reference_solution(setup.folded, setup.train, {}, 1e-10, 50000);
      cfg.schedule.gamma = objective(setup.folded, setup.train, x0) -
                           objective(setup.folded, setup.train, xstar);
    }
  } else {
    throw std::invalid_argument("unknown schedule: " + spec.schedule);
  }

  if (spec.sv == "off") cfg.sv_skipping = SvSkipping::Off;
  else if (spec.sv == "exact") cfg.sv_skipping = SvSkipping::ExactListOnly;
  else if (spec.sv == "heuristic") cfg.sv_skipping = SvSkipping::Heuristic;
  else throw std::invalid_argument("unknown sv mode: " + spec.sv);

  if (spec.snapshot == "last") cfg.snapshot_option = SnapshotOption::LastIterate;
  else if (spec.snapshot == "random") cfg.snapshot_option = SnapshotOption::RandomIterate;
  else if (spec.snapshot == "average") cfg.snapshot_option = SnapshotOption::AverageIterate;
  else throw std::invalid_argument("unknown snapshot option: " + spec.snapshot);

  if (spec.reg == "none") cfg.reg.kind = RegularizerSpec::Kind::None;
  else if (spec.reg == "l1") cfg.reg.kind = RegularizerSpec::Kind::L1;
  else if (spec.reg == "l2") cfg.reg.kind = RegularizerSpec::Kind::L2;
  else if (spec.reg == "ball2") cfg.reg.kind = RegularizerSpec::Kind::Ball2;
  else throw std::invalid_argument("unknown regularizer: " + spec.reg);
  cfg.reg.lambda = spec.reg_lambda;
  cfg.reg.radius = spec.reg_radius;
  return cfg;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.variants.empty() || spec.seeds.empty())
    throw std::invalid_argument("need at least one variant and one seed");
  const ProblemSetup setup = make_problem(spec);

  struct Task {
    std::string variant;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& v : spec.variants)
    for (std::uint64_t s : spec.seeds) tasks.push_back({v, s});

  std::vector<RunResult> results(tasks.size());
  std::vector<SvrgConfig> configs;
  configs.reserve(tasks.size());
  for (const auto& t : tasks) configs.push_back(make_config(spec, t.variant, t.seed, setup));

  const SparseDataset* test = spec.test_fraction > 0.0 ? &setup.test : nullptr;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      const LossModel& model = configs[k].variant == Variant::Regularized ||
                                       configs[k].variant == Variant::Prox
                                   ? setup.composite
                                   : setup.folded;
      results[k] = run_optimizer(configs[k], model, setup.train, test);
    }
  };
  std::size_t nw = spec.workers > 0 ? spec.workers
                                    : std::max(1u, std::thread::hardware_concurrency());
  nw = std::min(nw, tasks.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w + 1 < nw; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  ExperimentResult out;
  out.runs_total = tasks.size();
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    if (results[k].status == RunStatus::Diverged) ++out.runs_diverged;
    for (auto rec : results[k].trace) {
      rec.variant = tasks[k].variant;  // keep e.g. "function" distinct
      out.traces.push_back(std::move(rec));
    }
  }

  // summary: min/mean/max across non-diverged seeds per (variant, stage)
  for (const auto& vname : spec.variants) {
    for (std::size_t s = 0; s < spec.stages; ++s) {
      StageSummary sum;
      sum.variant = vname;
      sum.stage = s;
      sum.obj_min = sum.err_min = std::numeric_limits<double>::infinity();
      sum.obj_max = sum.err_max = -std::numeric_limits<double>::infinity();
      double obj_total = 0.0, err_total = 0.0;
      for (const auto& rec : out.traces) {
        if (rec.variant != vname || rec.stage != s) continue;
        if (rec.status == RunStatus::Diverged) {
          ++sum.seeds_diverged;
          continue;
        }
        ++sum.seeds_ok;
        obj_total += rec.train_objective;
        err_total += rec.test_error;
        sum.obj_min = std::min(sum.obj_min, rec.train_objective);
        sum.obj_max = std::max(sum.obj_max, rec.train_objective);
        sum.err_min = std::min(sum.err_min, rec.test_error);
        sum.err_max = std::max(sum.err_max, rec.test_error);
      }
      if (sum.seeds_ok == 0 && sum.seeds_diverged == 0) continue;
      if (sum.seeds_ok > 0) {
        sum.obj_mean = obj_total / static_cast<double>(sum.seeds_ok);
        sum.err_mean = err_total / static_cast<double>(sum.seeds_ok);
      }
      out.summary.push_back(std::move(sum));
    }
  }
  return out;
}

void emit_csv(const std::vector<TraceRecord>& traces, std::ostream& os) {
  if (traces.empty()) throw std::invalid_argument("emit_csv: no trace records");
  os << "variant,seed,stage,grad_evals,effective_passes,train_objective,"
        "test_error,batch_size,error_norm,wall_time_ms,status\n";
  for (const auto& r : traces) {
    os << r.variant << ',' << r.seed << ',' << r.stage << ',' << r.grad_evals
       << ',' << fmt_double(r.effective_passes) << ','
       << fmt_double(r.train_objective) << ',' << fmt_double(r.test_error)
       << ',' << r.batch_size << ',';
    if (r.error_norm) os << fmt_double(*r.error_norm);
    os << ',';  // wall_time_ms stays empty so output bytes are reproducible
    os << ',' << to_string(r.status) << '\n';
  }
}

std::string to_csv(const std::vector<TraceRecord>& traces) {
  std::ostringstream os;
  emit_csv(traces, os);
  return os.str();
}

void write_csv_file(const std::vector<TraceRecord>& traces,
                    const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write: " + path);
  emit_csv(traces, os);
}

namespace {

json spec_to_json(const ExperimentSpec& s) {
  return json{{"dataset", s.dataset},
              {"synth_n", s.synth_n},
              {"synth_d", s.synth_d},
              {"synth_margin", s.synth_margin},
              {"synth_seed", s.synth_seed},
              {"add_bias", s.add_bias},
              {"normalize", s.normalize},
              {"test_fraction", s.test_fraction},
              {"split_seed", s.split_seed},
              {"loss", s.loss},
              {"epsilon", s.epsilon},
              {"lambda", s.lambda},
              {"variants", s.variants},
              {"seeds", s.seeds},
              {"eta", s.eta},
              {"m", s.m},
              {"schedule", s.schedule},
              {"b0", s.b0},
              {"gamma", s.gamma},
              {"rho_tilde", s.rho_tilde},
              {"s2", s.s2},
              {"s2_per_stage", s.s2_per_stage},
              {"stages", s.stages},
              {"sv", s.sv},
              {"snapshot", s.snapshot},
              {"minibatch", s.minibatch},
              {"fixed_size", s.fixed_size},
              {"sg_scale", s.sg_scale},
              {"reg", s.reg},
              {"reg_lambda", s.reg_lambda},
              {"reg_radius", s.reg_radius},
              {"diagnostic", s.diagnostic}};
}

RunStatus status_from_string(const std::string& s) {
  if (s == "ok") return RunStatus::Ok;
  if (s == "diverged") return RunStatus::Diverged;
  if (s == "premise_violated") return RunStatus::PremiseViolated;
  throw std::invalid_argument("unknown status: " + s);
}

}  // namespace

std::string to_json(const std::vector<TraceRecord>& traces,
                    const ExperimentSpec& spec) {
  if (traces.empty()) throw std::invalid_argument("to_json: no trace records");
  json records = json::array();
  for (const auto& r : traces) {
    json rec{{"variant", r.variant},
             {"seed", r.seed},
             {"stage", r.stage},
             {"grad_evals", r.grad_evals},
             {"effective_passes", r.effective_passes},
             {"train_objective", r.train_objective},
             {"test_error", r.test_error},
             {"batch_size", r.batch_size},
             {"wall_time_ms", r.wall_time_ms},
             {"status", to_string(r.status)}};
    rec["error_norm"] = r.error_norm ? json(*r.error_norm) : json(nullptr);
    records.push_back(std::move(rec));
  }
  json doc{{"spec", spec_to_json(spec)}, {"records", std::move(records)}};
  return doc.dump(2);
}

void write_json_file(const std::vector<TraceRecord>& traces,
                     const ExperimentSpec& spec, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write: " + path);
  os << to_json(traces, spec) << '\n';
}

std::vector<TraceRecord> records_from_json(const std::string& text) {
  const json doc = json::parse(text);
  std::vector<TraceRecord> out;
  for (const auto& rec : doc.at("records")) {
    TraceRecord r;
    r.variant = rec.at("variant").get<std::string>();
    r.seed = rec.at("seed").get<std::uint64_t>();
    r.stage = rec.at("stage").get<std::size_t>();
    r.grad_evals = rec.at("grad_evals").get<long long>();
    r.effective_passes = rec.at("effective_passes").get<double>();
    r.train_objective = rec.at("train_objective").get<double>();
    r.test_error = rec.at("test_error").get<double>();
    r.batch_size = rec.at("batch_size").get<std::size_t>();
    r.wall_time_ms = rec.at("wall_time_ms").get<double>();
    if (!rec.at("error_norm").is_null())
      r.error_norm = rec.at("error_norm").get<double>();
    r.status = status_from_string(rec.at("status").get<std::string>());
    out.push_back(std::move(r));
  }
  return out;
}

std::string rates_report(const ExperimentSpec& spec) {
  const ProblemSetup setup = make_problem(spec);
  const std::size_t n = setup.train.n();
  const LossModel& model = setup.folded;

  RateParams p;
  p.L = model.lip_max;
  p.Lbar = model.lip_mean;
  p.mu = setup.lambda;
  p.eta = spec.eta > 0.0 ? spec.eta : 1.0 / p.L;
  p.m = spec.m > 0 ? spec.m : n;

  std::ostringstream os;
  os.precision(6);
  os << "problem: n=" << n << " d=" << setup.train.dim << " loss=" << spec.loss
     << " lambda=" << setup.lambda << "\n";
  os << "constants: L=" << p.L << " Lbar=" << p.Lbar << " mu=" << p.mu
     << " eta=" << p.eta << " m=" << p.m << "\n\n";

  auto line = [&](const std::string& name, const RateResult& r) {
    os << name << ": ";
    if (r.ok) os << r.value;
    else os << "premise violated (" << r.reason << ")";
    os << "\n";
  };
  line("rho(L)        [plain SVRG]", rho_plain(p));
  line("rho(Lbar)     [NUS]", rho(p.Lbar, p.Lbar, p.eta, p.m, p.mu));

  SvrgConfig cfg = make_config(spec, "plain", spec.seeds.empty() ? 1 : spec.seeds[0], setup);
  const std::size_t b0 = next_batch_size(cfg.schedule, 0, n);
  p.alpha = static_cast<double>(b0) / static_cast<double>(n);
  line("rho(L,aL)     [mixed, stage-0 alpha]", rho_mixed(p));
  line("rho_M         [mini-batch M=" + std::to_string(spec.minibatch) + "]",
       rho_minibatch(spec.minibatch, p));

  if (spec.fixed_size > 0 && spec.fixed_size < spec.minibatch &&
      spec.fixed_size + 1 <= n) {
    std::vector<double> lips = model.lip;
    std::sort(lips.begin(), lips.end(), std::greater<>());
    const double L1 = lips[0];
    double rest = 0.0;
    for (std::size_t i = spec.fixed_size; i < lips.size(); ++i) rest += lips[i];
    p.Lbar_r = rest / static_cast<double>(n - spec.fixed_size);
    const auto fr = rho_fixed_random(n, spec.minibatch, spec.fixed_size, L1, p);
    os << "fixed+random  [M=" << spec.minibatch << " Mf=" << spec.fixed_size
       << "]: zeta=" << fr.zeta << " kappa=" << fr.kappa << " ";
    if (fr.rate.ok) os << "rate=" << fr.rate.value;
    else os << "premise violated (" << fr.rate.reason << ")";
    os << (fr.advantage ? " [advantage predicate holds]" : "") << "\n";
  }
  line("rho_prox      [prox SVRG]", rho_prox(p));

  os << "\nschedule preview (" << spec.schedule << "):";
  for (std::size_t s = 0; s < 12 && s < spec.stages; ++s)
    os << ' ' << next_batch_size(cfg.schedule, s, n);
  os << " ...\n";
  if (cfg.schedule.kind == BatchSchedule::Kind::VarianceBased) {
    os << "inflection stage (|B| = n/2): "
       << inflection_stage(cfg.schedule.s2, cfg.schedule.gamma, n,
                           cfg.schedule.rho_tilde)
       << "\n";
  }
  return os.str();
}

}  // namespace svrg
