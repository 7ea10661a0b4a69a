#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svrg/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitAllDiverged = 3;

struct Flags {
  std::string config;
  std::string dataset;
  std::string loss;
  double epsilon = -1.0;
  double lambda = -2.0;
  std::vector<std::string> variants;
  std::string schedule;
  double eta = -1.0;
  long long m = -1;
  long long stages = -1;
  std::string seeds;
  std::string sv;
  bool diagnostic = false;
  std::string out;
  std::string format;
  // gen/split-specific
  long long n = -1;
  int d = -1;
  double margin = -1e300;
  long long seed = -1;
  double fraction = -1.0;
};

void add_shared_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "key=value spec file; flags override it");
  cmd->add_option("--dataset", f.dataset, "libsvm dataset path");
  cmd->add_option("--loss", f.loss)->check(CLI::IsMember({"logistic", "hsvm"}));
  cmd->add_option("--epsilon", f.epsilon, "smoothing width for hsvm");
  cmd->add_option("--lambda", f.lambda, "l2 strength; default 1/n");
  cmd->add_option("--variant", f.variants, "optimizer variant (repeatable)");
  cmd->add_option("--schedule", f.schedule)->check(CLI::IsMember({"full", "grow", "var"}));
  cmd->add_option("--eta", f.eta, "step size; default 1/L");
  cmd->add_option("--m", f.m, "inner steps per stage; default |B^s|");
  cmd->add_option("--stages", f.stages);
  cmd->add_option("--seeds", f.seeds, "comma-separated seed list");
  cmd->add_option("--sv", f.sv)->check(CLI::IsMember({"off", "exact", "heuristic"}));
  cmd->add_flag("--diagnostic", f.diagnostic, "measure the batch gradient error norm");
  cmd->add_option("--out", f.out, "output path; default stdout");
  cmd->add_option("--format", f.format)->check(CLI::IsMember({"csv", "json"}));
}

svrg::ExperimentSpec build_spec(const Flags& f) {
  svrg::ExperimentSpec spec;
  if (!f.config.empty()) spec = svrg::parse_config_file(f.config);
  if (!f.dataset.empty()) spec.dataset = f.dataset;
  if (!f.loss.empty()) spec.loss = f.loss;
  if (f.epsilon >= 0.0) spec.epsilon = f.epsilon;
  if (f.lambda > -2.0) spec.lambda = f.lambda;
  if (!f.variants.empty()) spec.variants = f.variants;
  if (!f.schedule.empty()) spec.schedule = f.schedule;
  if (f.eta >= 0.0) spec.eta = f.eta;
  if (f.m >= 0) spec.m = static_cast<std::size_t>(f.m);
  if (f.stages >= 0) spec.stages = static_cast<std::size_t>(f.stages);
  if (!f.seeds.empty()) svrg::apply_config_line(spec, "seeds", f.seeds);
  if (!f.sv.empty()) spec.sv = f.sv;
  if (f.diagnostic) spec.diagnostic = true;
  if (!f.out.empty()) spec.out = f.out;
  if (!f.format.empty()) spec.format = f.format;
  if (f.n >= 0) spec.synth_n = static_cast<std::size_t>(f.n);
  if (f.d >= 0) spec.synth_d = f.d;
  if (f.margin > -1e299) spec.synth_margin = f.margin;
  if (f.seed >= 0) spec.synth_seed = static_cast<std::uint64_t>(f.seed);
  if (f.fraction >= 0.0) spec.test_fraction = f.fraction;
  return spec;
}

int cmd_gen(const Flags& f) {
  const auto spec = build_spec(f);
  if (spec.out.empty()) {
    std::cerr << "gen: --out is required\n";
    return kExitUsage;
  }
  const auto data = svrg::generate_synthetic(spec.synth_n, spec.synth_d,
                                             spec.synth_margin, spec.synth_seed);
  svrg::save_libsvm_file(data, spec.out);
  std::cout << "wrote " << data.n() << " examples, dim " << data.dim << " to "
            << spec.out << "\n";
  return kExitOk;
}

int cmd_split(const Flags& f) {
  const auto spec = build_spec(f);
  if (spec.dataset.empty() || spec.out.empty()) {
    std::cerr << "split: --dataset and --out are required\n";
    return kExitUsage;
  }
  const auto data = svrg::load_libsvm_file(spec.dataset);
  const auto [train, test] = svrg::split(data, spec.test_fraction, spec.split_seed);
  svrg::save_libsvm_file(train, spec.out + ".train");
  svrg::save_libsvm_file(test, spec.out + ".test");
  std::cout << "wrote " << train.n() << " train / " << test.n() << " test to "
            << spec.out << ".{train,test}\n";
  return kExitOk;
}

int cmd_rates(const Flags& f) {
  const auto spec = build_spec(f);
  std::cout << svrg::rates_report(spec);
  return kExitOk;
}

int cmd_run(const Flags& f) {
  const auto spec = build_spec(f);
  const auto result = svrg::run_experiment(spec);
  if (spec.format == "json") {
    if (spec.out.empty()) std::cout << svrg::to_json(result.traces, spec) << "\n";
    else svrg::write_json_file(result.traces, spec, spec.out);
  } else {
    if (spec.out.empty()) svrg::emit_csv(result.traces, std::cout);
    else svrg::write_csv_file(result.traces, spec.out);
  }
  if (result.runs_diverged == result.runs_total) return kExitAllDiverged;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variance-reduced stochastic optimization toolkit"};
  app.require_subcommand(1);

  Flags f;
  auto* gen = app.add_subcommand("gen", "write a synthetic libsvm dataset");
  gen->add_option("--n", f.n, "number of examples");
  gen->add_option("--d", f.d, "feature dimension");
  gen->add_option("--margin", f.margin, "separation margin (0 = none)");
  gen->add_option("--seed", f.seed);
  gen->add_option("--out", f.out)->required();

  auto* run = app.add_subcommand("run", "run an experiment, emit CSV/JSON traces");
  add_shared_flags(run, f);

  auto* rates = app.add_subcommand("rates", "print theoretical rates for a spec");
  add_shared_flags(rates, f);

  auto* spl = app.add_subcommand("split", "split a dataset into train/test files");
  spl->add_option("--dataset", f.dataset)->required();
  spl->add_option("--fraction", f.fraction, "test fraction in (0,1)");
  spl->add_option("--seed", f.seed);
  spl->add_option("--out", f.out, "output stem; writes stem.train and stem.test")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(f);
    if (run->parsed()) return cmd_run(f);
    if (rates->parsed()) return cmd_rates(f);
    return cmd_split(f);
  } catch (const svrg::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
