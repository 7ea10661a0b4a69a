#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "svrg/analysis.hpp"
#include "svrg/optimizer.hpp"

namespace svrg {

struct ExperimentSpec {
  // dataset source: path wins when nonempty, otherwise synthetic
  std::string dataset;
  std::size_t synth_n = 1000;
  int synth_d = 20;
  double synth_margin = 0.0;
  std::uint64_t synth_seed = 42;
  bool add_bias = true;
  bool normalize = true;
  double test_fraction = 0.2;  // <= 0 disables the split
  std::uint64_t split_seed = 1;

  std::string loss = "logistic";  // logistic | hsvm
  double epsilon = 0.5;
  double lambda = -1.0;  // < 0 picks 1/n

  std::vector<std::string> variants = {"plain"};
  std::vector<std::uint64_t> seeds = {1};

  double eta = 0.0;  // <= 0 picks 1/L
  std::size_t m = 0;
  std::string schedule = "full";  // full | grow | var
  std::size_t b0 = 1;
  double gamma = -1.0;      // < 0: estimated as f(x0) - f* at desk scale
  double rho_tilde = 0.9;
  double s2 = -1.0;         // < 0: estimated at x0
  bool s2_per_stage = false;
  std::size_t stages = 30;
  std::string sv = "off";  // off | exact | heuristic
  std::string snapshot = "last";  // last | random | average
  std::size_t minibatch = 16;
  std::size_t fixed_size = 0;
  double sg_scale = -1.0;
  std::string reg = "none";  // none | l1 | l2 | ball2
  double reg_lambda = 0.0;
  double reg_radius = 1.0;
  bool diagnostic = false;

  std::string out;             // output path stem; empty -> stdout (csv)
  std::string format = "csv";  // csv | json
  std::size_t workers = 0;     // 0 -> hardware concurrency
};

ExperimentSpec parse_config_file(const std::string& path);
void apply_config_line(ExperimentSpec& spec, const std::string& key,
                       const std::string& value);

struct StageSummary {
  std::string variant;
  std::size_t stage = 0;
  double obj_min = 0.0, obj_mean = 0.0, obj_max = 0.0;
  double err_min = 0.0, err_mean = 0.0, err_max = 0.0;
  std::size_t seeds_ok = 0;
  std::size_t seeds_diverged = 0;
};

struct ExperimentResult {
  std::vector<TraceRecord> traces;  // sorted by (variant, seed, stage)
  std::vector<StageSummary> summary;
  std::size_t runs_total = 0;
  std::size_t runs_diverged = 0;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

// Header: variant,seed,stage,grad_evals,effective_passes,train_objective,
// test_error,batch_size,error_norm,wall_time_ms,status. Floats carry 17
// significant digits. wall_time_ms is left empty in CSV so repeated runs of
// the same spec are byte-identical (wall time lives in the JSON output);
// error_norm is empty unless diagnostic mode filled it.
void emit_csv(const std::vector<TraceRecord>& traces, std::ostream& out);
std::string to_csv(const std::vector<TraceRecord>& traces);
void write_csv_file(const std::vector<TraceRecord>& traces, const std::string& path);

std::string to_json(const std::vector<TraceRecord>& traces,
                    const ExperimentSpec& spec);
void write_json_file(const std::vector<TraceRecord>& traces,
                     const ExperimentSpec& spec, const std::string& path);
std::vector<TraceRecord> records_from_json(const std::string& text);

// Theory report: rho variants with premise annotations plus a schedule
// preview and its inflection stage.
std::string rates_report(const ExperimentSpec& spec);

// Builds dataset + models the same way run_experiment does; exposed for the
// CLI `gen`/`rates` paths and for tests.
struct ProblemSetup {
  SparseDataset train;
  SparseDataset test;
  LossModel folded;
  LossModel composite;
  double lambda = 0.0;
};
ProblemSetup make_problem(const ExperimentSpec& spec);

SvrgConfig make_config(const ExperimentSpec& spec, const std::string& variant,
                       std::uint64_t seed, const ProblemSetup& setup);

}  // namespace svrg
