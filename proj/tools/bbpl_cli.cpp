// bbpl: generate synthetic MRF data, train with full BP / BBPL / inner-dual,
// compare traces and validate assets.
//
// Exit status: 0 success, 2 usage or config error, 3 non-convergence, 4 I/O.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bbpl/errors.hpp"
#include "bbpl/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kNoConvergence = 3;
constexpr int kIo = 4;

struct Overrides {
  std::string config;
  std::string out;
  std::string method;
  std::string blocks;
};

bbpl::ExperimentConfig resolve(const Overrides& o) {
  bbpl::ExperimentConfig cfg;
  if (!o.config.empty()) cfg = bbpl::ExperimentConfig::load(o.config);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.method.empty()) cfg.method = bbpl::parse_method(o.method);
  if (!o.blocks.empty()) cfg.blocks = o.blocks;
  cfg.validate();
  return cfg;
}

int report(const std::vector<std::string>& problems) {
  for (const auto& p : problems) std::cout << "violation: " << p << '\n';
  if (problems.empty()) std::cout << "ok\n";
  return problems.empty() ? kOk : kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block belief propagation learning for pairwise MRFs"};
  app.require_subcommand(0, 1);
  bool dump_defaults = false;
  app.add_flag("--dump-defaults", dump_defaults, "Print the default experiment config as JSON");

  Overrides gen_opts;
  auto* gen = app.add_subcommand("generate", "Generate a graph, true parameters and Gibbs samples");
  gen->add_option("-c,--config", gen_opts.config, "Experiment config (JSON)");
  gen->add_option("-o,--out", gen_opts.out, "Output directory (overrides the config)");

  Overrides train_opts;
  auto* train = app.add_subcommand("train", "Train on generated assets; writes trace CSV and model");
  train->add_option("-c,--config", train_opts.config, "Experiment config (JSON)");
  train->add_option("-o,--out", train_opts.out, "Asset and output directory (overrides the config)");
  train->add_option("-m,--method", train_opts.method, "full | bbpl | inner-dual");
  train->add_option("-b,--blocks", train_opts.blocks, "Partition: grid:RxC or index:D");

  Overrides cmp_opts;
  std::vector<std::string> traces;
  std::vector<std::size_t> sweep;
  std::string cmp_output;
  auto* cmp = app.add_subcommand("compare", "Work report over trace CSVs, or a block-count sweep");
  cmp->add_option("traces", traces, "Trace CSV files");
  cmp->add_option("--sweep", sweep, "Block counts D to sweep (runs BBPL per D)")->delimiter(',');
  cmp->add_option("-c,--config", cmp_opts.config, "Experiment config for --sweep");
  cmp->add_option("-o,--out", cmp_opts.out, "Asset directory for --sweep");
  cmp->add_option("--output", cmp_output, "Write the report here instead of stdout");

  Overrides val_opts;
  std::string model_path;
  auto* val = app.add_subcommand("validate", "Check model and partition invariants");
  val->add_option("-c,--config", val_opts.config, "Experiment config (JSON)");
  val->add_option("-o,--out", val_opts.out, "Asset directory (overrides the config)");
  val->add_option("-b,--blocks", val_opts.blocks, "Partition: grid:RxC or index:D");
  val->add_option("--model", model_path, "Validate a single model file instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (dump_defaults) {
      std::cout << bbpl::ExperimentConfig{}.to_json().dump(2) << '\n';
      return kOk;
    }
    if (*gen) {
      const auto cfg = resolve(gen_opts);
      bbpl::run_generate(cfg);
      std::cout << "wrote " << cfg.output_dir << "/{model_true.json,data.txt,manifest.json}\n";
      return kOk;
    }
    if (*train) {
      const auto cfg = resolve(train_opts);
      const auto out = bbpl::run_train(cfg);
      const auto& last = out.trace.iterations.back();
      std::cout << bbpl::method_name(cfg.method) << ": " << out.trace.iterations.size()
                << " iterations, |g|_inf = " << last.grad_inf_norm
                << ", msg_updates = " << last.msg_updates_cum << '\n'
                << "wrote " << out.trace_path << " and " << out.model_path << '\n';
      if (!out.trace.converged) {
        std::cerr << "did not reach grad_tol within max_outer_iters\n";
        return kNoConvergence;
      }
      return kOk;
    }
    if (*cmp) {
      std::ofstream file;
      if (!cmp_output.empty()) {
        file.open(cmp_output);
        if (!file) throw bbpl::IoError("cannot write " + cmp_output);
      }
      std::ostream& os = cmp_output.empty() ? std::cout : file;
      if (!sweep.empty()) {
        if (!traces.empty()) throw bbpl::UsageError("--sweep does not take trace files");
        bbpl::run_block_sweep(resolve(cmp_opts), sweep, os);
      } else {
        bbpl::run_compare(traces, os);
      }
      return kOk;
    }
    if (*val) {
      if (!model_path.empty()) return report(bbpl::validate_model_file(model_path));
      return report(bbpl::run_validate(resolve(val_opts)));
    }
    std::cout << app.help();
    return kUsage;
  } catch (const bbpl::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const bbpl::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
