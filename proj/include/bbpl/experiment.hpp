#ifndef BBPL_EXPERIMENT_HPP
#define BBPL_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bbpl/learning.hpp"
#include "bbpl/partition.hpp"
#include "bbpl/synth.hpp"

namespace bbpl {

/// "grid:RxC" or "ba:N:M".
struct GraphSpec {
  enum class Kind { grid, ba } kind = Kind::grid;
  std::size_t rows = 0, cols = 0;  // grid
  std::size_t n = 0, m = 0;        // ba
};

/// "grid:RxC" (tiles of a grid graph) or "index:D".
struct BlockSpec {
  enum class Kind { grid, index } kind = Kind::index;
  std::size_t rows = 0, cols = 0;
  std::size_t count = 1;
};

/// Both throw UsageError naming the offending token.
GraphSpec parse_graph_spec(const std::string& text);
BlockSpec parse_block_spec(const std::string& text);

enum class Method { full, bbpl, inner_dual };
Method parse_method(const std::string& text);
std::string method_name(Method m);

struct ExperimentConfig {
  std::string graph = "grid:3x3";
  std::size_t k = 2;
  double param_scale = 1.0;
  std::uint64_t graph_seed = 1;   // BA topology and true parameters

  std::size_t n_samples = 20;
  GibbsConfig gibbs;
  std::uint64_t sample_seed = 2;

  Method method = Method::bbpl;
  std::string blocks = "grid:2x2";
  std::string counting = "uniform-convex";
  LearnConfig learn;
  std::string output_dir = "out";

  /// Throws UsageError on any invalid field.
  void validate() const;
  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys are rejected.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
};

GraphTopology build_graph(const ExperimentConfig& cfg);
BlockPartition build_partition(const std::string& block_spec, const std::string& graph_spec,
                               const GraphTopology& graph);

struct TrainOutcome {
  LearningTrace trace;
  std::string trace_path;
  std::string model_path;
};

/// Writes model_true.json, data.txt and manifest.json into output_dir.
void run_generate(const ExperimentConfig& cfg);

/// Trains on the generated assets and writes trace_<method>.csv and
/// model_<method>.json into output_dir.
TrainOutcome run_train(const ExperimentConfig& cfg);

/// Reads trace CSVs and writes one work-report row per trace.
/// Throws UsageError on an empty list or a schema mismatch.
void run_compare(const std::vector<std::string>& trace_paths, std::ostream& os);

/// Block-count sensitivity: BBPL for each D with iterations to tolerance.
void run_block_sweep(const ExperimentConfig& cfg, const std::vector<std::size_t>& counts,
                     std::ostream& os);

/// Model and partition invariant violations; empty when everything holds.
std::vector<std::string> run_validate(const ExperimentConfig& cfg);
std::vector<std::string> validate_model_file(const std::string& path);

}  // namespace bbpl

#endif  // BBPL_EXPERIMENT_HPP
