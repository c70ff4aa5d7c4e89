#include "bbpl/experiment.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <fstream>
#include <set>
#include <sstream>

#include "bbpl/errors.hpp"
#include "bbpl/eval.hpp"
#include "bbpl/model_io.hpp"

namespace bbpl {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

std::size_t parse_count(const std::string& token, const std::string& whole, const char* what) {
  std::size_t value = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc() || ptr != end) {
    throw UsageError(std::string("invalid ") + what + " '" + whole + "': bad token '" + token + "'");
  }
  return value;
}

std::pair<std::size_t, std::size_t> parse_dims(const std::string& token, const std::string& whole,
                                               const char* what) {
  const auto parts = split(token, 'x');
  if (parts.size() != 2) {
    throw UsageError(std::string("invalid ") + what + " '" + whole + "': bad token '" + token +
                     "' (expected RxC)");
  }
  return {parse_count(parts[0], whole, what), parse_count(parts[1], whole, what)};
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw UsageError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw UsageError("unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError("config key '" + where + key + "' has the wrong type");
  }
}

std::string trace_header() {
  return "t,method,objective,grad_inf_norm,msg_updates_cum,wall_ms,dist_to_opt,block_id,"
         "contraction_ratio";
}

fs::path out_dir(const ExperimentConfig& cfg) { return fs::path(cfg.output_dir); }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

struct Assets {
  ModelFile truth;
  MrfDataset data;
};

Assets load_assets(const ExperimentConfig& cfg) {
  Assets a;
  a.truth = load_model((out_dir(cfg) / "model_true.json").string());
  a.data = load_dataset((out_dir(cfg) / "data.txt").string(), &a.truth.graph);
  if (a.data.samples.empty()) throw UsageError("dataset has no records");
  return a;
}

LearningTrace train_method(Method method, const GraphTopology& graph, std::span<const double> w_bar,
                           const CountingNumbers& rho, const BlockPartition& partition,
                           const LearnConfig& learn) {
  switch (method) {
    case Method::full: return train_full_bp(graph, w_bar, rho, learn);
    case Method::bbpl: return train_bbpl(graph, w_bar, rho, partition, learn);
    case Method::inner_dual: return train_inner_dual(graph, w_bar, rho, learn);
  }
  throw std::logic_error("unknown method");
}

}  // namespace

GraphSpec parse_graph_spec(const std::string& text) {
  const auto parts = split(text, ':');
  GraphSpec spec;
  if (parts.size() == 2 && parts[0] == "grid") {
    spec.kind = GraphSpec::Kind::grid;
    std::tie(spec.rows, spec.cols) = parse_dims(parts[1], text, "graph spec");
    if (spec.rows < 1 || spec.cols < 1) throw UsageError("invalid graph spec '" + text + "': empty grid");
    return spec;
  }
  if (parts.size() == 3 && parts[0] == "ba") {
    spec.kind = GraphSpec::Kind::ba;
    spec.n = parse_count(parts[1], text, "graph spec");
    spec.m = parse_count(parts[2], text, "graph spec");
    if (spec.m < 1 || spec.n <= spec.m) {
      throw UsageError("invalid graph spec '" + text + "': need n > m >= 1");
    }
    return spec;
  }
  throw UsageError("invalid graph spec '" + text + "': bad token '" +
                   (parts.empty() ? text : parts[0]) + "' (expected grid:RxC or ba:N:M)");
}

BlockSpec parse_block_spec(const std::string& text) {
  const auto parts = split(text, ':');
  BlockSpec spec;
  if (parts.size() == 2 && parts[0] == "grid") {
    spec.kind = BlockSpec::Kind::grid;
    std::tie(spec.rows, spec.cols) = parse_dims(parts[1], text, "block spec");
    if (spec.rows < 1 || spec.cols < 1) throw UsageError("invalid block spec '" + text + "': zero tiles");
    spec.count = spec.rows * spec.cols;
    return spec;
  }
  if (parts.size() == 2 && parts[0] == "index") {
    spec.kind = BlockSpec::Kind::index;
    spec.count = parse_count(parts[1], text, "block spec");
    if (spec.count < 1) throw UsageError("invalid block spec '" + text + "': zero blocks");
    return spec;
  }
  throw UsageError("invalid block spec '" + text + "': bad token '" +
                   (parts.empty() ? text : parts[0]) + "' (expected grid:RxC or index:D)");
}

Method parse_method(const std::string& text) {
  if (text == "full") return Method::full;
  if (text == "bbpl") return Method::bbpl;
  if (text == "inner-dual") return Method::inner_dual;
  throw UsageError("unknown method '" + text + "' (expected full, bbpl or inner-dual)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::full: return "full";
    case Method::bbpl: return "bbpl";
    case Method::inner_dual: return "inner-dual";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  const GraphSpec gs = parse_graph_spec(graph);
  parse_block_spec(blocks);
  if (k < 2) throw UsageError("k must be at least 2");
  if (!(param_scale > 0.0)) throw UsageError("param_scale must be positive");
  if (n_samples < 1) throw UsageError("n_samples must be at least 1");
  if (gibbs.thin < 1) throw UsageError("thin must be at least 1");
  if (counting != "uniform-convex" && counting != "bethe") {
    throw UsageError("unknown counting numbers '" + counting + "'");
  }
  if (gs.kind == GraphSpec::Kind::ba && parse_block_spec(blocks).kind == BlockSpec::Kind::grid) {
    throw UsageError("block spec '" + blocks + "' needs a grid graph");
  }
  try {
    learn.validate();
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
  if (output_dir.empty()) throw UsageError("output_dir must not be empty");
}

json ExperimentConfig::to_json() const {
  return json{
      {"generator", {{"graph", graph}, {"k", k}, {"param_scale", param_scale}, {"seed", graph_seed}}},
      {"sampling",
       {{"n_samples", n_samples},
        {"burn_in", gibbs.burn_in},
        {"thin", gibbs.thin},
        {"seed", sample_seed}}},
      {"method", method_name(method)},
      {"blocks", blocks},
      {"counting", counting},
      {"learn",
       {{"step_rule", learn.step.rule == StepRule::constant ? "constant" : "inv_sqrt"},
        {"alpha", learn.step.alpha},
        {"max_outer_iters", learn.max_outer_iters},
        {"grad_tol", learn.grad_tol},
        {"block_order", learn.blocks.order == BlockOrder::sequential ? "sequential" : "random"},
        {"block_seed", learn.blocks.seed},
        {"backtracking", learn.backtracking}}},
      {"bp",
       {{"tol_msg", learn.bp.tol_msg},
        {"max_iters", learn.bp.max_iters},
        {"damping", learn.bp.damping}}},
      {"output_dir", output_dir}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  reject_unknown(j, {"generator", "sampling", "method", "blocks", "counting", "learn", "bp", "output_dir"}, "");
  if (j.contains("generator")) {
    const auto& g = j["generator"];
    reject_unknown(g, {"graph", "k", "param_scale", "seed"}, "generator.");
    read(g, "graph", c.graph, "generator.");
    read(g, "k", c.k, "generator.");
    read(g, "param_scale", c.param_scale, "generator.");
    read(g, "seed", c.graph_seed, "generator.");
  }
  if (j.contains("sampling")) {
    const auto& s = j["sampling"];
    reject_unknown(s, {"n_samples", "burn_in", "thin", "seed"}, "sampling.");
    read(s, "n_samples", c.n_samples, "sampling.");
    read(s, "burn_in", c.gibbs.burn_in, "sampling.");
    read(s, "thin", c.gibbs.thin, "sampling.");
    read(s, "seed", c.sample_seed, "sampling.");
  }
  std::string method = method_name(c.method);
  read(j, "method", method, "");
  c.method = parse_method(method);
  read(j, "blocks", c.blocks, "");
  read(j, "counting", c.counting, "");
  read(j, "output_dir", c.output_dir, "");
  if (j.contains("learn")) {
    const auto& l = j["learn"];
    reject_unknown(l, {"step_rule", "alpha", "max_outer_iters", "grad_tol", "block_order", "block_seed",
                       "backtracking"},
                   "learn.");
    std::string rule = "constant";
    read(l, "step_rule", rule, "learn.");
    if (rule == "constant") {
      c.learn.step.rule = StepRule::constant;
    } else if (rule == "inv_sqrt") {
      c.learn.step.rule = StepRule::inv_sqrt;
    } else {
      throw UsageError("unknown step_rule '" + rule + "'");
    }
    read(l, "alpha", c.learn.step.alpha, "learn.");
    read(l, "max_outer_iters", c.learn.max_outer_iters, "learn.");
    read(l, "grad_tol", c.learn.grad_tol, "learn.");
    std::string order = "sequential";
    read(l, "block_order", order, "learn.");
    if (order == "sequential") {
      c.learn.blocks.order = BlockOrder::sequential;
    } else if (order == "random") {
      c.learn.blocks.order = BlockOrder::random;
    } else {
      throw UsageError("unknown block_order '" + order + "'");
    }
    read(l, "block_seed", c.learn.blocks.seed, "learn.");
    read(l, "backtracking", c.learn.backtracking, "learn.");
  }
  if (j.contains("bp")) {
    const auto& b = j["bp"];
    reject_unknown(b, {"tol_msg", "max_iters", "damping"}, "bp.");
    read(b, "tol_msg", c.learn.bp.tol_msg, "bp.");
    read(b, "max_iters", c.learn.bp.max_iters, "bp.");
    read(b, "damping", c.learn.bp.damping, "bp.");
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& ex) {
    throw UsageError(path + ": " + ex.what());
  }
  return from_json(j);
}

GraphTopology build_graph(const ExperimentConfig& cfg) {
  const GraphSpec spec = parse_graph_spec(cfg.graph);
  if (spec.kind == GraphSpec::Kind::grid) return gen_grid(spec.rows, spec.cols, cfg.k);
  return gen_ba(spec.n, spec.m, cfg.graph_seed, cfg.k);
}

BlockPartition build_partition(const std::string& block_spec, const std::string& graph_spec,
                               const GraphTopology& graph) {
  const BlockSpec bs = parse_block_spec(block_spec);
  try {
    if (bs.kind == BlockSpec::Kind::index) return index_partition(graph, bs.count);
    const GraphSpec gs = parse_graph_spec(graph_spec);
    if (gs.kind != GraphSpec::Kind::grid) throw UsageError("block spec '" + block_spec + "' needs a grid graph");
    return grid_partition(graph, gs.rows, gs.cols, bs.rows, bs.cols);
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& ex) {
    throw UsageError("block spec '" + block_spec + "': " + ex.what());
  }
}

void run_generate(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path dir = out_dir(cfg);
  ensure_dir(dir);
  const GraphTopology graph = build_graph(cfg);
  const std::uint64_t param_seed = cfg.graph_seed + 1;
  ModelFile truth;
  truth.graph = graph;
  truth.potentials = gen_true_params(graph, cfg.param_scale, param_seed);
  truth.config = cfg.to_json();
  const MrfDataset data = gibbs_sample(graph, truth.potentials, cfg.n_samples, cfg.gibbs, cfg.sample_seed);

  save_model((dir / "model_true.json").string(), truth);
  save_dataset((dir / "data.txt").string(), data, cfg.to_json());
  const json manifest{{"config", cfg.to_json()},
                      {"seeds",
                       {{"graph", cfg.graph_seed},
                        {"params", param_seed},
                        {"sampling", cfg.sample_seed},
                        {"blocks", cfg.learn.blocks.seed}}},
                      {"files", {"model_true.json", "data.txt"}},
                      {"records", data.samples.size()}};
  std::ofstream os(dir / "manifest.json");
  if (!os) throw IoError("cannot write " + (dir / "manifest.json").string());
  os << manifest.dump(2) << '\n';
}

TrainOutcome run_train(const ExperimentConfig& cfg) {
  cfg.validate();
  const Assets assets = load_assets(cfg);
  const GraphTopology& graph = assets.truth.graph;
  const auto w_bar = empirical_statistics(assets.data, graph);
  const auto rho = CountingNumbers::preset(cfg.counting, graph);
  BlockPartition partition;
  if (cfg.method == Method::bbpl) partition = build_partition(cfg.blocks, cfg.graph, graph);

  TrainOutcome out;
  out.trace = train_method(cfg.method, graph, w_bar, rho, partition, cfg.learn);
  const std::string name = method_name(cfg.method);
  const fs::path dir = out_dir(cfg);
  out.trace_path = (dir / ("trace_" + name + ".csv")).string();
  out.model_path = (dir / ("model_" + name + ".json")).string();

  std::ofstream os(out.trace_path);
  if (!os) throw IoError("cannot write " + out.trace_path);
  os << "# config " << cfg.to_json().dump() << '\n';
  os << "# converged " << (out.trace.converged ? "true" : "false") << " inner_converged "
     << (out.trace.inner_converged ? "true" : "false") << '\n';
  write_trace_csv(os, out.trace);
  if (!os) throw IoError("write failed for " + out.trace_path);

  ModelFile learned;
  learned.graph = graph;
  learned.potentials = PotentialVector(graph, out.trace.theta);
  learned.config = cfg.to_json();
  save_model(out.model_path, learned);
  return out;
}

void run_compare(const std::vector<std::string>& trace_paths, std::ostream& os) {
  if (trace_paths.empty()) throw UsageError("compare needs at least one trace file");
  std::vector<WorkRow> rows;
  for (const auto& path : trace_paths) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read " + path);
    WorkRow row;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      if (line[0] == '#') {
        if (line.rfind("# converged ", 0) == 0) row.converged = line.rfind("# converged true", 0) == 0;
        continue;
      }
      if (!header) {
        if (line != trace_header()) throw UsageError(path + ": trace schema mismatch");
        header = true;
        continue;
      }
      const auto cols = split(line, ',');
      if (cols.size() != 9) throw UsageError(path + ": trace row has " + std::to_string(cols.size()) + " columns");
      try {
        row.method = cols[1];
        row.final_objective = std::stod(cols[2]);
        row.final_grad = std::stod(cols[3]);
        row.msg_updates = std::stoull(cols[4]);
        row.wall_ms = std::stod(cols[5]);
      } catch (const std::exception&) {
        throw UsageError(path + ": unparsable trace row");
      }
      ++row.outer_iters;
    }
    if (!header) throw UsageError(path + ": trace schema mismatch");
    rows.push_back(row);
  }
  write_work_report_csv(os, rows);
}

void run_block_sweep(const ExperimentConfig& cfg, const std::vector<std::size_t>& counts,
                     std::ostream& os) {
  if (counts.empty()) throw UsageError("sweep needs at least one block count");
  cfg.validate();
  const Assets assets = load_assets(cfg);
  const GraphTopology& graph = assets.truth.graph;
  const auto w_bar = empirical_statistics(assets.data, graph);
  const auto rho = CountingNumbers::preset(cfg.counting, graph);
  const GraphSpec gs = parse_graph_spec(cfg.graph);
  os << "blocks,block_spec,iterations,converged,msg_updates,final_grad_inf_norm\n";
  os << std::setprecision(17);
  for (std::size_t d : counts) {
    std::string spec = "index:" + std::to_string(d);
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(d))));
    if (gs.kind == GraphSpec::Kind::grid && side * side == d && side <= gs.rows && side <= gs.cols) {
      spec = "grid:" + std::to_string(side) + "x" + std::to_string(side);
    }
    const BlockPartition partition = build_partition(spec, cfg.graph, graph);
    const LearningTrace tr = train_bbpl(graph, w_bar, rho, partition, cfg.learn);
    const auto& last = tr.iterations.back();
    os << d << ',' << spec << ',' << tr.iterations.size() << ',' << (tr.converged ? 1 : 0) << ','
       << last.msg_updates_cum << ',' << last.grad_inf_norm << '\n';
  }
}

std::vector<std::string> validate_model_file(const std::string& path) {
  const ModelFile m = load_model(path);
  std::vector<std::string> out = m.graph.check();
  if (!m.potentials.all_finite()) out.push_back("potentials contain non-finite entries");
  if (m.features) {
    for (auto& p : m.features->check(m.graph)) out.push_back("features: " + p);
  }
  return out;
}

std::vector<std::string> run_validate(const ExperimentConfig& cfg) {
  cfg.validate();
  const GraphTopology graph = build_graph(cfg);
  std::vector<std::string> out = graph.check();
  const BlockPartition partition = build_partition(cfg.blocks, cfg.graph, graph);
  for (auto& p : validate(partition, graph)) out.push_back("partition: " + p);
  const fs::path model = out_dir(cfg) / "model_true.json";
  if (fs::exists(model)) {
    for (auto& p : validate_model_file(model.string())) out.push_back("model: " + p);
    if (!(load_model(model.string()).graph == graph)) {
      out.push_back("model: graph differs from the configured generator");
    }
  }
  return out;
}

}  // namespace bbpl
