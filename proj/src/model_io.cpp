#include "bbpl/model_io.hpp"

#include <fstream>
#include <sstream>

#include "bbpl/errors.hpp"

namespace bbpl {

using nlohmann::json;

json graph_to_json(const GraphTopology& graph) {
  json edges = json::array();
  for (const auto& e : graph.edges()) edges.push_back({e.u, e.v});
  return json{{"n", graph.num_vertices()}, {"states", graph.state_counts()}, {"edges", edges}};
}

GraphTopology graph_from_json(const json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    auto states = j.at("states").get<std::vector<std::size_t>>();
    if (states.size() != n) throw UsageError("graph: states has " + std::to_string(states.size()) +
                                             " entries, n = " + std::to_string(n));
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw UsageError("graph: edge must be a pair");
      edges.emplace_back(e[0].get<Vertex>(), e[1].get<Vertex>());
    }
    return GraphTopology(std::move(states), edges);
  } catch (const json::exception& ex) {
    throw UsageError(std::string("graph: ") + ex.what());
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& ex) {
    throw UsageError(std::string("graph: ") + ex.what());
  } catch (const std::out_of_range& ex) {
    throw UsageError(std::string("graph: ") + ex.what());
  }
}

json model_to_json(const ModelFile& model) {
  json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["graph"] = graph_to_json(model.graph);
  j["potentials"] = model.potentials.values();
  if (model.features) {
    const auto& fm = *model.features;
    json rows = json::array();
    for (std::size_t k = 0; k < fm.num_params; ++k) {
      auto r = fm.row(k);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    j["features"] = {{"K", fm.num_params}, {"M", rows}, {"y", fm.labels}};
  }
  if (!model.config.empty()) j["config"] = model.config;
  return j;
}

ModelFile model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat) throw UsageError("not a bbpl model file");
    const int version = j.at("version").get<int>();
    if (version != kModelVersion) throw UsageError("unsupported model version " + std::to_string(version));
    ModelFile m;
    m.graph = graph_from_json(j.at("graph"));
    auto theta = j.at("potentials").get<std::vector<double>>();
    const std::size_t d = Layout(m.graph).size();
    if (theta.size() != d) {
      throw UsageError("potentials has " + std::to_string(theta.size()) + " entries, layout needs " +
                       std::to_string(d));
    }
    m.potentials = PotentialVector(m.graph, std::move(theta));
    if (j.contains("features")) {
      const auto& f = j.at("features");
      FeatureModel fm;
      fm.num_params = f.at("K").get<std::size_t>();
      fm.dim = d;
      const auto& rows = f.at("M");
      if (rows.size() != fm.num_params) throw UsageError("features: M must have K rows");
      for (const auto& r : rows) {
        auto row = r.get<std::vector<double>>();
        if (row.size() != d) throw UsageError("features: M rows must have length d");
        fm.matrix.insert(fm.matrix.end(), row.begin(), row.end());
      }
      fm.labels = f.at("y").get<std::vector<double>>();
      m.features = std::move(fm);
    }
    if (j.contains("config")) m.config = j.at("config");
    return m;
  } catch (const json::exception& ex) {
    throw UsageError(std::string("model file: ") + ex.what());
  }
}

void save_model(const std::string& path, const ModelFile& model) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << model_to_json(model).dump(2) << '\n';
  if (!os) throw IoError("write failed for " + path);
}

ModelFile load_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& ex) {
    throw UsageError(path + ": " + ex.what());
  }
  return model_from_json(j);
}

void save_dataset(const std::string& path, const MrfDataset& data, const json& config) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "# bbpl-dataset 1\n";
  os << "# config " << config.dump() << '\n';
  for (const auto& x : data.samples) {
    for (std::size_t s = 0; s < x.size(); ++s) os << (s ? " " : "") << x[s];
    os << '\n';
  }
  if (!os) throw IoError("write failed for " + path);
}

MrfDataset load_dataset(const std::string& path, const GraphTopology* graph) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read " + path);
  MrfDataset data;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Assignment x;
    long long v;
    while (ls >> v) {
      if (v < 0) throw UsageError(path + ":" + std::to_string(lineno) + ": negative state");
      x.push_back(static_cast<std::size_t>(v));
    }
    if (!ls.eof()) throw UsageError(path + ":" + std::to_string(lineno) + ": not an integer record");
    if (graph) {
      if (x.size() != graph->num_vertices()) {
        throw UsageError(path + ":" + std::to_string(lineno) + ": record has " +
                         std::to_string(x.size()) + " entries");
      }
      for (Vertex s = 0; s < x.size(); ++s) {
        if (x[s] >= graph->states(s)) {
          throw UsageError(path + ":" + std::to_string(lineno) + ": state out of range");
        }
      }
    }
    data.samples.push_back(std::move(x));
  }
  return data;
}

}  // namespace bbpl
