#ifndef BBPL_MODEL_IO_HPP
#define BBPL_MODEL_IO_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "bbpl/graph.hpp"
#include "bbpl/model.hpp"
#include "bbpl/tables.hpp"

namespace bbpl {

inline constexpr const char* kModelFormat = "bbpl-model";
inline constexpr int kModelVersion = 1;

/// Contents of a model file.
///
///   {
///     "format": "bbpl-model", "version": 1,
///     "graph": {"n": 4, "states": [2, ...], "edges": [[0, 1], ...]},
///     "potentials": [flat theta in layout order],
///     "features": {"K": 3, "M": [[row 0], ...], "y": [...]},   (optional)
///     "config": {...}                                          (optional)
///   }
struct ModelFile {
  GraphTopology graph;
  PotentialVector potentials;
  std::optional<FeatureModel> features;
  nlohmann::json config = nlohmann::json::object();
};

nlohmann::json graph_to_json(const GraphTopology& graph);
GraphTopology graph_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const ModelFile& model);
/// Throws UsageError on a malformed document.
ModelFile model_from_json(const nlohmann::json& j);

/// Throws IoError when the file cannot be written or read.
void save_model(const std::string& path, const ModelFile& model);
ModelFile load_model(const std::string& path);

/// Dataset text file: '#' comment lines (the first carries the config as
/// JSON), then one assignment per line as space-separated integers in vertex
/// order.
void save_dataset(const std::string& path, const MrfDataset& data,
                  const nlohmann::json& config = nlohmann::json::object());
/// Checks every record against `graph` when given.
MrfDataset load_dataset(const std::string& path, const GraphTopology* graph = nullptr);

}  // namespace bbpl

#endif  // BBPL_MODEL_IO_HPP
