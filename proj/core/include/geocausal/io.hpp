#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "geocausal/adjacency.hpp"
#include "geocausal/corrdim.hpp"
#include "geocausal/dynamics.hpp"
#include "geocausal/eval.hpp"
#include "geocausal/geoc.hpp"
#include "geocausal/ogeoc.hpp"
#include "geocausal/panel.hpp"

namespace geocausal {

using Json = nlohmann::ordered_json;

// Edge lists: one "j i" pair per line meaning j -> i, 0-based, '#' comments.
// A "# nodes: N" comment fixes the node count; otherwise it is one more than
// the largest index (or min_nodes if larger).
AdjacencyMatrix parse_edge_list(const std::string& text, std::size_t min_nodes = 0);
AdjacencyMatrix read_edge_list(const std::filesystem::path& path, std::size_t min_nodes = 0);
std::string format_edge_list(const AdjacencyMatrix& adjacency);
void write_edge_list(const std::filesystem::path& path, const AdjacencyMatrix& adjacency);

// Panels: header "time,node_0_d0,node_0_d1,...,node_1_d0,..." and one row per
// time step. Values are written with round-trip precision.
std::string format_panel_csv(const TimeSeriesPanel& panel);
TimeSeriesPanel parse_panel_csv(const std::string& text);
void write_panel_csv(const std::filesystem::path& path, const TimeSeriesPanel& panel);
TimeSeriesPanel read_panel_csv(const std::filesystem::path& path);

/// One point per row, comma separated; a non-numeric first row is a header.
PointCloud parse_point_cloud_csv(const std::string& text);
PointCloud read_point_cloud_csv(const std::filesystem::path& path);

/// "ln_eps,ln_c" rows.
std::string format_curve_csv(const CorrSumCurve& curve);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

Json to_json(const AdjacencyMatrix& adjacency);
Json to_json(const NetworkSpec& spec);
Json to_json(const RadiusGrid& grid);
Json to_json(const CorrDimOptions& options);
Json to_json(const DimEstimate& estimate);
Json to_json(const GeoCValue& value);
Json to_json(const ShuffleConfig& config);
Json to_json(const InferenceOptions& options);
Json to_json(const ForwardTrace& trace);
Json to_json(const InferenceResult& result);
Json to_json(const ConfusionCounts& counts);
Json to_json(const TrialRecord& record);
Json to_json(const TrialSummary& summary);
Json to_json(const RocPoint& point);
Json to_json(const ExperimentConfig& config);

RadiusGrid grid_from_json(const Json& json);
/// Declarative experiment document; see README for the schema.
ExperimentConfig experiment_from_json(const Json& json,
                                      const std::filesystem::path& base_dir = {});

}  // namespace geocausal
