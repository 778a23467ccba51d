#include "geocausal/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "geocausal/error.hpp"
#include "geocausal/random.hpp"

namespace geocausal {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_index(const std::string& s) {
  std::size_t v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("error while writing " + path.string());
}

AdjacencyMatrix parse_edge_list(const std::string& text, std::size_t min_nodes) {
  std::optional<std::size_t> declared;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t n = min_nodes;
  std::size_t line_no = 0;
  for (const auto& raw : lines_of(text)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string body = trim(std::string_view(line).substr(1));
      if (body.rfind("nodes:", 0) == 0) {
        auto value = parse_index(trim(std::string_view(body).substr(6)));
        if (!value) throw ValidationError("edge list line " + std::to_string(line_no) +
                                          ": bad node count");
        declared = *value;
      }
      continue;
    }
    if (const auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
    std::istringstream fields(line);
    std::string a;
    std::string b;
    std::string extra;
    fields >> a >> b;
    auto source = parse_index(a);
    auto target = parse_index(b);
    if (!source || !target || (fields >> extra)) {
      throw ValidationError("edge list line " + std::to_string(line_no) +
                            ": expected two node indices, got '" + line + "'");
    }
    edges.emplace_back(*source, *target);
    n = std::max(n, std::max(*source, *target) + 1);
  }
  if (declared) {
    if (*declared < n && n > min_nodes) {
      throw ValidationError("edge list references node " + std::to_string(n - 1) +
                            " but declares " + std::to_string(*declared) + " nodes");
    }
    n = std::max(*declared, min_nodes);
  }
  return AdjacencyMatrix::from_edges(n, edges);
}

AdjacencyMatrix read_edge_list(const std::filesystem::path& path, std::size_t min_nodes) {
  return parse_edge_list(read_text(path), min_nodes);
}

std::string format_edge_list(const AdjacencyMatrix& adjacency) {
  std::string out = "# nodes: " + std::to_string(adjacency.size()) + "\n";
  for (auto [j, i] : adjacency.edges()) out += std::to_string(j) + " " + std::to_string(i) + "\n";
  return out;
}

void write_edge_list(const std::filesystem::path& path, const AdjacencyMatrix& adjacency) {
  write_text(path, format_edge_list(adjacency));
}

std::string format_panel_csv(const TimeSeriesPanel& panel) {
  std::string out = "time";
  for (std::size_t i = 0; i < panel.n_nodes(); ++i)
    for (std::size_t k = 0; k < panel.state_dim(); ++k)
      out += ",node_" + std::to_string(i) + "_d" + std::to_string(k);
  out += '\n';
  for (std::size_t t = 0; t < panel.n_steps(); ++t) {
    out += std::to_string(t);
    for (std::size_t i = 0; i < panel.n_nodes(); ++i)
      for (std::size_t k = 0; k < panel.state_dim(); ++k) {
        out += ',';
        out += format_double(panel.value(i, t, k));
      }
    out += '\n';
  }
  return out;
}

TimeSeriesPanel parse_panel_csv(const std::string& text) {
  const auto lines = lines_of(text);
  std::size_t first = 0;
  while (first < lines.size() && trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw ValidationError("panel CSV is empty");

  const auto header = split(lines[first], ',');
  if (header.size() < 2 || header[0] != "time") {
    throw ValidationError("panel CSV header must start with 'time,node_0_d0'");
  }
  std::size_t n_nodes = 0;
  std::size_t state_dim = 0;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto& name = header[c];
    const auto sep = name.find("_d");
    std::optional<std::size_t> node;
    std::optional<std::size_t> dim;
    if (name.rfind("node_", 0) == 0 && sep != std::string::npos) {
      node = parse_index(name.substr(5, sep - 5));
      dim = parse_index(name.substr(sep + 2));
    }
    if (!node || !dim) throw ValidationError("bad panel column name '" + name + "'");
    if (*node == 0) state_dim = std::max(state_dim, *dim + 1);
    n_nodes = std::max(n_nodes, *node + 1);
  }
  if (n_nodes * state_dim != header.size() - 1) {
    throw ValidationError("panel CSV columns do not form a node x dimension grid");
  }
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string expected =
        "node_" + std::to_string((c - 1) / state_dim) + "_d" + std::to_string((c - 1) % state_dim);
    if (header[c] != expected) {
      throw ValidationError("panel column " + std::to_string(c) + " should be '" + expected +
                            "', got '" + header[c] + "'");
    }
  }

  std::vector<std::vector<double>> rows;
  for (std::size_t l = first + 1; l < lines.size(); ++l) {
    if (trim(lines[l]).empty()) continue;
    const auto fields = split(lines[l], ',');
    if (fields.size() != header.size()) {
      throw ValidationError("panel CSV line " + std::to_string(l + 1) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
    }
    std::vector<double> row(fields.size() - 1);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      auto v = parse_double(fields[c]);
      if (!v) {
        throw ValidationError("panel CSV line " + std::to_string(l + 1) + ": bad number '" +
                              fields[c] + "'");
      }
      row[c - 1] = *v;
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n_steps = rows.size();
  std::vector<double> values(n_nodes * n_steps * state_dim);
  for (std::size_t t = 0; t < n_steps; ++t)
    for (std::size_t i = 0; i < n_nodes; ++i)
      for (std::size_t k = 0; k < state_dim; ++k)
        values[(i * n_steps + t) * state_dim + k] = rows[t][i * state_dim + k];
  return TimeSeriesPanel(n_nodes, n_steps, state_dim, std::move(values));
}

void write_panel_csv(const std::filesystem::path& path, const TimeSeriesPanel& panel) {
  write_text(path, format_panel_csv(panel));
}

TimeSeriesPanel read_panel_csv(const std::filesystem::path& path) {
  return parse_panel_csv(read_text(path));
}

PointCloud parse_point_cloud_csv(const std::string& text) {
  std::vector<double> coords;
  std::size_t dim = 0;
  std::size_t n = 0;
  bool first_row = true;
  std::size_t line_no = 0;
  for (const auto& line : lines_of(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    std::vector<double> row;
    bool numeric = true;
    for (const auto& f : fields) {
      auto v = parse_double(f);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (first_row) {
        first_row = false;
        continue;
      }
      throw ValidationError("point cloud line " + std::to_string(line_no) + " is not numeric");
    }
    first_row = false;
    if (dim == 0) dim = row.size();
    if (row.size() != dim) {
      throw ValidationError("point cloud line " + std::to_string(line_no) + " has " +
                            std::to_string(row.size()) + " coordinates, expected " +
                            std::to_string(dim));
    }
    coords.insert(coords.end(), row.begin(), row.end());
    ++n;
  }
  return PointCloud(n, dim, std::move(coords));
}

PointCloud read_point_cloud_csv(const std::filesystem::path& path) {
  return parse_point_cloud_csv(read_text(path));
}

std::string format_curve_csv(const CorrSumCurve& curve) {
  std::string out = "ln_eps,ln_c\n";
  for (const auto& p : curve.points)
    out += format_double(p.ln_eps) + "," + format_double(p.ln_c) + "\n";
  return out;
}

namespace {

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json node_sets(const std::vector<NodeSet>& sets) {
  Json out = Json::array();
  for (const auto& s : sets) out.push_back(s);
  return out;
}

Json stat_json(const std::optional<Stat>& s) {
  if (!s) return nullptr;
  return Json{{"mean", s->mean}, {"min", s->min}, {"max", s->max}};
}

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::io: return "io";
    case ErrorKind::estimation: return "estimation";
    case ErrorKind::trajectory_escape: return "trajectory_escape";
  }
  return "unknown";
}

}  // namespace

Json to_json(const AdjacencyMatrix& adjacency) {
  Json edges = Json::array();
  for (auto [j, i] : adjacency.edges()) edges.push_back({j, i});
  return Json{{"n_nodes", adjacency.size()}, {"edges", edges}};
}

Json to_json(const NetworkSpec& spec) {
  return Json{{"sigma", spec.sigma},
              {"map_param", spec.map_param},
              {"state_dim", spec.state_dim},
              {"coupling", spec.coupling == CouplingKind::map_difference ? "map_difference"
                                                                          : "state_difference"},
              {"kappa", spec.kappa},
              {"graph", to_json(spec.adjacency)}};
}

Json to_json(const RadiusGrid& grid) {
  return Json{{"eps_min", grid.eps_min},
              {"eps_max", grid.eps_max},
              {"steps", grid.steps},
              {"spacing", grid.spacing == RadiusSpacing::linear ? "linear" : "log"}};
}

Json to_json(const CorrDimOptions& options) {
  return Json{{"norm", options.norm == Norm::max ? "max" : "euclidean"},
              {"theiler_window", options.theiler_window},
              {"auto_region", options.auto_region},
              {"region_min_points", options.region.min_points},
              {"region_tolerance", options.region.tolerance}};
}

Json to_json(const DimEstimate& estimate) {
  return Json{{"d2", estimate.d2},
              {"intercept", estimate.intercept},
              {"residual_sum", estimate.residual_sum},
              {"n_points_used", estimate.n_points_used},
              {"first", estimate.first},
              {"last", estimate.last},
              {"degenerate", estimate.degenerate}};
}

Json to_json(const GeoCValue& value) {
  return Json{{"geoc", value.value},
              {"d2_target_given_k", value.d2_target_given_k},
              {"d2_k", value.d2_k},
              {"d2_target_given_jk", value.d2_target_given_jk},
              {"d2_jk", value.d2_jk},
              {"reduced", value.reduced}};
}

Json to_json(const ShuffleConfig& config) {
  return Json{{"n_permutations", config.n_permutations},
              {"theta", config.theta},
              {"seed", config.seed}};
}

Json to_json(const InferenceOptions& options) {
  const auto& corrdim = options.estimator.corrdim;
  return Json{{"n_permutations", options.shuffle.n_permutations},
              {"theta", options.shuffle.theta},
              {"shuffle_seed", options.shuffle.seed},
              {"eps_backward", options.eps_backward},
              {"self_candidates", options.self_candidates},
              {"grid", to_json(options.estimator.grid)},
              {"norm", corrdim.norm == Norm::max ? "max" : "euclidean"},
              {"theiler_window", corrdim.theiler_window},
              {"auto_region", corrdim.auto_region}};
}

Json to_json(const ForwardTrace& trace) {
  Json steps = Json::array();
  for (const auto& s : trace.steps) {
    Json scores = Json::array();
    for (const auto& c : s.scores) scores.push_back({{"node", c.node}, {"geoc", c.geoc}});
    steps.push_back({{"conditioning", s.conditioning},
                     {"scores", scores},
                     {"best", s.best},
                     {"max_geoc", s.max_geoc},
                     {"threshold", s.threshold},
                     {"accepted", s.accepted}});
  }
  return steps;
}

Json to_json(const InferenceResult& result) {
  Json traces = Json::array();
  for (const auto& t : result.traces) traces.push_back(to_json(t));
  Json failures = Json::array();
  for (const auto& f : result.failures)
    failures.push_back({{"node", f.node}, {"kind", kind_name(f.kind)}, {"message", f.message}});
  return Json{{"adjacency", to_json(result.adjacency)},
              {"candidates", node_sets(result.candidates)},
              {"parents", node_sets(result.parents)},
              {"eps_backward", result.eps_backward},
              {"complete", result.complete()},
              {"failures", failures},
              {"traces", traces}};
}

Json to_json(const ConfusionCounts& counts) {
  return Json{{"tp", counts.tp},
              {"fp", counts.fp},
              {"tn", counts.tn},
              {"fn", counts.fn},
              {"tpr", optional_json(counts.tpr())},
              {"fpr", optional_json(counts.fpr())}};
}

Json to_json(const TrialRecord& record) {
  return Json{{"sample_size", record.sample_size},
              {"trial", record.trial},
              {"graph_seed", record.graph_seed},
              {"simulation_seed", record.simulation_seed},
              {"true_edges", record.true_edges},
              {"counts", record.counts ? to_json(*record.counts) : Json(nullptr)},
              {"tpr", optional_json(record.tpr)},
              {"fpr", optional_json(record.fpr)},
              {"node_failures", record.node_failures},
              {"error", record.error ? Json(*record.error) : Json(nullptr)},
              {"truth", to_json(record.truth)},
              {"estimate", to_json(record.estimate)}};
}

Json to_json(const TrialSummary& summary) {
  return Json{{"sample_size", summary.sample_size},
              {"trials", summary.trials},
              {"completed", summary.completed},
              {"tpr", stat_json(summary.tpr)},
              {"fpr", stat_json(summary.fpr)}};
}

Json to_json(const RocPoint& point) {
  return Json{{"theta", point.theta},
              {"tpr", optional_json(point.tpr)},
              {"fpr", optional_json(point.fpr)},
              {"error", point.error ? Json(*point.error) : Json(nullptr)}};
}

Json to_json(const ExperimentConfig& config) {
  Json graph;
  if (config.graph.kind == GraphSource::Kind::erdos_renyi) {
    graph = Json{{"kind", "erdos_renyi"}, {"n", config.graph.n}, {"p", config.graph.p}};
  } else {
    graph = Json{{"kind", "fixed"}, {"n", config.graph.fixed.size()}};
    graph["edges"] = to_json(config.graph.fixed)["edges"];
  }
  Json out{{"graph", graph},
           {"sigma", config.sigma},
           {"map_param", config.map_param},
           {"transient", config.transient},
           {"sample_sizes", config.sample_sizes},
           {"trials", config.trials},
           {"seed", config.seed},
           {"roc_thetas", config.roc_thetas}};
  out.update(to_json(config.inference));
  return out;
}

namespace {

template <class T>
T get_field(const Json& json, const char* key, T fallback) {
  auto it = json.find(key);
  if (it == json.end()) return fallback;
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("config field '") + key + "' has the wrong type");
  }
}

void check_keys(const Json& json, std::initializer_list<const char*> allowed, const char* where) {
  if (!json.is_object()) throw ValidationError(std::string(where) + " must be a JSON object");
  for (const auto& item : json.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) {
      throw ValidationError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

}  // namespace

RadiusGrid grid_from_json(const Json& json) {
  check_keys(json, {"eps_min", "eps_max", "steps", "spacing"}, "grid");
  RadiusGrid grid;
  grid.eps_min = get_field(json, "eps_min", grid.eps_min);
  grid.eps_max = get_field(json, "eps_max", grid.eps_max);
  grid.steps = get_field(json, "steps", grid.steps);
  const auto spacing = get_field<std::string>(json, "spacing", "linear");
  if (spacing == "linear") {
    grid.spacing = RadiusSpacing::linear;
  } else if (spacing == "log") {
    grid.spacing = RadiusSpacing::log;
  } else {
    throw ValidationError("grid spacing must be 'linear' or 'log'");
  }
  grid.validate();
  return grid;
}

ExperimentConfig experiment_from_json(const Json& json, const std::filesystem::path& base_dir) {
  check_keys(json,
             {"graph", "sigma", "map_param", "transient", "sample_sizes", "trials", "seed",
              "n_permutations", "theta", "roc_thetas", "eps_backward", "self_candidates",
              "shuffle_seed", "grid", "norm", "theiler_window", "auto_region", "threads"},
             "experiment config");
  ExperimentConfig c;
  if (auto it = json.find("graph"); it != json.end()) {
    const Json& g = *it;
    check_keys(g, {"kind", "n", "p", "edges", "file"}, "graph");
    const auto kind = get_field<std::string>(g, "kind", "erdos_renyi");
    if (kind == "erdos_renyi") {
      c.graph.kind = GraphSource::Kind::erdos_renyi;
      c.graph.n = get_field(g, "n", c.graph.n);
      c.graph.p = get_field(g, "p", c.graph.p);
    } else if (kind == "fixed") {
      c.graph.kind = GraphSource::Kind::fixed;
      const std::size_t n = get_field<std::size_t>(g, "n", 0);
      if (g.contains("file")) {
        std::filesystem::path file = get_field<std::string>(g, "file", "");
        if (file.is_relative()) file = base_dir / file;
        c.graph.fixed = read_edge_list(file, n);
      } else if (g.contains("edges")) {
        const auto edges =
            get_field<std::vector<std::pair<std::size_t, std::size_t>>>(g, "edges", {});
        std::size_t size = n;
        for (auto [j, i] : edges) size = std::max(size, std::max(j, i) + 1);
        c.graph.fixed = AdjacencyMatrix::from_edges(size, edges);
      } else {
        throw ValidationError("fixed graph needs 'file' or 'edges'");
      }
      c.graph.n = c.graph.fixed.size();
    } else {
      throw ValidationError("graph kind must be 'erdos_renyi' or 'fixed'");
    }
  }
  c.sigma = get_field(json, "sigma", c.sigma);
  c.map_param = get_field(json, "map_param", c.map_param);
  c.transient = get_field(json, "transient", c.transient);
  c.sample_sizes = get_field(json, "sample_sizes", c.sample_sizes);
  c.trials = get_field(json, "trials", c.trials);
  c.seed = get_field(json, "seed", c.seed);
  c.roc_thetas = get_field(json, "roc_thetas", c.roc_thetas);

  auto& inf = c.inference;
  inf.shuffle.n_permutations = get_field(json, "n_permutations", inf.shuffle.n_permutations);
  inf.shuffle.theta = get_field(json, "theta", inf.shuffle.theta);
  inf.shuffle.seed = get_field(json, "shuffle_seed", derive_seed(c.seed, {2}));
  inf.eps_backward = get_field(json, "eps_backward", inf.eps_backward);
  inf.self_candidates = get_field(json, "self_candidates", inf.self_candidates);
  inf.threads = get_field(json, "threads", inf.threads);
  if (auto it = json.find("grid"); it != json.end()) inf.estimator.grid = grid_from_json(*it);
  const auto norm = get_field<std::string>(json, "norm", "max");
  if (norm == "max") {
    inf.estimator.corrdim.norm = Norm::max;
  } else if (norm == "euclidean") {
    inf.estimator.corrdim.norm = Norm::euclidean;
  } else {
    throw ValidationError("norm must be 'max' or 'euclidean'");
  }
  inf.estimator.corrdim.theiler_window =
      get_field(json, "theiler_window", inf.estimator.corrdim.theiler_window);
  inf.estimator.corrdim.auto_region =
      get_field(json, "auto_region", inf.estimator.corrdim.auto_region);
  c.validate();
  return c;
}

}  // namespace geocausal
