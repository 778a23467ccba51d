#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "geocausal/dynamics.hpp"
#include "geocausal/error.hpp"
#include "geocausal/eval.hpp"
#include "geocausal/io.hpp"
#include "geocausal/ogeoc.hpp"
#include "geocausal/random.hpp"

namespace geocausal::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  std::optional<double> eps_min;
  std::optional<double> eps_max;
  std::optional<std::size_t> radius_steps;
  std::optional<std::size_t> n_permutations;
  std::optional<double> theta;
  std::optional<double> eps_backward;
  std::string config;
  std::string out_dir;
};

struct SimulateOptions {
  std::string graph;
  std::size_t n = 20;
  double p = 0.1;
  double sigma = 0.1;
  double a = 4.0;
  std::size_t t = 10000;
  std::size_t transient = 1000;
  std::string coupling = "map";
};

struct CorrDimCommand {
  std::string input;
  std::string format = "auto";
  std::string target;
  std::string cond;
  std::string norm;
  std::optional<std::size_t> theiler;
  bool auto_region = false;
  bool log_spacing = false;
};

struct GeoCCommand {
  std::string panel;
  std::string source;
  std::string target;
  std::string cond;
  bool shuffle = false;
};

struct InferCommand {
  std::string panel;
  std::string truth;
  bool no_self = false;
};

struct ExperimentCommand {
  bool skip_trials = false;
  bool skip_roc = false;
};

fs::path output_dir(const GlobalOptions& g) {
  if (!g.out_dir.empty()) return g.out_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return ".";
}

NodeSet parse_nodes(const std::string& text, const char* flag) {
  NodeSet nodes;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    item = item.substr(first, last - first + 1);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.front() == '-') {
      throw ValidationError(std::string(flag) + " expects comma-separated node indices, got '" +
                            text + "'");
    }
    nodes.push_back(static_cast<std::size_t>(v));
  }
  return nodes;
}

/// Defaults, then the --config document, then command-line flags.
ExperimentConfig resolve_config(const GlobalOptions& g) {
  ExperimentConfig config;
  bool explicit_shuffle_seed = false;
  if (!g.config.empty()) {
    const fs::path path = g.config;
    Json doc;
    try {
      doc = Json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError("cannot parse " + path.string() + ": " + e.what());
    }
    // Result files embed their resolved configuration under "config".
    if (doc.is_object() && doc.contains("config")) doc = doc["config"];
    explicit_shuffle_seed = doc.is_object() && doc.contains("shuffle_seed");
    config = experiment_from_json(doc, path.parent_path());
  } else {
    config.inference.shuffle.seed = derive_seed(config.seed, {2});
  }
  if (g.seed) {
    config.seed = *g.seed;
    if (!explicit_shuffle_seed) config.inference.shuffle.seed = derive_seed(config.seed, {2});
  }
  auto& inf = config.inference;
  if (g.eps_min) inf.estimator.grid.eps_min = *g.eps_min;
  if (g.eps_max) inf.estimator.grid.eps_max = *g.eps_max;
  if (g.radius_steps) inf.estimator.grid.steps = *g.radius_steps;
  if (g.n_permutations) inf.shuffle.n_permutations = *g.n_permutations;
  if (g.theta) inf.shuffle.theta = *g.theta;
  if (g.eps_backward) inf.eps_backward = *g.eps_backward;
  inf.threads = g.threads;
  inf.estimator.grid.validate();
  inf.shuffle.validate();
  return config;
}

std::string format_rate(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

void write_json(const fs::path& path, const Json& json) { write_text(path, json.dump(2) + "\n"); }

TimeSeriesPanel load_panel(const std::string& path) {
  if (path.empty()) throw ValidationError("--panel is required");
  return read_panel_csv(path);
}

int cmd_simulate(const GlobalOptions& g, const SimulateOptions& o, std::ostream& out) {
  const auto config = resolve_config(g);
  const std::uint64_t graph_seed = derive_seed(config.seed, {0, 0});
  const std::uint64_t simulation_seed = derive_seed(config.seed, {1, 0});

  NetworkSpec spec;
  Json graph_source;
  if (o.graph == "er") {
    spec.adjacency = generate_er_graph(o.n, o.p, graph_seed);
    graph_source = Json{{"kind", "erdos_renyi"}, {"n", o.n}, {"p", o.p}};
  } else if (!o.graph.empty()) {
    spec.adjacency = read_edge_list(o.graph);
    graph_source = Json{{"kind", "fixed"}, {"file", o.graph}};
  } else {
    throw ValidationError("--graph must be an edge-list file or 'er'");
  }
  spec.sigma = o.sigma;
  spec.map_param = o.a;
  if (o.coupling == "map") {
    spec.coupling = CouplingKind::map_difference;
  } else if (o.coupling == "state") {
    spec.coupling = CouplingKind::state_difference;
  } else {
    throw ValidationError("--coupling must be 'map' or 'state'");
  }

  SimulationOptions sim;
  sim.transient = o.transient;
  sim.keep = o.t;
  sim.seed = simulation_seed;
  const auto panel = simulate(spec, sim);

  const fs::path dir = output_dir(g);
  write_panel_csv(dir / "panel.csv", panel);
  write_edge_list(dir / "graph.txt", spec.adjacency);
  Json meta{{"command", "simulate"},
            {"seed", config.seed},
            {"graph_seed", graph_seed},
            {"simulation_seed", simulation_seed},
            {"graph_source", graph_source},
            {"transient", o.transient},
            {"n_steps", o.t},
            {"spec", to_json(spec)}};
  write_json(dir / "panel.json", meta);
  out << "wrote " << (dir / "panel.csv").string() << " (" << panel.n_nodes() << " nodes x "
      << panel.n_steps() << " steps, " << spec.adjacency.edge_count() << " edges)\n";
  return kSuccess;
}

int cmd_corrdim(const GlobalOptions& g, const CorrDimCommand& o, std::ostream& out,
                std::ostream& err) {
  auto config = resolve_config(g);
  auto& est = config.inference.estimator;
  if (!o.norm.empty()) {
    if (o.norm == "max") {
      est.corrdim.norm = Norm::max;
    } else if (o.norm == "euclidean") {
      est.corrdim.norm = Norm::euclidean;
    } else {
      throw ValidationError("--norm must be 'max' or 'euclidean'");
    }
  }
  if (o.theiler) est.corrdim.theiler_window = *o.theiler;
  if (o.auto_region) est.corrdim.auto_region = true;
  if (o.log_spacing) est.grid.spacing = RadiusSpacing::log;

  if (o.input.empty()) throw ValidationError("--input is required");
  const std::string text = read_text(o.input);
  std::string format = o.format;
  if (format == "auto") format = text.rfind("time,", 0) == 0 ? "panel" : "cloud";

  PointCloud cloud;
  Json source{{"input", o.input}, {"format", format}};
  if (format == "panel") {
    const auto panel = parse_panel_csv(text);
    const auto target = parse_nodes(o.target, "--i");
    const auto cond = parse_nodes(o.cond, "--k");
    if (target.empty() && cond.empty()) {
      // Every node's state at every time step.
      std::vector<double> coords(panel.n_steps() * panel.n_nodes() * panel.state_dim());
      const std::size_t width = panel.n_nodes() * panel.state_dim();
      for (std::size_t t = 0; t < panel.n_steps(); ++t)
        for (std::size_t i = 0; i < panel.n_nodes(); ++i)
          for (std::size_t k = 0; k < panel.state_dim(); ++k)
            coords[t * width + i * panel.state_dim() + k] = panel.value(i, t, k);
      cloud = PointCloud(panel.n_steps(), width, std::move(coords));
    } else {
      cloud = build_embedding(panel, target, cond);
      source["target"] = target;
      source["conditioners"] = cond;
    }
  } else if (format == "cloud") {
    cloud = parse_point_cloud_csv(text);
  } else {
    throw ValidationError("--format must be 'auto', 'panel' or 'cloud'");
  }

  const auto curve = correlation_curve(cloud, est.grid, est.corrdim);
  const auto estimate = est.corrdim.auto_region ? estimate_d2_region(curve, est.corrdim.region)
                                                : estimate_d2(curve);
  Json warnings = Json::array();
  if (estimate.degenerate) {
    const std::string w =
        "degenerate curve: every retained correlation sum is equal (constant or saturated data)";
    warnings.push_back(w);
    err << "warning: " << w << "\n";
  }
  Json record{{"command", "corrdim"},
              {"source", source},
              {"n_points", cloud.size()},
              {"dim", cloud.dim()},
              {"grid", to_json(est.grid)},
              {"corrdim", to_json(est.corrdim)},
              {"n_curve_points", curve.points.size()},
              {"n_dropped", curve.n_dropped},
              {"estimate", to_json(estimate)},
              {"warnings", warnings}};
  const fs::path dir = output_dir(g);
  write_text(dir / "curve.csv", format_curve_csv(curve));
  write_json(dir / "corrdim.json", record);
  out << record.dump(2) << "\n";
  return kSuccess;
}

int cmd_geoc(const GlobalOptions& g, const GeoCCommand& o, std::ostream& out) {
  const auto config = resolve_config(g);
  const auto panel = load_panel(o.panel);
  const auto source = parse_nodes(o.source, "--j");
  const auto target = parse_nodes(o.target, "--i");
  const auto cond = parse_nodes(o.cond, "--k");
  GeoCEstimator estimator(panel, config.inference.estimator);
  const auto value = estimator.geoc(source, target, cond);

  Json record{{"command", "geoc"},
              {"J", source},
              {"I", target},
              {"K", cond},
              {"T", panel.n_steps()}};
  record.update(to_json(value));
  record["grid"] = to_json(config.inference.estimator.grid);
  if (o.shuffle) {
    if (source.size() != 1 || target.size() != 1) {
      throw ValidationError("--shuffle needs a single source and a single target node");
    }
    const auto& shuffle = config.inference.shuffle;
    const double threshold = value.reduced
                                 ? 0.0
                                 : shuffle_threshold(estimator, target[0], source[0], cond,
                                                     shuffle, config.inference.threads);
    record["shuffle"] = to_json(shuffle);
    record["threshold"] = threshold;
    record["significant"] = !value.reduced && value.value > threshold;
  }
  Json doc = record;
  doc["config"] = to_json(config.inference);
  doc["config"]["seed"] = config.seed;
  write_json(output_dir(g) / "geoc.json", doc);
  out << record.dump(2) << "\n";
  return kSuccess;
}

int cmd_infer(const GlobalOptions& g, const InferCommand& o, std::ostream& out,
              std::ostream& err) {
  auto config = resolve_config(g);
  if (o.no_self) config.inference.self_candidates = false;
  const auto panel = load_panel(o.panel);
  const auto result = infer_network(panel, config.inference);

  Json resolved = to_json(config.inference);
  resolved["seed"] = config.seed;
  Json doc{{"command", "infer"},
           {"input", o.panel},
           {"n_nodes", panel.n_nodes()},
           {"n_steps", panel.n_steps()},
           {"config", resolved}};
  doc["result"] = to_json(result);
  if (!o.truth.empty()) {
    const auto truth = read_edge_list(o.truth, panel.n_nodes());
    doc["truth"] = o.truth;
    doc["score"] = to_json(confusion(result.adjacency, truth));
  }
  const fs::path dir = output_dir(g);
  write_json(dir / "infer.json", doc);
  write_edge_list(dir / "edges.txt", result.adjacency);

  out << "inferred " << result.adjacency.edge_count() << " edges\n";
  for (auto [j, i] : result.adjacency.edges()) out << j << " -> " << i << "\n";
  if (doc.contains("score")) {
    out << "tpr " << format_rate(doc["score"]["tpr"].is_null()
                                     ? std::nullopt
                                     : std::optional<double>(doc["score"]["tpr"].get<double>()))
        << " fpr "
        << format_rate(doc["score"]["fpr"].is_null()
                           ? std::nullopt
                           : std::optional<double>(doc["score"]["fpr"].get<double>()))
        << "\n";
  }
  if (!result.complete()) {
    for (const auto& f : result.failures)
      err << "node " << f.node << " failed: " << f.message << "\n";
    return kPartialFailure;
  }
  return kSuccess;
}

int cmd_experiment(const GlobalOptions& g, const ExperimentCommand& o, std::ostream& out,
                   std::ostream& err) {
  if (g.config.empty()) throw ValidationError("experiment needs --config <file>");
  const auto config = resolve_config(g);
  const fs::path dir = output_dir(g);
  bool partial = false;

  if (!o.skip_trials) {
    const auto result = run_trials(config);
    Json records = Json::array();
    for (const auto& r : result.records) {
      records.push_back(to_json(r));
      if (r.error) {
        partial = true;
        err << "T=" << r.sample_size << " trial " << r.trial << ": " << *r.error << "\n";
      }
    }
    Json summaries = Json::array();
    std::string csv = "T,mean_tpr,min_tpr,max_tpr,mean_fpr,min_fpr,max_fpr\n";
    for (const auto& s : result.summaries) {
      summaries.push_back(to_json(s));
      auto field = [](const std::optional<Stat>& st, double Stat::*m) {
        return st ? format_rate((*st).*m) : std::string();
      };
      csv += std::to_string(s.sample_size) + "," + field(s.tpr, &Stat::mean) + "," +
             field(s.tpr, &Stat::min) + "," + field(s.tpr, &Stat::max) + "," +
             field(s.fpr, &Stat::mean) + "," + field(s.fpr, &Stat::min) + "," +
             field(s.fpr, &Stat::max) + "\n";
    }
    write_json(dir / "trials.json",
               Json{{"command", "experiment"},
                    {"config", to_json(config)},
                    {"summaries", summaries},
                    {"records", records}});
    write_text(dir / "summary.csv", csv);
    out << csv;
  }

  if (!o.skip_roc && !config.roc_thetas.empty()) {
    const auto curves = run_roc(config);
    Json doc_curves = Json::array();
    for (const auto& c : curves) {
      std::string csv = "theta,tpr,fpr\n";
      Json points = Json::array();
      for (const auto& p : c.points) {
        csv += format_rate(p.theta) + "," + format_rate(p.tpr) + "," + format_rate(p.fpr) + "\n";
        points.push_back(to_json(p));
        if (p.error) {
          partial = true;
          err << "ROC T=" << c.sample_size << " theta=" << p.theta << ": " << *p.error << "\n";
        }
      }
      write_text(dir / ("roc_T" + std::to_string(c.sample_size) + ".csv"), csv);
      doc_curves.push_back(Json{{"sample_size", c.sample_size},
                                {"graph_seed", c.graph_seed},
                                {"simulation_seed", c.simulation_seed},
                                {"truth", to_json(c.truth)},
                                {"points", points}});
      out << "ROC T=" << c.sample_size << "\n" << csv;
    }
    write_json(dir / "roc.json",
               Json{{"command", "experiment"}, {"config", to_json(config)}, {"curves", doc_curves}});
  }
  return partial ? kPartialFailure : kSuccess;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return kValidation;
    case ErrorKind::io: return kIo;
    case ErrorKind::estimation: return kEstimation;
    case ErrorKind::trajectory_escape: return kTrajectoryEscape;
  }
  return kUsage;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Causal network inference from time series with geometric information flow",
               "geocausal"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Master seed for graphs, initial conditions and shuffles");
  app.add_option("--threads", g.threads, "Worker threads (0 = all hardware threads)");
  app.add_option("--eps-min", g.eps_min, "Smallest radius of the correlation-sum grid");
  app.add_option("--eps-max", g.eps_max, "Upper end of the radius grid (excluded)");
  app.add_option("--radius-steps", g.radius_steps, "Number of radii in the grid");
  app.add_option("--np", g.n_permutations, "Number of shuffle-test permutations");
  app.add_option("--theta", g.theta, "Shuffle-test significance level in (0, 1)");
  app.add_option("--eps-backward", g.eps_backward, "Backward-pass pruning threshold");
  app.add_option("--config", g.config, "JSON configuration document");
  app.add_option("-o,--out", g.out_dir,
                 std::string("Output directory (default: $") + kOutputDirEnv + " or .)");

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a coupled logistic network");
  simulate_cmd->add_option("--graph", sim.graph, "Edge-list file, or 'er' for a random graph")
      ->required();
  simulate_cmd->add_option("--n", sim.n, "Nodes of the random graph");
  simulate_cmd->add_option("--p", sim.p, "Edge probability of the random graph");
  simulate_cmd->add_option("--sigma", sim.sigma, "Coupling strength");
  simulate_cmd->add_option("--a", sim.a, "Logistic map parameter");
  simulate_cmd->add_option("--t", sim.t, "Number of time steps kept");
  simulate_cmd->add_option("--transient", sim.transient, "Discarded initial steps");
  simulate_cmd->add_option("--coupling", sim.coupling, "'map' (f(x_j) - f(x_i)) or 'state'");

  CorrDimCommand cd;
  auto* corrdim_cmd = app.add_subcommand("corrdim", "Estimate the correlation dimension");
  corrdim_cmd->add_option("--input", cd.input, "Panel CSV or point-cloud CSV")->required();
  corrdim_cmd->add_option("--format", cd.format, "'auto', 'panel' or 'cloud'");
  corrdim_cmd->add_option("--i", cd.target, "Panel nodes read one step ahead (comma list)");
  corrdim_cmd->add_option("--k", cd.cond, "Panel nodes read at the current step (comma list)");
  corrdim_cmd->add_option("--norm", cd.norm, "'max' or 'euclidean'");
  corrdim_cmd->add_option("--theiler", cd.theiler, "Theiler window in time steps");
  corrdim_cmd->add_flag("--auto-region", cd.auto_region, "Fit only the selected linear region");
  corrdim_cmd->add_flag("--log-spacing", cd.log_spacing, "Logarithmically spaced radii");

  GeoCCommand gc;
  auto* geoc_cmd = app.add_subcommand("geoc", "Evaluate GeoC_{J->I|K} on a panel");
  geoc_cmd->add_option("--panel", gc.panel, "Panel CSV")->required();
  geoc_cmd->add_option("--j", gc.source, "Source nodes J (comma list)")->required();
  geoc_cmd->add_option("--i", gc.target, "Target nodes I (comma list)")->required();
  geoc_cmd->add_option("--k", gc.cond, "Conditioning nodes K (comma list, may be empty)");
  geoc_cmd->add_flag("--shuffle", gc.shuffle, "Also run the shuffle test");

  InferCommand inf;
  auto* infer_cmd = app.add_subcommand("infer", "Infer the coupling network of a panel");
  infer_cmd->add_option("--panel", inf.panel, "Panel CSV")->required();
  infer_cmd->add_option("--truth", inf.truth, "Ground-truth edge list to score against");
  infer_cmd->add_flag("--no-self", inf.no_self, "Exclude a node's own past from its candidates");

  ExperimentCommand ex;
  auto* experiment_cmd = app.add_subcommand("experiment", "Run trials and ROC sweeps");
  experiment_cmd->add_flag("--skip-trials", ex.skip_trials, "Only run the ROC sweep");
  experiment_cmd->add_flag("--skip-roc", ex.skip_roc, "Only run the trials");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(g, sim, out);
    if (*corrdim_cmd) return cmd_corrdim(g, cd, out, err);
    if (*geoc_cmd) return cmd_geoc(g, gc, out);
    if (*infer_cmd) return cmd_infer(g, inf, out, err);
    if (*experiment_cmd) return cmd_experiment(g, ex, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  }
  return kUsage;
}

}  // namespace geocausal::cli
