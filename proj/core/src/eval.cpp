#include "geocausal/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geocausal/error.hpp"
#include "geocausal/parallel.hpp"
#include "geocausal/random.hpp"

namespace geocausal {

std::optional<double> ConfusionCounts::tpr() const {
  if (tp + fn == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

std::optional<double> ConfusionCounts::fpr() const {
  if (fp + tn == 0) return std::nullopt;
  return static_cast<double>(fp) / static_cast<double>(fp + tn);
}

ConfusionCounts confusion(const AdjacencyMatrix& estimate, const AdjacencyMatrix& truth) {
  if (estimate.size() != truth.size()) {
    throw ValidationError("estimate has " + std::to_string(estimate.size()) +
                          " nodes but the truth has " + std::to_string(truth.size()));
  }
  ConfusionCounts c;
  const std::size_t n = truth.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool e = estimate.at(i, j);
      const bool t = truth.at(i, j);
      if (e && t) ++c.tp;
      else if (e) ++c.fp;
      else if (t) ++c.fn;
      else ++c.tn;
    }
  }
  return c;
}

std::vector<RocPoint> roc_sweep(const TimeSeriesPanel& panel, const AdjacencyMatrix& truth,
                                std::span<const double> thetas, const InferenceOptions& base) {
  if (truth.size() != panel.n_nodes()) {
    throw ValidationError("truth graph size does not match the panel");
  }
  for (double theta : thetas) {
    if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("ROC thetas must lie in (0, 1)");
  }
  GeoCEstimator estimator(panel, base.estimator);
  SurrogateCache surrogates;
  std::vector<RocPoint> points;
  points.reserve(thetas.size());
  for (double theta : thetas) {
    RocPoint point;
    point.theta = theta;
    try {
      InferenceOptions options = base;
      options.shuffle.theta = theta;
      const auto result = infer_network(estimator, options, &surrogates);
      if (!result.complete()) {
        point.error = std::to_string(result.failures.size()) +
                      " node(s) failed: " + result.failures.front().message;
      } else {
        const auto counts = confusion(result.adjacency, truth);
        point.tpr = counts.tpr();
        point.fpr = counts.fpr();
      }
    } catch (const Error& e) {
      point.error = e.what();
    }
    points.push_back(std::move(point));
  }
  return points;
}

void ExperimentConfig::validate() const {
  if (graph.kind == GraphSource::Kind::erdos_renyi) {
    if (graph.n < 2) throw ValidationError("graph needs at least 2 nodes");
    if (!(graph.p >= 0.0 && graph.p <= 1.0)) throw ValidationError("edge probability must lie in [0, 1]");
  } else if (graph.fixed.size() < 2) {
    throw ValidationError("fixed graph needs at least 2 nodes");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma must be >= 0");
  if (!(map_param > 0.0 && map_param <= 4.0)) throw ValidationError("map parameter must lie in (0, 4]");
  if (sample_sizes.empty()) throw ValidationError("at least one sample size is required");
  for (auto t : sample_sizes)
    if (t < 3) throw ValidationError("sample sizes must be at least 3");
  if (trials < 1) throw ValidationError("at least one trial is required");
  inference.shuffle.validate();
  inference.estimator.grid.validate();
  for (double theta : roc_thetas)
    if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("ROC thetas must lie in (0, 1)");
}

namespace {

struct TrialNetwork {
  std::uint64_t graph_seed = 0;
  std::uint64_t simulation_seed = 0;
  NetworkSpec spec;
};

TrialNetwork trial_network(const ExperimentConfig& config, std::size_t trial) {
  TrialNetwork net;
  net.graph_seed = derive_seed(config.seed, {0, trial});
  net.simulation_seed = derive_seed(config.seed, {1, trial});
  net.spec.adjacency = config.graph.kind == GraphSource::Kind::fixed
                           ? config.graph.fixed
                           : generate_er_graph(config.graph.n, config.graph.p, net.graph_seed);
  net.spec.sigma = config.sigma;
  net.spec.map_param = config.map_param;
  return net;
}

TimeSeriesPanel simulate_trial(const ExperimentConfig& config, const TrialNetwork& net,
                               std::size_t keep) {
  SimulationOptions sim;
  sim.transient = config.transient;
  sim.keep = keep;
  sim.seed = net.simulation_seed;
  return simulate(net.spec, sim);
}

}  // namespace

TrialSummary summarize(std::size_t sample_size, std::span<const TrialRecord> records) {
  TrialSummary s;
  s.sample_size = sample_size;
  auto fold = [](std::optional<Stat>& stat, std::size_t& count, double v) {
    if (!stat) stat = Stat{0.0, std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity()};
    stat->mean += v;
    stat->min = std::min(stat->min, v);
    stat->max = std::max(stat->max, v);
    ++count;
  };
  std::size_t n_tpr = 0;
  std::size_t n_fpr = 0;
  for (const auto& r : records) {
    if (r.sample_size != sample_size) continue;
    ++s.trials;
    if (r.error) continue;
    ++s.completed;
    if (r.tpr) fold(s.tpr, n_tpr, *r.tpr);
    if (r.fpr) fold(s.fpr, n_fpr, *r.fpr);
  }
  if (s.tpr) s.tpr->mean /= static_cast<double>(n_tpr);
  if (s.fpr) s.fpr->mean /= static_cast<double>(n_fpr);
  return s;
}

ExperimentResult run_trials(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n_sizes = config.sample_sizes.size();
  const std::size_t max_size =
      *std::max_element(config.sample_sizes.begin(), config.sample_sizes.end());

  ExperimentResult result;
  result.records.resize(config.trials * n_sizes);
  InferenceOptions inner = config.inference;
  inner.threads = 1;

  parallel_for(config.trials, config.inference.threads, [&](std::size_t trial) {
    const auto net = trial_network(config, trial);
    std::optional<TimeSeriesPanel> full;
    std::optional<std::string> sim_error;
    try {
      full = simulate_trial(config, net, max_size);
    } catch (const Error& e) {
      sim_error = e.what();
    }
    for (std::size_t s = 0; s < n_sizes; ++s) {
      TrialRecord& r = result.records[s * config.trials + trial];
      r.sample_size = config.sample_sizes[s];
      r.trial = trial;
      r.graph_seed = net.graph_seed;
      r.simulation_seed = net.simulation_seed;
      r.truth = net.spec.adjacency;
      r.true_edges = r.truth.edge_count();
      if (sim_error) {
        r.error = *sim_error;
        continue;
      }
      try {
        const auto panel = full->truncated(r.sample_size);
        const auto inferred = infer_network(panel, inner);
        r.estimate = inferred.adjacency;
        r.node_failures = inferred.failures.size();
        r.counts = confusion(r.estimate, r.truth);
        r.tpr = r.counts->tpr();
        r.fpr = r.counts->fpr();
        if (!inferred.complete()) {
          r.error = std::to_string(r.node_failures) +
                    " node(s) failed: " + inferred.failures.front().message;
        }
      } catch (const Error& e) {
        r.error = e.what();
      }
    }
  });

  for (auto t : config.sample_sizes) result.summaries.push_back(summarize(t, result.records));
  return result;
}

std::vector<RocCurve> run_roc(const ExperimentConfig& config) {
  config.validate();
  if (config.roc_thetas.empty()) throw ValidationError("ROC run needs at least one theta");
  const auto net = trial_network(config, 0);
  const std::size_t max_size =
      *std::max_element(config.sample_sizes.begin(), config.sample_sizes.end());
  const auto full = simulate_trial(config, net, max_size);

  std::vector<RocCurve> curves;
  for (auto t : config.sample_sizes) {
    RocCurve curve;
    curve.sample_size = t;
    curve.graph_seed = net.graph_seed;
    curve.simulation_seed = net.simulation_seed;
    curve.truth = net.spec.adjacency;
    curve.points = roc_sweep(full.truncated(t), curve.truth, config.roc_thetas, config.inference);
    curves.push_back(std::move(curve));
  }
  return curves;
}

}  // namespace geocausal
