#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geocausal/adjacency.hpp"
#include "geocausal/dynamics.hpp"
#include "geocausal/ogeoc.hpp"

namespace geocausal {

/// Outcome counts over ordered off-diagonal pairs.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  /// Absent when the truth has no edges.
  std::optional<double> tpr() const;
  /// Absent when the truth is complete.
  std::optional<double> fpr() const;
};

ConfusionCounts confusion(const AdjacencyMatrix& estimate, const AdjacencyMatrix& truth);

struct RocPoint {
  double theta = 0.0;
  std::optional<double> tpr;
  std::optional<double> fpr;
  std::optional<std::string> error;
};

/// infer_network once per theta on the same panel. Dimension estimates and
/// surrogate distributions are shared across the sweep, so every theta sees
/// identical shuffle draws.
std::vector<RocPoint> roc_sweep(const TimeSeriesPanel& panel, const AdjacencyMatrix& truth,
                                std::span<const double> thetas, const InferenceOptions& base);

struct GraphSource {
  enum class Kind { erdos_renyi, fixed };
  Kind kind = Kind::erdos_renyi;
  std::size_t n = 20;
  double p = 0.1;
  AdjacencyMatrix fixed;
};

struct ExperimentConfig {
  GraphSource graph;
  double sigma = 0.1;
  double map_param = 4.0;
  std::size_t transient = 1000;
  std::vector<std::size_t> sample_sizes{1000};
  std::size_t trials = 10;
  InferenceOptions inference;
  /// Significance levels for ROC sweeps; empty for plain trials.
  std::vector<double> roc_thetas;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrialRecord {
  std::size_t sample_size = 0;
  std::size_t trial = 0;
  std::uint64_t graph_seed = 0;
  std::uint64_t simulation_seed = 0;
  std::size_t true_edges = 0;
  std::optional<ConfusionCounts> counts;
  std::optional<double> tpr;
  std::optional<double> fpr;
  std::size_t node_failures = 0;
  std::optional<std::string> error;
  AdjacencyMatrix truth;
  AdjacencyMatrix estimate;
};

struct Stat {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct TrialSummary {
  std::size_t sample_size = 0;
  std::size_t trials = 0;
  std::size_t completed = 0;
  std::optional<Stat> tpr;
  std::optional<Stat> fpr;
};

/// Mean/min/max over the completed records with a defined rate.
TrialSummary summarize(std::size_t sample_size, std::span<const TrialRecord> records);

struct ExperimentResult {
  std::vector<TrialRecord> records;
  std::vector<TrialSummary> summaries;
};

/// For each trial a fresh graph and initial condition are drawn (the same
/// ones for every sample size, so sizes are compared on paired networks);
/// each is simulated, inferred and scored. Failed trials are recorded and
/// left out of the aggregates.
ExperimentResult run_trials(const ExperimentConfig& config);

struct RocCurve {
  std::size_t sample_size = 0;
  std::uint64_t graph_seed = 0;
  std::uint64_t simulation_seed = 0;
  AdjacencyMatrix truth;
  std::vector<RocPoint> points;
};

/// One network (the trial-0 graph and initial condition) swept over
/// config.roc_thetas at every sample size.
std::vector<RocCurve> run_roc(const ExperimentConfig& config);

}  // namespace geocausal
