#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "geocausal/adjacency.hpp"
#include "geocausal/error.hpp"
#include "geocausal/geoc.hpp"

namespace geocausal {

/// Permutation test that decides whether a GeoC value is distinguishable
/// from zero.
struct ShuffleConfig {
  std::size_t n_permutations = 100;
  double theta = 0.01;
  std::uint64_t seed = 0;

  /// Throws ValidationError unless n_permutations >= 1 and 0 < theta < 1.
  void validate() const;
};

/// int(n_permutations * (1 - theta)): position of the threshold in the
/// ascending surrogate list.
std::size_t threshold_index(std::size_t n_permutations, double theta);

/// Element threshold_index(n, theta) of the ascending-sorted values.
double threshold_from_surrogates(std::vector<double> surrogates, double theta);

/// Memo of sorted surrogate distributions, so threshold sweeps over theta
/// reuse the same draws.
class SurrogateCache {
 public:
  struct Key {
    std::uint64_t panel = 0;
    std::size_t target = 0;
    std::size_t source = 0;
    NodeSet cond;
    std::size_t n_permutations = 0;
    std::uint64_t seed = 0;
    EstimatorConfig config;

    bool operator==(const Key& other) const;
  };

  std::optional<std::vector<double>> find(const Key& key) const;
  void insert(const Key& key, const std::vector<double>& sorted);

 private:
  struct KeyHash {
    std::size_t operator()(const Key& key) const noexcept;
  };

  mutable std::mutex mutex_;
  std::unordered_map<Key, std::vector<double>, KeyHash> entries_;
};

/// GeoC_{j*->i|K} for n_permutations time shuffles of node j's series,
/// sorted ascending. Permutation p draws from derive_seed(seed, {p}), so the
/// values do not depend on `threads`.
std::vector<double> surrogate_geoc(const GeoCEstimator& estimator, std::size_t target,
                                   std::size_t source, const NodeSet& cond,
                                   std::size_t n_permutations, std::uint64_t seed,
                                   std::size_t threads = 1);

/// Shuffle-test threshold for GeoC_{j->i|K}. Requires j not in K.
double shuffle_threshold(const GeoCEstimator& estimator, std::size_t target, std::size_t source,
                         const NodeSet& cond, const ShuffleConfig& config,
                         std::size_t threads = 1);

struct InferenceOptions {
  EstimatorConfig estimator;
  ShuffleConfig shuffle;
  double eps_backward = 0.01;
  /// Let a node's own past enter its conditioning set.
  bool self_candidates = true;
  /// 0 means all hardware threads.
  std::size_t threads = 0;
};

struct CandidateScore {
  std::size_t node = 0;
  double geoc = 0.0;
};

/// One iteration of the forward pass.
struct ForwardStep {
  NodeSet conditioning;                 // K at the start of the iteration
  std::vector<CandidateScore> scores;   // GeoC_{j->i|K} for every j tried
  std::size_t best = 0;
  double max_geoc = 0.0;
  double threshold = 0.0;
  bool accepted = false;
};

struct ForwardTrace {
  std::vector<ForwardStep> steps;
};

struct ForwardResult {
  NodeSet candidates;
  ForwardTrace trace;
};

/// Greedy discovery of the conditioning set of `node`: each iteration admits
/// the argmax candidate (ties to the lowest index) if its GeoC exceeds the
/// shuffle threshold, and stops at the first rejection. The shuffle test of
/// iteration t is seeded with derive_seed(shuffle.seed, {node, t}).
ForwardResult forward_geoc(const GeoCEstimator& estimator, std::size_t node,
                           const InferenceOptions& options,
                           SurrogateCache* surrogates = nullptr);

struct BackwardResult {
  std::vector<NodeSet> parents;
  AdjacencyMatrix adjacency;
};

/// Keeps j in the parent set of i iff GeoC_{j->i|K_i - {j}} > eps_backward.
/// Self-membership is kept in `parents` but never produces a diagonal entry.
BackwardResult backward_geoc(const GeoCEstimator& estimator,
                             const std::vector<NodeSet>& candidates, double eps_backward,
                             std::size_t threads = 1);

struct NodeFailure {
  std::size_t node = 0;
  ErrorKind kind = ErrorKind::estimation;
  std::string message;
};

struct InferenceResult {
  std::vector<NodeSet> candidates;
  std::vector<NodeSet> parents;
  AdjacencyMatrix adjacency;
  std::vector<ForwardTrace> traces;
  double eps_backward = 0.0;
  std::vector<NodeFailure> failures;

  bool complete() const noexcept { return failures.empty(); }
};

/// Forward pass for every node, then the backward pass. A node whose forward
/// pass fails is recorded in `failures` and contributes no edges.
InferenceResult infer_network(const GeoCEstimator& estimator, const InferenceOptions& options,
                              SurrogateCache* surrogates = nullptr);

InferenceResult infer_network(const TimeSeriesPanel& panel, const InferenceOptions& options);

}  // namespace geocausal
