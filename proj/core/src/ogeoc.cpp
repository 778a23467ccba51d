#include "geocausal/ogeoc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "geocausal/parallel.hpp"
#include "geocausal/random.hpp"

namespace geocausal {

void ShuffleConfig::validate() const {
  if (n_permutations < 1) throw ValidationError("n_permutations must be at least 1");
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("theta must lie in (0, 1)");
}

std::size_t threshold_index(std::size_t n_permutations, double theta) {
  if (n_permutations < 1) throw ValidationError("n_permutations must be at least 1");
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("theta must lie in (0, 1)");
  const auto index = static_cast<std::size_t>(static_cast<double>(n_permutations) * (1.0 - theta));
  return std::min(index, n_permutations - 1);
}

double threshold_from_surrogates(std::vector<double> surrogates, double theta) {
  if (surrogates.empty()) throw ValidationError("no surrogate values");
  const std::size_t k = threshold_index(surrogates.size(), theta);
  std::nth_element(surrogates.begin(), surrogates.begin() + static_cast<std::ptrdiff_t>(k),
                   surrogates.end());
  return surrogates[k];
}

bool SurrogateCache::Key::operator==(const Key& other) const {
  return panel == other.panel && target == other.target && source == other.source &&
         cond == other.cond && n_permutations == other.n_permutations && seed == other.seed &&
         config.grid == other.config.grid && config.corrdim == other.config.corrdim;
}

std::size_t SurrogateCache::KeyHash::operator()(const Key& key) const noexcept {
  std::uint64_t h = key.panel;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  mix(key.target);
  mix(key.source);
  for (auto v : key.cond) mix(v);
  mix(key.n_permutations);
  mix(key.seed);
  mix(std::bit_cast<std::uint64_t>(key.config.grid.eps_min));
  mix(std::bit_cast<std::uint64_t>(key.config.grid.eps_max));
  mix(key.config.grid.steps);
  return static_cast<std::size_t>(h);
}

std::optional<std::vector<double>> SurrogateCache::find(const Key& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void SurrogateCache::insert(const Key& key, const std::vector<double>& sorted) {
  std::lock_guard lock(mutex_);
  entries_.emplace(key, sorted);
}

std::vector<double> surrogate_geoc(const GeoCEstimator& estimator, std::size_t target,
                                   std::size_t source, const NodeSet& cond,
                                   std::size_t n_permutations, std::uint64_t seed,
                                   std::size_t threads) {
  const auto& panel = estimator.panel();
  const auto& config = estimator.config();
  validate_node_set({target}, panel.n_nodes(), "target set");
  validate_node_set({source}, panel.n_nodes(), "source set");
  validate_node_set(cond, panel.n_nodes(), "conditioning set");
  if (std::find(cond.begin(), cond.end(), source) != cond.end()) {
    throw ValidationError("shuffle test source node " + std::to_string(source) +
                          " is already in the conditioning set");
  }
  if (n_permutations < 1) throw ValidationError("n_permutations must be at least 1");

  const double base = estimator.geo_conditional({target}, cond);
  const NodeSet joint = merge_nodes(cond, {source});
  const std::size_t n_steps = panel.n_steps();
  const std::size_t sd = panel.state_dim();

  std::vector<double> values(n_permutations);
  parallel_for(n_permutations, threads, [&](std::size_t p) {
    Rng rng(derive_seed(seed, {p}));
    const auto perm = rng.permutation(n_steps);
    const auto original = panel.series(source);
    std::vector<double> shuffled(original.size());
    for (std::size_t t = 0; t < n_steps; ++t)
      for (std::size_t k = 0; k < sd; ++k) shuffled[t * sd + k] = original[perm[t] * sd + k];

    std::vector<SeriesColumn> columns;
    columns.push_back({panel.series(target), sd, true});
    for (std::size_t v : joint) {
      columns.push_back({v == source ? std::span<const double>(shuffled) : panel.series(v), sd,
                         false});
    }
    const auto with_target = build_cloud(columns, n_steps);
    const auto without_target =
        build_cloud(std::span<const SeriesColumn>(columns).subspan(1), n_steps);
    const double d2_tjk = correlation_dimension(with_target, config.grid, config.corrdim).d2;
    const double d2_jk = correlation_dimension(without_target, config.grid, config.corrdim).d2;
    values[p] = base - (d2_tjk - d2_jk);
  });
  std::sort(values.begin(), values.end());
  return values;
}

namespace {

std::vector<double> cached_surrogates(const GeoCEstimator& estimator, std::size_t target,
                                      std::size_t source, const NodeSet& cond,
                                      const ShuffleConfig& config, std::size_t threads,
                                      SurrogateCache* cache) {
  SurrogateCache::Key key{estimator.panel_fingerprint(), target, source, cond,
                          config.n_permutations, config.seed, estimator.config()};
  if (cache) {
    if (auto hit = cache->find(key)) return *hit;
  }
  auto values = surrogate_geoc(estimator, target, source, cond, config.n_permutations,
                               config.seed, threads);
  if (cache) cache->insert(key, values);
  return values;
}

NodeSet backward_node(const GeoCEstimator& estimator, std::size_t node, const NodeSet& candidates,
                      double eps_backward) {
  NodeSet kept;
  for (std::size_t j : candidates) {
    NodeSet rest;
    for (std::size_t v : candidates)
      if (v != j) rest.push_back(v);
    if (estimator.geoc({j}, {node}, rest).value > eps_backward) kept.push_back(j);
  }
  return kept;
}

}  // namespace

double shuffle_threshold(const GeoCEstimator& estimator, std::size_t target, std::size_t source,
                         const NodeSet& cond, const ShuffleConfig& config, std::size_t threads) {
  config.validate();
  const auto values = surrogate_geoc(estimator, target, source, cond, config.n_permutations,
                                     config.seed, threads);
  return values[threshold_index(values.size(), config.theta)];
}

ForwardResult forward_geoc(const GeoCEstimator& estimator, std::size_t node,
                           const InferenceOptions& options, SurrogateCache* surrogates) {
  options.shuffle.validate();
  const std::size_t n = estimator.panel().n_nodes();
  validate_node_set({node}, n, "target set");

  ForwardResult result;
  NodeSet& k_set = result.candidates;
  for (std::size_t t = 0;; ++t) {
    ForwardStep step;
    step.conditioning = k_set;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == node && !options.self_candidates) continue;
      if (std::find(k_set.begin(), k_set.end(), j) != k_set.end()) continue;
      step.scores.push_back({j, 0.0});
    }
    if (step.scores.empty()) break;

    std::vector<double> scores(step.scores.size());
    parallel_for(scores.size(), options.threads, [&](std::size_t c) {
      scores[c] = estimator.geoc({step.scores[c].node}, {node}, k_set).value;
    });
    std::size_t best = 0;
    for (std::size_t c = 0; c < scores.size(); ++c) {
      step.scores[c].geoc = scores[c];
      if (scores[c] > scores[best]) best = c;
    }
    step.best = step.scores[best].node;
    step.max_geoc = scores[best];

    ShuffleConfig shuffle = options.shuffle;
    shuffle.seed = derive_seed(options.shuffle.seed, {node, t});
    const auto values = cached_surrogates(estimator, node, step.best, k_set, shuffle,
                                          options.threads, surrogates);
    step.threshold = values[threshold_index(values.size(), shuffle.theta)];
    step.accepted = step.max_geoc > step.threshold;
    result.trace.steps.push_back(step);
    if (!step.accepted) break;
    k_set.push_back(step.best);
  }
  return result;
}

BackwardResult backward_geoc(const GeoCEstimator& estimator,
                             const std::vector<NodeSet>& candidates, double eps_backward,
                             std::size_t threads) {
  const std::size_t n = estimator.panel().n_nodes();
  if (candidates.size() != n) {
    throw ValidationError("candidate sets must be given for every node");
  }
  for (const auto& c : candidates) validate_node_set(c, n, "candidate set");

  BackwardResult result{std::vector<NodeSet>(n), AdjacencyMatrix(n)};
  parallel_for(n, threads, [&](std::size_t i) {
    result.parents[i] = backward_node(estimator, i, candidates[i], eps_backward);
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : result.parents[i])
      if (j != i) result.adjacency.set(i, j, true);
  return result;
}

InferenceResult infer_network(const GeoCEstimator& estimator, const InferenceOptions& options,
                              SurrogateCache* surrogates) {
  options.shuffle.validate();
  if (!std::isfinite(options.eps_backward)) {
    throw ValidationError("eps_backward must be finite");
  }
  const std::size_t n = estimator.panel().n_nodes();
  const std::size_t threads = resolve_threads(options.threads);
  // Nodes are spread over the workers; each node then runs single-threaded.
  InferenceOptions inner = options;
  inner.threads = 1;

  InferenceResult result;
  result.candidates.resize(n);
  result.parents.resize(n);
  result.traces.resize(n);
  result.adjacency = AdjacencyMatrix(n);
  result.eps_backward = options.eps_backward;
  std::vector<std::optional<NodeFailure>> failures(n);

  parallel_for(n, threads, [&](std::size_t i) {
    try {
      auto forward = forward_geoc(estimator, i, inner, surrogates);
      result.candidates[i] = std::move(forward.candidates);
      result.traces[i] = std::move(forward.trace);
      result.parents[i] =
          backward_node(estimator, i, result.candidates[i], options.eps_backward);
    } catch (const Error& e) {
      result.candidates[i].clear();
      result.parents[i].clear();
      failures[i] = NodeFailure{i, e.kind(), e.what()};
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (failures[i]) {
      result.failures.push_back(*failures[i]);
      continue;
    }
    for (std::size_t j : result.parents[i])
      if (j != i) result.adjacency.set(i, j, true);
  }
  return result;
}

InferenceResult infer_network(const TimeSeriesPanel& panel, const InferenceOptions& options) {
  GeoCEstimator estimator(panel, options.estimator);
  SurrogateCache surrogates;
  return infer_network(estimator, options, &surrogates);
}

}  // namespace geocausal
