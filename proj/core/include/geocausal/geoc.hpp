#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "geocausal/corrdim.hpp"
#include "geocausal/panel.hpp"
#include "geocausal/point_cloud.hpp"

namespace geocausal {

/// Ordered list of distinct node ids. Listing order fixes the coordinate
/// order of embeddings built from it.
using NodeSet = std::vector<std::size_t>;

/// Throws ValidationError on duplicates or ids >= n_nodes.
void validate_node_set(const NodeSet& nodes, std::size_t n_nodes, const char* what);

bool is_subset(const NodeSet& inner, const NodeSet& outer);

/// `base` followed by the members of `extra` not already in it.
NodeSet merge_nodes(const NodeSet& base, const NodeSet& extra);

/// One block of embedding coordinates: a node's series (n_steps x state_dim,
/// time-major) read at time n + 1 (future) or n (past).
struct SeriesColumn {
  std::span<const double> series;
  std::size_t state_dim = 1;
  bool future = false;
};

/// Lag-one embedding with n_steps - 1 points; point n concatenates every
/// column in order.
PointCloud build_cloud(std::span<const SeriesColumn> columns, std::size_t n_steps);

/// Point n holds x_{n+1} of every target node followed by x_n of every
/// conditioner. Throws ValidationError when both sets are empty.
PointCloud build_embedding(const TimeSeriesPanel& panel, const NodeSet& target,
                           const NodeSet& conditioners);

/// GeoC_{J->I|K} together with the four correlation dimensions it is built
/// from: value = (d2_target_given_k - d2_k) - (d2_target_given_jk - d2_jk).
struct GeoCValue {
  double value = 0.0;
  double d2_target_given_k = 0.0;
  double d2_k = 0.0;
  double d2_target_given_jk = 0.0;
  double d2_jk = 0.0;
  /// J was a subset of K and nothing was estimated.
  bool reduced = false;
};

struct EstimatorConfig {
  RadiusGrid grid;
  CorrDimOptions corrdim;
};

/// Thread-safe memo of correlation dimensions keyed by panel fingerprint,
/// embedding composition, grid and estimator options. Entries are
/// deterministic, so concurrent duplicate inserts are harmless.
class DimensionCache {
 public:
  struct Key {
    std::uint64_t panel = 0;
    NodeSet target;
    NodeSet conditioners;
    EstimatorConfig config;

    bool operator==(const Key& other) const;
  };

  std::optional<DimEstimate> find(const Key& key) const;
  void insert(const Key& key, const DimEstimate& estimate);

  std::size_t size() const;
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  struct KeyHash {
    std::size_t operator()(const Key& key) const noexcept;
  };

  mutable std::mutex mutex_;
  std::unordered_map<Key, DimEstimate, KeyHash> entries_;
  mutable std::size_t hits_ = 0;
  mutable std::size_t misses_ = 0;
};

/// Correlation-dimension quantities on one panel. Holds a reference to the
/// panel, which must outlive the estimator.
class GeoCEstimator {
 public:
  GeoCEstimator(const TimeSeriesPanel& panel, EstimatorConfig config,
                std::shared_ptr<DimensionCache> cache = std::make_shared<DimensionCache>());

  const TimeSeriesPanel& panel() const noexcept { return *panel_; }
  const EstimatorConfig& config() const noexcept { return config_; }
  std::uint64_t panel_fingerprint() const noexcept { return fingerprint_; }
  const std::shared_ptr<DimensionCache>& cache() const noexcept { return cache_; }

  /// D2 of build_embedding(panel, target, conditioners), memoized.
  DimEstimate dimension(const NodeSet& target, const NodeSet& conditioners) const;

  /// Geo(X'_I | X_K) = D2(X'_I, X_K) - D2(X_K); the second term is 0 for an
  /// empty conditioning set.
  double geo_conditional(const NodeSet& target, const NodeSet& conditioners) const;

  /// GeoC_{J->I|K} = Geo(X'_I | X_K) - Geo(X'_I | X_K, X_J). Exactly zero
  /// without estimation when J is a subset of K.
  GeoCValue geoc(const NodeSet& source, const NodeSet& target, const NodeSet& cond) const;

 private:
  const TimeSeriesPanel* panel_;
  EstimatorConfig config_;
  std::shared_ptr<DimensionCache> cache_;
  std::uint64_t fingerprint_;
};

double geo_conditional(const TimeSeriesPanel& panel, const NodeSet& target,
                       const NodeSet& conditioners, const EstimatorConfig& config = {});

GeoCValue geoc(const TimeSeriesPanel& panel, const NodeSet& source, const NodeSet& target,
               const NodeSet& cond, const EstimatorConfig& config = {});

}  // namespace geocausal
