#include "geocausal/geoc.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "geocausal/error.hpp"

namespace geocausal {

void validate_node_set(const NodeSet& nodes, std::size_t n_nodes, const char* what) {
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    if (nodes[a] >= n_nodes) {
      throw ValidationError(std::string(what) + " contains node " + std::to_string(nodes[a]) +
                            " but the panel has " + std::to_string(n_nodes) + " nodes");
    }
    for (std::size_t b = 0; b < a; ++b) {
      if (nodes[a] == nodes[b]) {
        throw ValidationError(std::string(what) + " lists node " + std::to_string(nodes[a]) +
                              " twice");
      }
    }
  }
}

bool is_subset(const NodeSet& inner, const NodeSet& outer) {
  return std::all_of(inner.begin(), inner.end(), [&](std::size_t v) {
    return std::find(outer.begin(), outer.end(), v) != outer.end();
  });
}

NodeSet merge_nodes(const NodeSet& base, const NodeSet& extra) {
  NodeSet out = base;
  for (std::size_t v : extra)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

PointCloud build_cloud(std::span<const SeriesColumn> columns, std::size_t n_steps) {
  if (columns.empty()) throw ValidationError("an embedding needs at least one column");
  if (n_steps < 3) throw ValidationError("an embedding needs at least 3 time steps");
  std::size_t dim = 0;
  for (const auto& c : columns) {
    if (c.state_dim == 0 || c.series.size() != n_steps * c.state_dim) {
      throw ValidationError("embedding column does not match the number of time steps");
    }
    dim += c.state_dim;
  }
  const std::size_t n_points = n_steps - 1;
  std::vector<double> coords(n_points * dim);
  std::size_t offset = 0;
  for (const auto& c : columns) {
    const std::size_t shift = c.future ? 1 : 0;
    for (std::size_t n = 0; n < n_points; ++n)
      for (std::size_t k = 0; k < c.state_dim; ++k)
        coords[n * dim + offset + k] = c.series[(n + shift) * c.state_dim + k];
    offset += c.state_dim;
  }
  return PointCloud(n_points, dim, std::move(coords));
}

PointCloud build_embedding(const TimeSeriesPanel& panel, const NodeSet& target,
                           const NodeSet& conditioners) {
  if (target.empty() && conditioners.empty()) {
    throw ValidationError("embedding needs a target or a conditioning node");
  }
  validate_node_set(target, panel.n_nodes(), "target set");
  validate_node_set(conditioners, panel.n_nodes(), "conditioning set");
  std::vector<SeriesColumn> columns;
  columns.reserve(target.size() + conditioners.size());
  for (std::size_t v : target) columns.push_back({panel.series(v), panel.state_dim(), true});
  for (std::size_t v : conditioners) columns.push_back({panel.series(v), panel.state_dim(), false});
  return build_cloud(columns, panel.n_steps());
}

bool DimensionCache::Key::operator==(const Key& other) const {
  return panel == other.panel && target == other.target && conditioners == other.conditioners &&
         config.grid == other.config.grid && config.corrdim == other.config.corrdim;
}

std::size_t DimensionCache::KeyHash::operator()(const Key& key) const noexcept {
  std::uint64_t h = key.panel;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  mix(key.target.size());
  for (auto v : key.target) mix(v);
  mix(key.conditioners.size());
  for (auto v : key.conditioners) mix(v);
  mix(std::bit_cast<std::uint64_t>(key.config.grid.eps_min));
  mix(std::bit_cast<std::uint64_t>(key.config.grid.eps_max));
  mix(key.config.grid.steps);
  mix(static_cast<std::uint64_t>(key.config.grid.spacing));
  mix(static_cast<std::uint64_t>(key.config.corrdim.norm));
  mix(key.config.corrdim.theiler_window);
  mix(key.config.corrdim.auto_region ? 1 : 0);
  return static_cast<std::size_t>(h);
}

std::optional<DimEstimate> DimensionCache::find(const Key& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second;
}

void DimensionCache::insert(const Key& key, const DimEstimate& estimate) {
  std::lock_guard lock(mutex_);
  entries_.emplace(key, estimate);
}

std::size_t DimensionCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::size_t DimensionCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::size_t DimensionCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

GeoCEstimator::GeoCEstimator(const TimeSeriesPanel& panel, EstimatorConfig config,
                             std::shared_ptr<DimensionCache> cache)
    : panel_(&panel),
      config_(std::move(config)),
      cache_(cache ? std::move(cache) : std::make_shared<DimensionCache>()),
      fingerprint_(panel.fingerprint()) {
  config_.grid.validate();
}

DimEstimate GeoCEstimator::dimension(const NodeSet& target, const NodeSet& conditioners) const {
  DimensionCache::Key key{fingerprint_, target, conditioners, config_};
  if (auto hit = cache_->find(key)) return *hit;
  const auto cloud = build_embedding(*panel_, target, conditioners);
  const auto estimate = correlation_dimension(cloud, config_.grid, config_.corrdim);
  cache_->insert(key, estimate);
  return estimate;
}

double GeoCEstimator::geo_conditional(const NodeSet& target, const NodeSet& conditioners) const {
  if (target.empty()) throw ValidationError("target set must not be empty");
  const double joint = dimension(target, conditioners).d2;
  return conditioners.empty() ? joint : joint - dimension({}, conditioners).d2;
}

GeoCValue GeoCEstimator::geoc(const NodeSet& source, const NodeSet& target,
                              const NodeSet& cond) const {
  const std::size_t n = panel_->n_nodes();
  if (source.empty()) throw ValidationError("source set must not be empty");
  if (target.empty()) throw ValidationError("target set must not be empty");
  validate_node_set(source, n, "source set");
  validate_node_set(target, n, "target set");
  validate_node_set(cond, n, "conditioning set");

  GeoCValue out;
  if (is_subset(source, cond)) {
    out.reduced = true;
    return out;
  }
  const NodeSet joint = merge_nodes(cond, source);
  out.d2_target_given_k = dimension(target, cond).d2;
  out.d2_k = cond.empty() ? 0.0 : dimension({}, cond).d2;
  out.d2_target_given_jk = dimension(target, joint).d2;
  out.d2_jk = dimension({}, joint).d2;
  out.value = (out.d2_target_given_k - out.d2_k) - (out.d2_target_given_jk - out.d2_jk);
  return out;
}

double geo_conditional(const TimeSeriesPanel& panel, const NodeSet& target,
                       const NodeSet& conditioners, const EstimatorConfig& config) {
  return GeoCEstimator(panel, config).geo_conditional(target, conditioners);
}

GeoCValue geoc(const TimeSeriesPanel& panel, const NodeSet& source, const NodeSet& target,
               const NodeSet& cond, const EstimatorConfig& config) {
  return GeoCEstimator(panel, config).geoc(source, target, cond);
}

}  // namespace geocausal
