#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace geocausal {

/// Observed trajectories of a network: n_nodes x n_steps x state_dim values,
/// stored node-major so that one node's series is contiguous.
class TimeSeriesPanel {
 public:
  TimeSeriesPanel() = default;

  /// Validates shape (n_steps >= 2, matching value count) and finiteness.
  TimeSeriesPanel(std::size_t n_nodes, std::size_t n_steps, std::size_t state_dim,
                  std::vector<double> values);

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t state_dim() const noexcept { return state_dim_; }

  double value(std::size_t node, std::size_t t, std::size_t dim = 0) const {
    return values_[(node * n_steps_ + t) * state_dim_ + dim];
  }

  /// n_steps * state_dim values of one node, time-major.
  std::span<const double> series(std::size_t node) const {
    return {values_.data() + node * n_steps_ * state_dim_, n_steps_ * state_dim_};
  }

  std::span<const double> values() const noexcept { return values_; }

  /// First `steps` time points of every node.
  TimeSeriesPanel truncated(std::size_t steps) const;

  /// Nodes listed in `nodes` become nodes 0..k-1 of the result.
  TimeSeriesPanel select_nodes(std::span<const std::size_t> nodes) const;

  /// Content hash over shape and value bits; identifies a panel in caches.
  std::uint64_t fingerprint() const noexcept;

  friend bool operator==(const TimeSeriesPanel&, const TimeSeriesPanel&) = default;

 private:
  std::size_t n_nodes_ = 0;
  std::size_t n_steps_ = 0;
  std::size_t state_dim_ = 0;
  std::vector<double> values_;
};

}  // namespace geocausal
