#include "geocausal/panel.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "geocausal/error.hpp"

namespace geocausal {

TimeSeriesPanel::TimeSeriesPanel(std::size_t n_nodes, std::size_t n_steps,
                                 std::size_t state_dim, std::vector<double> values)
    : n_nodes_(n_nodes), n_steps_(n_steps), state_dim_(state_dim), values_(std::move(values)) {
  if (n_nodes_ == 0) throw ValidationError("panel needs at least one node");
  if (state_dim_ == 0) throw ValidationError("panel state dimension must be positive");
  if (n_steps_ < 2) {
    throw ValidationError("panel needs at least 2 time steps, got " + std::to_string(n_steps_));
  }
  if (values_.size() != n_nodes_ * n_steps_ * state_dim_) {
    throw ValidationError("panel holds " + std::to_string(values_.size()) +
                          " values, expected " +
                          std::to_string(n_nodes_ * n_steps_ * state_dim_));
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      const std::size_t node = k / (n_steps_ * state_dim_);
      const std::size_t t = (k / state_dim_) % n_steps_;
      throw ValidationError("non-finite panel value at node " + std::to_string(node) +
                            ", time " + std::to_string(t));
    }
  }
}

TimeSeriesPanel TimeSeriesPanel::truncated(std::size_t steps) const {
  if (steps > n_steps_) {
    throw ValidationError("cannot truncate a " + std::to_string(n_steps_) + "-step panel to " +
                          std::to_string(steps) + " steps");
  }
  std::vector<double> out;
  out.reserve(n_nodes_ * steps * state_dim_);
  for (std::size_t i = 0; i < n_nodes_; ++i) {
    auto s = series(i);
    out.insert(out.end(), s.begin(), s.begin() + static_cast<std::ptrdiff_t>(steps * state_dim_));
  }
  return {n_nodes_, steps, state_dim_, std::move(out)};
}

TimeSeriesPanel TimeSeriesPanel::select_nodes(std::span<const std::size_t> nodes) const {
  std::vector<double> out;
  out.reserve(nodes.size() * n_steps_ * state_dim_);
  for (auto i : nodes) {
    if (i >= n_nodes_) throw ValidationError("node " + std::to_string(i) + " out of range");
    auto s = series(i);
    out.insert(out.end(), s.begin(), s.end());
  }
  return {nodes.size(), n_steps_, state_dim_, std::move(out)};
}

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= h >> 31;
  h *= 0xbf58476d1ce4e5b9ULL;
  return h;
}

}  // namespace

std::uint64_t TimeSeriesPanel::fingerprint() const noexcept {
  std::uint64_t h = mix(mix(mix(0x6a09e667f3bcc908ULL, n_nodes_), n_steps_), state_dim_);
  for (double v : values_) h = mix(h, std::bit_cast<std::uint64_t>(v));
  return h;
}

}  // namespace geocausal
