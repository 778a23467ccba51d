#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "geocausal/adjacency.hpp"
#include "geocausal/panel.hpp"

namespace geocausal {

/// Coupling function g(x_i, x_j).
enum class CouplingKind {
  /// g = f(x_j) - f(x_i)
  map_difference,
  /// g = x_j - x_i
  state_difference,
};

/// Logistic map a x (1 - x). Throws ValidationError outside 0 <= x <= 1,
/// 0 < a <= 4.
double logistic_step(double x, double a);

/// Network of identical logistic maps with diffusive coupling:
///   x'_i = f(x_i) + sigma * sum_{j != i} a_ij kappa g(x_i, x_j)
struct NetworkSpec {
  AdjacencyMatrix adjacency;
  double sigma = 0.1;
  double map_param = 4.0;
  std::size_t state_dim = 1;
  /// Row-major state_dim x state_dim inner coupling; empty means identity.
  std::vector<double> kappa;
  CouplingKind coupling = CouplingKind::map_difference;

  std::size_t n_nodes() const noexcept { return adjacency.size(); }

  /// Throws ValidationError on sigma < 0, a outside (0, 4], bad kappa shape.
  void validate() const;
};

/// Per-node state vectors, node-major: state[i * d + k].
using NetworkState = std::vector<double>;

NetworkState step_network(const NetworkState& state, const NetworkSpec& spec);

struct SimulationOptions {
  std::size_t transient = 1000;
  std::size_t keep = 10000;
  std::uint64_t seed = 0;
  /// Initial states; drawn uniformly from (0, 1) with `seed` when absent.
  std::optional<NetworkState> x0;
};

/// Iterates step_network transient + keep - 1 times and returns the last
/// `keep` states. Throws TrajectoryEscape as soon as a state leaves [0, 1].
TimeSeriesPanel simulate(const NetworkSpec& spec, const SimulationOptions& options);

/// Directed Erdos-Renyi graph: every ordered off-diagonal pair gets an edge
/// with probability p.
AdjacencyMatrix generate_er_graph(std::size_t n, double p, std::uint64_t seed);

}  // namespace geocausal
