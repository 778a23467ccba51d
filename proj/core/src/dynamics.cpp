#include "geocausal/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "geocausal/error.hpp"
#include "geocausal/random.hpp"

namespace geocausal {

TrajectoryEscape::TrajectoryEscape(std::size_t step, std::size_t node, double value)
    : Error(ErrorKind::trajectory_escape,
            [&] {
              std::ostringstream os;
              os.precision(17);
              os << "trajectory escaped [0, 1] at step " << step << " (node " << node
                 << ", value " << value << "); reduce the coupling strength";
              return os.str();
            }()),
      step_(step),
      node_(node),
      value_(value) {}

namespace {

void check_map_param(double a) {
  if (!(a > 0.0 && a <= 4.0)) {
    throw ValidationError("logistic parameter must lie in (0, 4], got " + std::to_string(a));
  }
}

bool in_domain(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

double logistic_step(double x, double a) {
  check_map_param(a);
  if (!in_domain(x)) {
    throw ValidationError("logistic state must lie in [0, 1], got " + std::to_string(x));
  }
  return a * x * (1.0 - x);
}

void NetworkSpec::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("coupling strength sigma must be finite and >= 0");
  }
  check_map_param(map_param);
  if (state_dim == 0) throw ValidationError("state dimension must be positive");
  if (!kappa.empty() && kappa.size() != state_dim * state_dim) {
    throw ValidationError("inner coupling matrix must be " + std::to_string(state_dim) + "x" +
                          std::to_string(state_dim));
  }
  if (adjacency.size() == 0) throw ValidationError("network has no nodes");
}

NetworkState step_network(const NetworkState& state, const NetworkSpec& spec) {
  const std::size_t n = spec.n_nodes();
  const std::size_t d = spec.state_dim;
  if (state.size() != n * d) {
    throw ValidationError("state has " + std::to_string(state.size()) + " values, network needs " +
                          std::to_string(n * d));
  }
  const double a = spec.map_param;

  NetworkState mapped(state.size());
  for (std::size_t k = 0; k < state.size(); ++k) mapped[k] = a * state[k] * (1.0 - state[k]);
  const NetworkState& basis =
      spec.coupling == CouplingKind::map_difference ? mapped : state;

  NetworkState next = mapped;
  if (spec.sigma == 0.0) return next;

  // Coupling terms are summed in ascending order of value, which makes the
  // result independent of node labelling (relabelled networks give
  // bit-identical trajectories).
  std::vector<double> g(d);
  std::vector<double> terms;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      terms.clear();
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && spec.adjacency.at(i, j)) terms.push_back(basis[j * d + k] - basis[i * d + k]);
      }
      std::sort(terms.begin(), terms.end());
      double sum = 0.0;
      for (double t : terms) sum += t;
      g[k] = sum;
    }
    for (std::size_t r = 0; r < d; ++r) {
      double coupled = 0.0;
      if (spec.kappa.empty()) {
        coupled = g[r];
      } else {
        for (std::size_t c = 0; c < d; ++c) coupled += spec.kappa[r * d + c] * g[c];
      }
      next[i * d + r] += spec.sigma * coupled;
    }
  }
  return next;
}

TimeSeriesPanel simulate(const NetworkSpec& spec, const SimulationOptions& options) {
  spec.validate();
  if (options.keep < 2) throw ValidationError("simulation must keep at least 2 steps");
  const std::size_t n = spec.n_nodes();
  const std::size_t d = spec.state_dim;

  NetworkState x;
  if (options.x0) {
    x = *options.x0;
    if (x.size() != n * d) {
      throw ValidationError("initial state has " + std::to_string(x.size()) +
                            " values, network needs " + std::to_string(n * d));
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (!in_domain(x[k])) {
        throw ValidationError("initial state of node " + std::to_string(k / d) +
                              " lies outside [0, 1]");
      }
    }
  } else {
    Rng rng(options.seed);
    x.resize(n * d);
    for (auto& v : x) v = rng.uniform_open();
  }

  const std::size_t total = options.transient + options.keep;
  std::vector<double> values(n * options.keep * d);
  for (std::size_t step = 0; step < total; ++step) {
    if (step > 0) {
      x = step_network(x, spec);
      for (std::size_t k = 0; k < x.size(); ++k) {
        if (!in_domain(x[k])) throw TrajectoryEscape(step, k / d, x[k]);
      }
    }
    if (step >= options.transient) {
      const std::size_t t = step - options.transient;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k)
          values[(i * options.keep + t) * d + k] = x[i * d + k];
    }
  }
  return {n, options.keep, d, std::move(values)};
}

AdjacencyMatrix generate_er_graph(std::size_t n, double p, std::uint64_t seed) {
  if (n == 0) throw ValidationError("graph needs at least one node");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("edge probability must lie in [0, 1]");
  Rng rng(seed);
  AdjacencyMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (rng.uniform() < p) a.set(i, j);
    }
  }
  return a;
}

}  // namespace geocausal
