#include <doctest.h>

#include <cmath>

#include "geocausal/dynamics.hpp"
#include "geocausal/error.hpp"
#include "geocausal/random.hpp"

using namespace geocausal;

TEST_CASE("logistic step") {
  CHECK(logistic_step(0.5, 4.0) == 1.0);
  CHECK(logistic_step(0.0, 4.0) == 0.0);
  CHECK(logistic_step(0.2, 4.0) == doctest::Approx(0.64));
  CHECK_THROWS_AS(logistic_step(1.1, 4.0), ValidationError);
  CHECK_THROWS_AS(logistic_step(-0.1, 4.0), ValidationError);
  CHECK_THROWS_AS(logistic_step(0.5, 4.5), ValidationError);
  CHECK_THROWS_AS(logistic_step(0.5, 0.0), ValidationError);
}

TEST_CASE("two-node coupled update") {
  NetworkSpec spec;
  spec.adjacency = AdjacencyMatrix::from_edges(2, {{0, 1}});
  const auto next = step_network({0.2, 0.3}, spec);
  CHECK(next[0] == doctest::Approx(0.64));
  CHECK(next[1] == doctest::Approx(0.82));
}

TEST_CASE("state-difference coupling") {
  NetworkSpec spec;
  spec.adjacency = AdjacencyMatrix::from_edges(2, {{0, 1}});
  spec.coupling = CouplingKind::state_difference;
  const auto next = step_network({0.2, 0.3}, spec);
  CHECK(next[1] == doctest::Approx(0.84 + 0.1 * (0.2 - 0.3)));
}

TEST_CASE("decoupled and synchronized limits") {
  NetworkSpec spec;
  spec.adjacency = AdjacencyMatrix::from_edges(3, {{0, 1}, {1, 2}, {2, 0}});
  spec.sigma = 0.0;
  const auto free = step_network({0.1, 0.2, 0.7}, spec);
  CHECK(free[0] == logistic_step(0.1, 4.0));
  CHECK(free[1] == logistic_step(0.2, 4.0));
  CHECK(free[2] == logistic_step(0.7, 4.0));

  spec.sigma = 0.3;
  const auto sync = step_network({0.37, 0.37, 0.37}, spec);
  for (double v : sync) CHECK(v == logistic_step(0.37, 4.0));
}

TEST_CASE("step_network rejects a mismatched state") {
  NetworkSpec spec;
  spec.adjacency = AdjacencyMatrix(3);
  CHECK_THROWS_AS(step_network({0.1, 0.2}, spec), ValidationError);
}

TEST_CASE("simulate from the critical point") {
  NetworkSpec spec;
  spec.adjacency = AdjacencyMatrix(1);
  spec.sigma = 0.0;
  SimulationOptions options;
  options.transient = 0;
  options.keep = 3;
  options.x0 = NetworkState{0.5};
  const auto panel = simulate(spec, options);
  CHECK(panel.n_steps() == 3);
  CHECK(panel.value(0, 0) == 0.5);
  CHECK(panel.value(0, 1) == 1.0);
  CHECK(panel.value(0, 2) == 0.0);
}

TEST_CASE("simulate discards the transient") {
  NetworkSpec spec;
  spec.adjacency = AdjacencyMatrix::from_edges(2, {{0, 1}});
  SimulationOptions full;
  full.transient = 0;
  full.keep = 60;
  full.seed = 9;
  SimulationOptions tail = full;
  tail.transient = 20;
  tail.keep = 40;
  const auto a = simulate(spec, full);
  const auto b = simulate(spec, tail);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t t = 0; t < 40; ++t) CHECK(b.value(i, t) == a.value(i, t + 20));
}

TEST_CASE("simulation is deterministic in the seed") {
  NetworkSpec spec;
  spec.adjacency = generate_er_graph(10, 0.2, 3);
  SimulationOptions options;
  options.keep = 500;
  options.seed = 77;
  CHECK(simulate(spec, options) == simulate(spec, options));
  options.seed = 78;
  const auto other = simulate(spec, options);
  options.seed = 77;
  CHECK_FALSE(simulate(spec, options) == other);
}

TEST_CASE("initial conditions avoid the endpoints") {
  NetworkSpec spec;
  spec.adjacency = AdjacencyMatrix(50);
  SimulationOptions options;
  options.transient = 0;
  options.keep = 2;
  options.seed = 5;
  const auto panel = simulate(spec, options);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(panel.value(i, 0) > 0.0);
    CHECK(panel.value(i, 0) < 1.0);
  }
}

TEST_CASE("decoupled network equals independent single-map runs") {
  NetworkSpec spec;
  spec.adjacency = AdjacencyMatrix::from_edges(3, {{0, 1}, {1, 2}});
  spec.sigma = 0.0;
  SimulationOptions options;
  options.transient = 10;
  options.keep = 200;
  options.x0 = NetworkState{0.11, 0.52, 0.83};
  const auto panel = simulate(spec, options);
  for (std::size_t i = 0; i < 3; ++i) {
    NetworkSpec single;
    single.adjacency = AdjacencyMatrix(1);
    SimulationOptions one = options;
    one.x0 = NetworkState{(*options.x0)[i]};
    const auto alone = simulate(single, one);
    for (std::size_t t = 0; t < 200; ++t) CHECK(panel.value(i, t) == alone.value(0, t));
  }
}

TEST_CASE("relabelling nodes relabels the panel exactly") {
  const auto graph = generate_er_graph(8, 0.3, 12);
  NetworkSpec spec;
  spec.adjacency = graph;
  spec.sigma = 0.05;
  SimulationOptions options;
  options.transient = 50;
  options.keep = 300;
  Rng rng(2);
  NetworkState x0(8);
  for (auto& v : x0) v = rng.uniform_open();
  options.x0 = x0;
  const auto base = simulate(spec, options);

  const auto perm = rng.permutation(8);
  NetworkSpec relabelled = spec;
  relabelled.adjacency = graph.permuted(perm);
  NetworkState y0(8);
  for (std::size_t i = 0; i < 8; ++i) y0[perm[i]] = x0[i];
  options.x0 = y0;
  const auto moved = simulate(relabelled, options);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t t = 0; t < 300; ++t) CHECK(moved.value(perm[i], t) == base.value(i, t));
}

TEST_CASE("trajectory escape names the step") {
  NetworkSpec spec;
  spec.adjacency = AdjacencyMatrix::from_edges(2, {{0, 1}});
  spec.sigma = 3.0;
  SimulationOptions options;
  options.transient = 0;
  options.keep = 100;
  options.x0 = NetworkState{0.5, 0.1};
  try {
    simulate(spec, options);
    FAIL("expected an escape");
  } catch (const TrajectoryEscape& e) {
    CHECK(e.step() == 1);
    CHECK(e.node() == 1);
    CHECK(e.kind() == ErrorKind::trajectory_escape);
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
}

TEST_CASE("spec validation") {
  NetworkSpec spec;
  spec.adjacency = AdjacencyMatrix(2);
  spec.sigma = -0.1;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec.sigma = 0.1;
  spec.map_param = 4.5;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec.map_param = 4.0;
  spec.kappa = {1.0, 0.0};
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec.kappa.clear();
  CHECK_NOTHROW(spec.validate());

  SimulationOptions options;
  options.keep = 1;
  CHECK_THROWS_AS(simulate(spec, options), ValidationError);
  options.keep = 10;
  options.x0 = NetworkState{0.5, 1.5};
  CHECK_THROWS_AS(simulate(spec, options), ValidationError);
}

TEST_CASE("two-dimensional states with an inner coupling matrix") {
  NetworkSpec spec;
  spec.adjacency = AdjacencyMatrix::from_edges(2, {{0, 1}});
  spec.state_dim = 2;
  spec.kappa = {1.0, 0.0, 0.0, 0.0};
  const auto next = step_network({0.2, 0.4, 0.3, 0.6}, spec);
  CHECK(next[2] == doctest::Approx(0.84 + 0.1 * (0.64 - 0.84)));
  CHECK(next[3] == doctest::Approx(logistic_step(0.6, 4.0)));
}

TEST_CASE("Erdos-Renyi generator") {
  CHECK(generate_er_graph(6, 0.0, 1).edge_count() == 0);
  const auto full = generate_er_graph(6, 1.0, 1);
  CHECK(full.edge_count() == 30);
  for (std::size_t i = 0; i < 6; ++i) CHECK_FALSE(full.at(i, i));
  CHECK(generate_er_graph(20, 0.1, 4) == generate_er_graph(20, 0.1, 4));

  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed)
    total += static_cast<double>(generate_er_graph(20, 0.1, seed).edge_count());
  CHECK(std::abs(total / 1000.0 - 38.0) <= 3.0);

  CHECK_THROWS_AS(generate_er_graph(5, 1.5, 1), ValidationError);
  CHECK_THROWS_AS(generate_er_graph(0, 0.5, 1), ValidationError);
}

TEST_CASE("Erdos-Renyi edge frequency stays within binomial bounds") {
  // 4-sigma band for the edge indicator mean over 200 graphs of 20 nodes.
  const double trials = 200.0 * 380.0;
  double edges = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed)
    edges += static_cast<double>(generate_er_graph(20, 0.1, 1000 + seed).edge_count());
  const double sd = std::sqrt(0.1 * 0.9 / trials);
  CHECK(std::abs(edges / trials - 0.1) < 4.0 * sd);
}
