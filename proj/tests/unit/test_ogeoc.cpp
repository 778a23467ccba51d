#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "geocausal/dynamics.hpp"
#include "geocausal/error.hpp"
#include "geocausal/ogeoc.hpp"
#include "geocausal/random.hpp"

using namespace geocausal;

namespace {

TimeSeriesPanel chain_panel(std::size_t t, std::uint64_t seed) {
  NetworkSpec spec;
  spec.adjacency = AdjacencyMatrix::from_edges(3, {{0, 1}, {1, 2}});
  SimulationOptions options;
  options.keep = t;
  options.seed = seed;
  return simulate(spec, options);
}

}  // namespace

TEST_CASE("threshold index") {
  CHECK(threshold_index(100, 0.01) == 99);
  CHECK(threshold_index(100, 0.99) == 1);
  CHECK(threshold_index(100, 0.5) == 50);
  CHECK(threshold_index(1, 0.5) == 0);
  CHECK_THROWS_AS(threshold_index(0, 0.5), ValidationError);
  CHECK_THROWS_AS(threshold_index(10, 0.0), ValidationError);
  CHECK_THROWS_AS(threshold_index(10, 1.0), ValidationError);
}

TEST_CASE("threshold is the order statistic of the injected surrogates") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(300);
    const double theta = 0.001 + 0.998 * rng.uniform();
    std::vector<double> values(n);
    for (auto& v : values) v = rng.uniform() - 0.5;
    auto sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const auto index = static_cast<std::size_t>(static_cast<double>(n) * (1.0 - theta));
    const double eps = threshold_from_surrogates(values, theta);
    CHECK(eps == sorted[index]);
    // Rank property for distinct values.
    CHECK(std::count_if(values.begin(), values.end(), [&](double v) { return v < eps; }) ==
          static_cast<std::ptrdiff_t>(index));
  }
}

TEST_CASE("thresholds do not increase with theta") {
  Rng rng(3);
  std::vector<double> values(100);
  for (auto& v : values) v = rng.uniform();
  double previous = INFINITY;
  for (double theta = 0.01; theta < 1.0; theta += 0.07) {
    const double eps = threshold_from_surrogates(values, theta);
    CHECK(eps <= previous);
    previous = eps;
  }
}

TEST_CASE("surrogates are deterministic and thread-independent") {
  const auto panel = chain_panel(600, 1);
  GeoCEstimator estimator(panel, {});
  const auto serial = surrogate_geoc(estimator, 2, 0, {1}, 12, 44, 1);
  const auto parallel = surrogate_geoc(estimator, 2, 0, {1}, 12, 44, 4);
  CHECK(serial == parallel);
  CHECK(std::is_sorted(serial.begin(), serial.end()));
  CHECK(surrogate_geoc(estimator, 2, 0, {1}, 12, 45, 1) != serial);
  CHECK_THROWS_AS(surrogate_geoc(estimator, 2, 1, {1}, 12, 44, 1), ValidationError);
}

TEST_CASE("shuffling a constant series is a no-op") {
  const auto base = chain_panel(500, 2);
  std::vector<double> values(base.values().begin(), base.values().end());
  for (std::size_t t = 0; t < base.n_steps(); ++t) values[t] = 0.3;
  TimeSeriesPanel panel(3, base.n_steps(), 1, values);
  GeoCEstimator estimator(panel, {});
  const auto s = surrogate_geoc(estimator, 2, 0, {1}, 10, 5, 1);
  for (double v : s) CHECK(v == s.front());
  ShuffleConfig config{10, 0.3, 5};
  CHECK(shuffle_threshold(estimator, 2, 0, {1}, config) == s.front());
}

TEST_CASE("shuffle configuration is validated") {
  CHECK_THROWS_AS((ShuffleConfig{0, 0.1, 0}.validate()), ValidationError);
  CHECK_THROWS_AS((ShuffleConfig{10, 1.0, 0}.validate()), ValidationError);
  CHECK_NOTHROW((ShuffleConfig{10, 0.5, 0}.validate()));
}

TEST_CASE("forward pass follows test-then-admit") {
  const auto panel = chain_panel(2000, 3);
  GeoCEstimator estimator(panel, {});
  InferenceOptions options;
  options.shuffle.n_permutations = 20;
  options.threads = 1;
  const auto result = forward_geoc(estimator, 1, options);
  REQUIRE_FALSE(result.trace.steps.empty());
  NodeSet admitted;
  for (std::size_t t = 0; t < result.trace.steps.size(); ++t) {
    const auto& step = result.trace.steps[t];
    CHECK(step.conditioning == admitted);
    double best = -INFINITY;
    for (const auto& s : step.scores) best = std::max(best, s.geoc);
    CHECK(step.max_geoc == best);
    CHECK(step.accepted == (step.max_geoc > step.threshold));
    if (t + 1 < result.trace.steps.size()) CHECK(step.accepted);
    if (step.accepted) admitted.push_back(step.best);
  }
  CHECK(admitted == result.candidates);
  // Node 0 drives node 1, so it must be among the first candidates admitted.
  CHECK(std::find(result.candidates.begin(), result.candidates.end(), 0) !=
        result.candidates.end());
}

TEST_CASE("self-candidacy flag") {
  const auto panel = chain_panel(1000, 4);
  GeoCEstimator estimator(panel, {});
  InferenceOptions options;
  options.shuffle.n_permutations = 10;
  options.threads = 1;
  options.self_candidates = false;
  const auto result = forward_geoc(estimator, 2, options);
  for (const auto& step : result.trace.steps)
    for (const auto& s : step.scores) CHECK(s.node != 2);
  options.self_candidates = true;
  const auto with_self = forward_geoc(estimator, 2, options);
  bool saw_self = false;
  for (const auto& s : with_self.trace.steps.front().scores) saw_self = saw_self || s.node == 2;
  CHECK(saw_self);
}

TEST_CASE("backward pass only removes") {
  const auto panel = chain_panel(1000, 5);
  GeoCEstimator estimator(panel, {});
  const std::vector<NodeSet> candidates{{0}, {0, 1, 2}, {1, 0}};
  const auto result = backward_geoc(estimator, candidates, 0.01);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(is_subset(result.parents[i], candidates[i]));
    CHECK_FALSE(result.adjacency.at(i, i));
  }
  // Singleton: the test reduces to GeoC_{j->i|empty} > eps.
  const bool keep = estimator.geoc({0}, {0}, {}).value > 0.01;
  CHECK((result.parents[0] == NodeSet{0}) == keep);

  // Row i of the estimate lists the drivers of i.
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) {
        const bool kept = std::find(result.parents[i].begin(), result.parents[i].end(), j) !=
                          result.parents[i].end();
        CHECK(result.adjacency.at(i, j) == kept);
      }

  const auto none = backward_geoc(estimator, candidates, 1e9);
  for (const auto& p : none.parents) CHECK(p.empty());
  CHECK_THROWS_AS(backward_geoc(estimator, {{0}}, 0.01), ValidationError);
}

TEST_CASE("decoupled nodes get no edges") {
  NetworkSpec spec;
  spec.adjacency = AdjacencyMatrix(3);
  spec.sigma = 0.0;
  SimulationOptions sim;
  sim.keep = 1500;
  sim.seed = 6;
  const auto panel = simulate(spec, sim);
  InferenceOptions options;
  options.shuffle.n_permutations = 20;
  options.threads = 1;
  const auto result = infer_network(panel, options);
  CHECK(result.complete());
  CHECK(result.adjacency.edge_count() == 0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(is_subset(result.parents[i], result.candidates[i]));
}

TEST_CASE("inferred edges point from driver to driven node") {
  const auto panel = chain_panel(3000, 2);
  InferenceOptions options;
  options.shuffle.n_permutations = 20;
  options.threads = 1;
  const auto result = infer_network(panel, options);
  REQUIRE(result.complete());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) {
        const bool parent = std::find(result.parents[i].begin(), result.parents[i].end(), j) !=
                            result.parents[i].end();
        CHECK(result.adjacency.at(i, j) == parent);
      }
  // The driver 0 of node 1 is always found on this chain.
  CHECK(result.adjacency.at(1, 0));
  CHECK_FALSE(result.adjacency.at(0, 1));
}

TEST_CASE("inference is identical for any thread count") {
  const auto panel = chain_panel(800, 7);
  InferenceOptions options;
  options.shuffle.n_permutations = 10;
  options.threads = 1;
  const auto serial = infer_network(panel, options);
  options.threads = 3;
  const auto parallel = infer_network(panel, options);
  CHECK(serial.adjacency == parallel.adjacency);
  CHECK(serial.candidates == parallel.candidates);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(serial.traces[i].steps.size() == parallel.traces[i].steps.size());
    for (std::size_t t = 0; t < serial.traces[i].steps.size(); ++t)
      CHECK(serial.traces[i].steps[t].threshold == parallel.traces[i].steps[t].threshold);
  }
}

TEST_CASE("estimation failures are reported per node") {
  // A grid far below every pair distance leaves empty curves.
  const auto panel = chain_panel(50, 8);
  InferenceOptions options;
  options.estimator.grid = RadiusGrid{1e-9, 2e-9, 4};
  options.shuffle.n_permutations = 5;
  const auto result = infer_network(panel, options);
  CHECK_FALSE(result.complete());
  CHECK(result.failures.size() == 3);
  CHECK(result.failures.front().kind == ErrorKind::estimation);
  CHECK(result.adjacency.edge_count() == 0);
}
