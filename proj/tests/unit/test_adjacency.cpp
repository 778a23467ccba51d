#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "geocausal/adjacency.hpp"
#include "geocausal/error.hpp"
#include "geocausal/panel.hpp"
#include "geocausal/random.hpp"

using namespace geocausal;

TEST_CASE("adjacency from edges") {
  const auto a = AdjacencyMatrix::from_edges(3, {{0, 1}, {1, 2}});
  CHECK(a.size() == 3);
  CHECK(a.at(1, 0));
  CHECK(a.at(2, 1));
  CHECK_FALSE(a.at(0, 1));
  CHECK(a.edge_count() == 2);
  CHECK(a.parents(2) == std::vector<std::size_t>{1});
  CHECK(a.edges() == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}});
  CHECK_THROWS_AS(AdjacencyMatrix::from_edges(3, {{0, 3}}), ValidationError);
  CHECK_THROWS_AS(AdjacencyMatrix::from_edges(3, {{1, 1}}), ValidationError);
}

TEST_CASE("adjacency permutation") {
  const auto a = AdjacencyMatrix::from_edges(3, {{0, 1}});
  const auto b = a.permuted({2, 0, 1});
  CHECK(b.at(0, 2));
  CHECK(b.edge_count() == 1);
  CHECK_THROWS_AS(a.permuted({0, 1}), ValidationError);
}

TEST_CASE("panel layout") {
  TimeSeriesPanel panel(2, 3, 1, {1, 2, 3, 4, 5, 6});
  CHECK(panel.value(1, 0) == 4);
  CHECK(panel.series(0).size() == 3);
  CHECK(panel.truncated(2).value(1, 1) == 5);
  const std::vector<std::size_t> pick{1};
  CHECK(panel.select_nodes(pick).value(0, 2) == 6);
  CHECK(panel.fingerprint() == TimeSeriesPanel(2, 3, 1, {1, 2, 3, 4, 5, 6}).fingerprint());
  CHECK(panel.fingerprint() != TimeSeriesPanel(2, 3, 1, {1, 2, 3, 4, 5, 7}).fingerprint());
  CHECK(panel.fingerprint() != TimeSeriesPanel(3, 2, 1, {1, 2, 3, 4, 5, 6}).fingerprint());
  CHECK_THROWS_AS(TimeSeriesPanel(2, 1, 1, {1, 2}), ValidationError);
  CHECK_THROWS_AS(TimeSeriesPanel(1, 2, 1, {1, NAN}), ValidationError);
  CHECK_THROWS_AS(TimeSeriesPanel(1, 2, 1, {1}), ValidationError);
  CHECK_THROWS_AS(panel.truncated(4), ValidationError);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
  CHECK(derive_seed(1, {}) != derive_seed(1, {0}));
}

TEST_CASE("rng mappings") {
  Rng rng(42);
  for (int k = 0; k < 10000; ++k) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    const double v = rng.uniform_open();
    CHECK((v > 0.0 && v < 1.0));
    CHECK(rng.below(7) < 7);
  }
  auto p = rng.permutation(100);
  std::sort(p.begin(), p.end());
  for (std::size_t i = 0; i < 100; ++i) CHECK(p[i] == i);

  // The permutation draw is a pure function of the seed.
  CHECK(Rng(5).permutation(50) == Rng(5).permutation(50));
}
